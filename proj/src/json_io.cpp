#include "freemult/json_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "freemult/errors.hpp"

namespace freemult {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidArgument, "json: " + what); }

double number(const Json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) bad(std::string("missing number '") + key + "'");
  const Json& v = obj.at(key);
  if (!v.is_number()) bad(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

double number_or(const Json& obj, const char* key, double fallback) {
  return obj.is_object() && obj.contains(key) ? number(obj, key) : fallback;
}

std::vector<double> numbers(const Json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key) || !obj.at(key).is_array()) {
    bad(std::string("missing array '") + key + "'");
  }
  std::vector<double> out;
  for (const Json& v : obj.at(key)) {
    if (!v.is_number()) bad(std::string("'") + key + "' must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

// Infinite values are written as the strings "inf" / "-inf".
Json real(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return nullptr;
  return x;
}

}  // namespace

MeasureSpec measure_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("family") || !j.at("family").is_string()) {
    bad("measure needs a string 'family'");
  }
  const std::string family = j.at("family").get<std::string>();
  const Json params = j.value("params", Json::object());
  if (family == "atoms") return MeasureSpec::atoms(numbers(params, "locations"), numbers(params, "weights"));
  if (family == "density_grid") {
    const std::string kind = params.value("tail_kind", std::string("power"));
    if (kind != "power" && kind != "exponential") bad("tail_kind must be 'power' or 'exponential'");
    return MeasureSpec::density_grid(numbers(params, "nodes"), numbers(params, "values"),
                                     kind == "power" ? TailKind::Power : TailKind::Exponential,
                                     number(params, "tail_rate"));
  }
  if (family == "pareto") return MeasureSpec::pareto(number(params, "alpha"));
  if (family == "point_mass") return MeasureSpec::point_mass(number(params, "a"));
  if (family == "free_poisson") return MeasureSpec::free_poisson();
  if (family == "mu_alpha_beta") {
    return MeasureSpec::mu_alpha_beta(number(params, "alpha"), number(params, "beta"));
  }
  if (family == "sigma_min") {
    return MeasureSpec::sigma_min(number(params, "c"), number(params, "d"), number(params, "alpha"));
  }
  if (family == "symmetric") {
    if (!params.contains("inner")) bad("symmetric needs 'inner'");
    return MeasureSpec::symmetric(measure_from_json(params.at("inner")));
  }
  if (family == "pushforward") {
    if (!params.contains("inner")) bad("pushforward needs 'inner'");
    return MeasureSpec::pushforward(measure_from_json(params.at("inner")), number(params, "power"));
  }
  bad("unknown family '" + family + "'");
}

Json to_json(const MeasureSpec& mu) {
  Json p = Json::object();
  if (const auto* a = mu.get_if<Atoms>()) {
    p["locations"] = a->locations;
    p["weights"] = a->weights;
  } else if (const auto* g = mu.get_if<DensityGrid>()) {
    p["nodes"] = g->nodes;
    p["values"] = g->values;
    p["tail_kind"] = g->tail_kind == TailKind::Power ? "power" : "exponential";
    p["tail_rate"] = g->tail_rate;
  } else if (const auto* par = mu.get_if<Pareto>()) {
    p["alpha"] = par->alpha;
  } else if (const auto* pm = mu.get_if<PointMass>()) {
    p["a"] = pm->a;
  } else if (const auto* m = mu.get_if<MuAlphaBeta>()) {
    p["alpha"] = m->alpha;
    p["beta"] = m->beta;
  } else if (const auto* s = mu.get_if<SigmaMinFamily>()) {
    p["c"] = s->c;
    p["d"] = s->d;
    p["alpha"] = s->alpha;
  } else if (const auto* sym = mu.get_if<SymmetricWrapper>()) {
    p["inner"] = to_json(*sym->inner);
  } else if (const auto* pf = mu.get_if<Pushforward>()) {
    p["inner"] = to_json(*pf->inner);
    p["power"] = pf->power;
  } else if (mu.get_if<TailFunction>()) {
    throw Error(ErrorCode::NotAvailable, "json: tail_function measures are not serialisable");
  }
  return Json{{"family", mu.family()}, {"params", p}};
}

LevyPair levy_pair_from_json(const Json& j) {
  if (!j.is_object()) bad("levy pair must be an object");
  LevyPair out;
  out.gamma = number_or(j, "gamma", 0.0);
  if (j.contains("sigma") && !j.at("sigma").is_null()) out.sigma = measure_from_json(j.at("sigma"));
  if (j.contains("atoms")) {
    const Json& a = j.at("atoms");
    out.atom_zero = number_or(a, "zero", 0.0);
    out.atom_inf = number_or(a, "inf", 0.0);
  }
  out.validate();
  return out;
}

Json to_json(const LevyPair& pair) {
  return Json{{"gamma", pair.gamma},
              {"sigma", pair.sigma ? to_json(*pair.sigma) : Json(nullptr)},
              {"atoms", Json{{"zero", pair.atom_zero}, {"inf", pair.atom_inf}}}};
}

LogPowerSV sv_from_json(const Json& j) {
  if (j.is_number()) return LogPowerSV{j.get<double>(), {}};
  LogPowerSV out;
  out.c = number_or(j, "c", 1.0);
  if (j.contains("exps")) out.exps = numbers(j, "exps");
  return out;
}

Json to_json(const LogPowerSV& sv) { return Json{{"c", real(sv.c)}, {"exps", sv.exps}}; }

Json to_json(const TailAsymptotic& tail) {
  Json out{{"index", real(tail.index)},
           {"constant", tail.constant_known ? real(tail.constant()) : Json(nullptr)},
           {"regime", to_string(tail.regime)},
           {"constant_known", tail.constant_known},
           {"sv", to_json(tail.sv)}};
  if (tail.pi_reference) out["pi_reference"] = to_json(*tail.pi_reference);
  return out;
}

Json to_json(const RegVarFit& fit) {
  Json slopes = Json::array();
  for (double s : fit.local_slopes) slopes.push_back(real(s));
  return Json{{"index", real(fit.index)},         {"constant", real(fit.constant)},
              {"residuals", fit.residuals},          {"grid", fit.grid},
              {"slope_drift", fit.slope_drift},      {"degraded", fit.degraded},
              {"local_slopes", slopes}};
}

Json to_json(const TailEstimate& est) {
  Json slopes = Json::array();
  for (double s : est.local_slopes) slopes.push_back(real(s));
  return Json{{"tail", to_json(est.tail)},
              {"branch", est.branch},
              {"order", est.order},
              {"regime", to_string(est.tail.regime)},
              {"grid", est.grid},
              {"residuals", est.residuals},
              {"local_slopes", slopes}};
}

Json parse_json_arg(const std::string& text) {
  std::error_code ec;
  std::string body = text;
  if (!text.empty() && text.front() != '{' && text.front() != '[' && std::filesystem::is_regular_file(text, ec)) {
    std::ifstream in(text);
    std::ostringstream ss;
    ss << in.rdbuf();
    body = ss.str();
  }
  try {
    return Json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    bad(std::string("parse error: ") + e.what());
  }
}

}  // namespace freemult
