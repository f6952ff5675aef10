// Command-line front end: transforms on a grid, tail predictions against
// estimates, Monte Carlo spectra, and the verification suites.
//
// Exit codes: 0 ok, 1 tolerance failure, 2 usage error, 3 numerical failure.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "freemult/errors.hpp"
#include "freemult/free_mult.hpp"
#include "freemult/id_laws.hpp"
#include "freemult/json_io.hpp"
#include "freemult/matrix_mc.hpp"
#include "freemult/regvar.hpp"
#include "freemult/transforms.hpp"
#include "freemult/verify.hpp"

namespace fm = freemult;

namespace {

constexpr int kOk = 0;
constexpr int kToleranceFailure = 1;
constexpr int kUsage = 2;
constexpr int kNumeric = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_grid(const std::string& spec) {
  double a = 0, b = 0;
  int n = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(spec);
  if (!(in >> a >> c1 >> b >> c2 >> n) || c1 != ':' || c2 != ':' || !in.eof()) {
    throw UsageError("grid must look like a:b:n, got '" + spec + "'");
  }
  return fm::geometric_grid(a, b, n);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

// Tail of mu at infinity, declared on the command line or known for the family.
struct DeclaredTail {
  double alpha = 0.0;
  fm::LogPowerSV L;
};

struct TailFlags {
  std::optional<double> alpha;
  std::optional<double> c;
  std::string exps;

  void add_to(CLI::App* app) {
    app->add_option("--alpha", alpha, "tail index of the input law");
    app->add_option("--c", c, "tail constant of the input law");
    app->add_option("--exps", exps, "iterated-log exponents of the slowly varying factor, comma separated");
  }

  std::optional<DeclaredTail> resolve(const fm::MeasureSpec& mu) const {
    std::optional<DeclaredTail> out;
    if (const auto* p = mu.get_if<fm::Pareto>()) out = DeclaredTail{p->alpha, fm::LogPowerSV{1.0, {}}};
    if (alpha) {
      if (!out) out = DeclaredTail{};
      out->alpha = *alpha;
    }
    if (out) {
      if (c) out->L.c = *c;
      if (!exps.empty()) out->L.exps = parse_list(exps);
    }
    return out;
  }
};

struct Tolerances {
  double index = 0.02;
  double constant = 0.10;

  void add_to(CLI::App* app) {
    app->add_option("--index-tol", index, "allowed |index difference| between prediction and estimate");
    app->add_option("--constant-tol", constant, "allowed relative constant difference");
  }
};

struct Report {
  fm::Json body;
  bool within_tolerance = true;
};

// Compares a prediction to an estimate and records the outcome in the report.
void compare(Report& r, const fm::TailAsymptotic& predicted, const fm::TailAsymptotic& estimated,
             const Tolerances& tol) {
  const double di = std::abs(predicted.index - estimated.index);
  fm::Json cmp{{"index_difference", di}, {"index_tolerance", tol.index}};
  bool ok = di <= tol.index;
  if (predicted.constant_known && estimated.constant_known) {
    const double rel = std::abs(estimated.constant() / predicted.constant() - 1.0);
    cmp["constant_relative_difference"] = rel;
    cmp["constant_tolerance"] = tol.constant;
    ok = ok && rel <= tol.constant;
  }
  cmp["within_tolerance"] = ok;
  r.body["comparison"] = cmp;
  r.within_tolerance = ok;
}

fm::Json header(const std::string& command) { return fm::Json{{"schema", fm::kSchema}, {"command", command}}; }

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw UsageError("cannot open '" + path + "' for writing");
  out << text;
}

std::string dump(const fm::Json& j) { return j.dump(2) + "\n"; }

fm::EstimateMode parse_mode(const std::string& s) {
  try {
    return fm::EstimateMode::parse(s);
  } catch (const fm::Error& e) {
    throw UsageError(e.what());
  }
}

// --config: keys of a JSON object become "--key value" arguments unless the
// same option is already on the command line.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] != "--config" && args[i].rfind("--config=", 0) != 0) continue;
    std::string path;
    std::size_t span = 1;
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file");
      path = args[i + 1];
      span = 2;
    } else {
      path = args[i].substr(9);
    }
    args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + span));
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config '" + path + "'");
    fm::Json cfg;
    try {
      cfg = fm::Json::parse(in);
    } catch (const std::exception& e) {
      throw UsageError(std::string("config: ") + e.what());
    }
    if (!cfg.is_object()) throw UsageError("config must be a JSON object");
    for (const auto& [key, value] : cfg.items()) {
      const std::string flag = "--" + key;
      bool present = false;
      for (const std::string& a : args) present = present || a == flag || a.rfind(flag + "=", 0) == 0;
      if (present) continue;
      args.push_back(flag);
      args.push_back(value.is_string() ? value.get<std::string>() : value.dump());
    }
    break;
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"S-transform toolkit for free multiplicative convolution"};
  app.require_subcommand(1);

  // transform
  auto* transform = app.add_subcommand("transform", "psi(-1/x) and S(-1/x) on a grid as CSV");
  std::string t_measure, t_grid = "1:6:11", t_out;
  transform->add_option("--measure", t_measure, "measure JSON or file")->required();
  transform->add_option("--grid", t_grid, "a:b:n geometric points 10^a..10^b");
  transform->add_option("--out", t_out, "output file (default stdout)");

  // power
  auto* power = app.add_subcommand("power", "tail of mu^{boxtimes t}: prediction vs estimate");
  std::string p_measure, p_grid, p_mode = "auto", p_out;
  double p_t = 2.0;
  TailFlags p_tail;
  Tolerances p_tol;
  power->add_option("--measure", p_measure, "measure JSON or file")->required();
  power->add_option("--t", p_t, "convolution power (>= 1)")->required();
  power->add_option("--grid", p_grid, "a:b:n estimation grid");
  power->add_option("--mode", p_mode, "auto|slow|alpha01|alpha1|finite_mean(p)");
  power->add_option("--out", p_out, "output file (default stdout)");
  p_tail.add_to(power);
  p_tol.add_to(power);

  // idtail
  auto* idtail = app.add_subcommand("idtail", "tail of an infinitely divisible law: prediction vs estimate");
  std::string i_pair, i_grid, i_mode = "auto", i_out, i_exps;
  std::optional<double> i_alpha, i_c, i_limit;
  Tolerances i_tol;
  idtail->add_option("--pair", i_pair, "Levy pair JSON or file")->required();
  idtail->add_option("--sigma-alpha", i_alpha, "index of sigma([0,x)) ~ x^alpha L(1/x) at 0");
  idtail->add_option("--sigma-c", i_c, "constant of L");
  idtail->add_option("--sigma-exps", i_exps, "iterated-log exponents of L");
  idtail->add_option("--limit", i_limit, "lim L, required when the index is 1");
  idtail->add_option("--grid", i_grid, "a:b:n estimation grid");
  idtail->add_option("--mode", i_mode, "estimation mode");
  idtail->add_option("--out", i_out, "output file (default stdout)");
  i_tol.add_to(idtail);

  // breiman
  auto* breiman = app.add_subcommand("breiman", "tail of mu boxtimes nu for integrable nu");
  std::string b_mu, b_nu, b_grid, b_out;
  TailFlags b_tail;
  Tolerances b_tol;
  breiman->add_option("--mu", b_mu, "heavy-tailed measure JSON or file")->required();
  breiman->add_option("--nu", b_nu, "measure with finite mean, JSON or file")->required();
  breiman->add_option("--grid", b_grid, "a:b:n estimation grid");
  breiman->add_option("--out", b_out, "output file (default stdout)");
  b_tail.add_to(breiman);
  b_tol.add_to(breiman);

  // mc
  auto* mc = app.add_subcommand("mc", "Monte Carlo spectrum of a product of rotated matrices");
  std::string m_measure, m_out, m_csv;
  fm::McConfig m_cfg;
  std::size_t m_k = 0;
  TailFlags m_tail;
  double m_index_tol = 0.3;
  mc->add_option("--measure", m_measure, "measure JSON or file")->required();
  mc->add_option("--t", m_cfg.t, "number of factors")->required()->check(CLI::PositiveNumber);
  mc->add_option("--n", m_cfg.n, "matrix size")->check(CLI::PositiveNumber);
  mc->add_option("--reps", m_cfg.reps, "replicates")->check(CLI::PositiveNumber);
  mc->add_option("--seed", m_cfg.seed, "seed");
  mc->add_option("--k", m_k, "Hill top-order count (default 1% of samples)");
  mc->add_option("--index-tol", m_index_tol, "allowed |Hill index - predicted index|");
  mc->add_option("--csv", m_csv, "also write the eigenvalues as CSV");
  mc->add_option("--out", m_out, "output file (default stdout)");
  m_tail.add_to(mc);

  // verify
  auto* verify = app.add_subcommand("verify", "run a named acceptance scenario");
  std::string v_suite;
  bool v_list = false;
  verify->add_option("--suite", v_suite, "suite name (see --list)");
  verify->add_flag("--list", v_list, "list suites");

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = merge_config(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (transform->parsed()) {
      const fm::MeasureSpec mu = fm::measure_from_json(fm::parse_json_arg(t_measure));
      const std::vector<double> grid = parse_grid(t_grid);
      const fm::STransformHandle h = fm::s_handle(mu);
      const bool closed_only = mu.get_if<fm::MuAlphaBeta>() != nullptr;
      std::ostringstream os;
      os << "x,psi,S\n";
      char line[128];
      for (double x : grid) {
        const double z = -1.0 / x;
        const double psi = closed_only ? fm::psi_of_combination(h, z) : fm::psi_eval(mu, z);
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", x, psi, h(z));
        os << line;
      }
      write_text(t_out, os.str());
      return kOk;
    }

    if (power->parsed()) {
      const fm::MeasureSpec mu = fm::measure_from_json(fm::parse_json_arg(p_measure));
      if (!(p_t >= 1.0)) throw UsageError("--t must be >= 1");
      const fm::STransformHandle base = fm::s_handle(mu);
      const fm::STransformHandle h = fm::s_power(base, p_t);
      const std::vector<double> grid = p_grid.empty() ? fm::default_grid() : parse_grid(p_grid);
      const fm::TailEstimate est = fm::estimate_tail_from_s(h, grid, parse_mode(p_mode));
      Report r{header("power")};
      r.body["input"] = fm::Json{{"measure", fm::to_json(mu)}, {"t", p_t}};
      r.body["predicted"] = nullptr;
      if (const auto tail = p_tail.resolve(mu)) {
        std::optional<double> m1;
        if (tail->alpha > 1.0 && base.m1().finite()) m1 = base.m1().value;
        const fm::TailAsymptotic pred = fm::predict_power_tail(tail->alpha, tail->L, p_t, m1);
        r.body["predicted"] = fm::to_json(pred);
        r.body["estimated"] = fm::to_json(est);
        compare(r, pred, est.tail, p_tol);
      } else {
        r.body["estimated"] = fm::to_json(est);
      }
      write_text(p_out, dump(r.body));
      return r.within_tolerance ? kOk : kToleranceFailure;
    }

    if (idtail->parsed()) {
      const fm::LevyPair pair = fm::levy_pair_from_json(fm::parse_json_arg(i_pair));
      fm::SigmaLeftTail left;
      bool declared = false;
      if (pair.sigma) {
        if (const auto* s = pair.sigma->get_if<fm::SigmaMinFamily>(); s && pair.atom_zero == 0.0) {
          left = {s->alpha, fm::LogPowerSV{s->c, {}}, std::nullopt};
          if (s->alpha == 1.0) left.limit = s->c;
          declared = true;
        }
      }
      if (i_alpha) {
        left.alpha = *i_alpha;
        declared = true;
      }
      if (i_c) left.L.c = *i_c;
      if (!i_exps.empty()) left.L.exps = parse_list(i_exps);
      if (i_limit) left.limit = *i_limit;

      const std::vector<double> grid = i_grid.empty() ? fm::default_grid() : parse_grid(i_grid);
      const fm::TailEstimate est = fm::estimate_tail_from_s(fm::s_id_handle(pair), grid, parse_mode(i_mode));
      Report r{header("idtail")};
      r.body["input"] = fm::Json{{"pair", fm::to_json(pair)}};
      r.body["predicted"] = nullptr;
      if (declared) {
        const fm::TailAsymptotic pred = fm::id_tail_predict(pair, left);
        r.body["predicted"] = fm::to_json(pred);
        r.body["estimated"] = fm::to_json(est);
        compare(r, pred, est.tail, i_tol);
      } else {
        r.body["estimated"] = fm::to_json(est);
      }
      write_text(i_out, dump(r.body));
      return r.within_tolerance ? kOk : kToleranceFailure;
    }

    if (breiman->parsed()) {
      const fm::MeasureSpec mu = fm::measure_from_json(fm::parse_json_arg(b_mu));
      const fm::MeasureSpec nu = fm::measure_from_json(fm::parse_json_arg(b_nu));
      const auto tail = b_tail.resolve(mu);
      if (!tail) throw UsageError("breiman: declare the tail of --mu with --alpha/--c");
      const fm::STransformHandle hnu = fm::s_handle(nu);
      if (!hnu.m1().finite()) throw UsageError("breiman: --nu must have a finite mean");
      const fm::SPart parts[] = {{fm::s_handle(mu), 1.0}, {hnu, 1.0}};
      const std::vector<double> grid = b_grid.empty() ? fm::default_grid() : parse_grid(b_grid);
      const fm::TailEstimate est = fm::estimate_tail_from_s(fm::s_combine(parts), grid);
      const fm::TailAsymptotic pred = fm::breiman_predict(tail->alpha, tail->L.c, hnu.m1().value);
      Report r{header("breiman")};
      r.body["input"] = fm::Json{{"mu", fm::to_json(mu)}, {"nu", fm::to_json(nu)}, {"m1_nu", hnu.m1().value}};
      r.body["predicted"] = fm::to_json(pred);
      r.body["estimated"] = fm::to_json(est);
      compare(r, pred, est.tail, b_tol);
      write_text(b_out, dump(r.body));
      return r.within_tolerance ? kOk : kToleranceFailure;
    }

    if (mc->parsed()) {
      const fm::MeasureSpec mu = fm::measure_from_json(fm::parse_json_arg(m_measure));
      const std::vector<double> ev = fm::product_spectrum(mu, m_cfg);
      if (!m_csv.empty()) {
        std::ostringstream os;
        fm::dump_samples_csv(ev, os);
        write_text(m_csv, os.str());
      }
      const std::size_t k = m_k ? m_k : std::max<std::size_t>(ev.size() / 100, 2);
      Report r{header("mc")};
      r.body["input"] = fm::Json{{"measure", fm::to_json(mu)}, {"t", m_cfg.t}, {"n", m_cfg.n},
                                 {"reps", m_cfg.reps}, {"seed", m_cfg.seed}, {"k", k}};
      const fm::RegVarFit hill = fm::hill_fit(ev, k);
      r.body["hill"] = fm::Json{{"index", -hill.index}, {"constant", hill.constant}};
      if (m_cfg.reps >= 2) {
        const fm::MeanEstimate m = fm::block_mean(ev, m_cfg.n);
        r.body["mean_eigenvalue"] = fm::Json{{"mean", m.mean}, {"standard_error", m.standard_error}};
      }
      r.body["predicted"] = nullptr;
      if (const auto tail = m_tail.resolve(mu)) {
        const fm::STransformHandle base = fm::s_handle(mu);
        std::optional<double> m1;
        if (tail->alpha > 1.0 && base.m1().finite()) m1 = base.m1().value;
        const fm::TailAsymptotic pred = fm::predict_power_tail(tail->alpha, tail->L, m_cfg.t, m1);
        r.body["predicted"] = fm::to_json(pred);
        const double di = std::abs(-hill.index - pred.index);
        r.within_tolerance = di <= m_index_tol;
        r.body["comparison"] = fm::Json{{"index_difference", di}, {"index_tolerance", m_index_tol},
                                        {"within_tolerance", r.within_tolerance}};
      }
      write_text(m_out, dump(r.body));
      return r.within_tolerance ? kOk : kToleranceFailure;
    }

    if (verify->parsed()) {
      if (v_list) {
        for (const std::string& s : fm::verify::suite_names()) std::cout << s << "\n";
        return kOk;
      }
      const std::vector<int> ids = fm::verify::suite_criteria(v_suite);
      if (ids.empty()) throw UsageError("unknown suite '" + v_suite + "' (try --list)");
      bool all = true;
      for (int id : ids) {
        const fm::verify::CriterionResult res = fm::verify::run_criterion(id);
        std::cout << fm::verify::format_line(res) << std::endl;
        all = all && res.passed;
      }
      return all ? kOk : kToleranceFailure;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const fm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    const bool usage = e.code() == fm::ErrorCode::InvalidArgument || e.code() == fm::ErrorCode::UnknownTag ||
                       e.code() == fm::ErrorCode::MissingLimit || e.code() == fm::ErrorCode::RegimeMismatch ||
                       e.code() == fm::ErrorCode::OutOfRange || e.code() == fm::ErrorCode::DomainTooSmall;
    return usage ? kUsage : kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumeric;
  }
  return kUsage;
}
