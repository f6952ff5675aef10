#include "freemult/regvar.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "freemult/errors.hpp"

namespace freemult {

namespace {

constexpr double kPi = std::numbers::pi;

double sinc_pi(double a) { return std::sin(kPi * a) / (kPi * a); }

struct Line {
  double slope = 0.0;
  double intercept = 0.0;
};

Line least_squares(std::span<const double> u, std::span<const double> y) {
  const double n = static_cast<double>(u.size());
  const double mu = std::accumulate(u.begin(), u.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double suu = 0.0, suy = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    suu += (u[i] - mu) * (u[i] - mu);
    suy += (u[i] - mu) * (y[i] - my);
  }
  const double slope = suy / suu;
  return {slope, my - slope * mu};
}

std::vector<double> local_slopes(std::span<const double> u, std::span<const double> y) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) out.push_back((y[i + 1] - y[i]) / (u[i + 1] - u[i]));
  return out;
}

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void check_geometric(std::span<const double> grid, std::size_t min_points) {
  if (grid.size() < min_points) {
    throw Error(ErrorCode::InvalidArgument,
                "grid needs at least " + std::to_string(min_points) + " points");
  }
  const double r0 = grid[1] / grid[0];
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || std::abs(grid[i + 1] / grid[i] - r0) > 1e-6 * r0 || !(r0 > 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "grid must be increasing and geometric");
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Log-power slowly varying functions

double LogPowerSV::threshold() const {
  if (exps.empty()) return 0.0;
  double x = 1.0;
  for (std::size_t k = 0; k < exps.size(); ++k) x = std::exp(x);
  return x;
}

bool LogPowerSV::is_constant() const {
  return std::all_of(exps.begin(), exps.end(), [](double a) { return a == 0.0; });
}

double sv_log(const LogPowerSV& L, double x) {
  if (!(x > L.threshold())) {
    throw Error(ErrorCode::DomainTooSmall, "slowly varying function evaluated below its threshold");
  }
  double out = std::log(L.c);
  double ell = x;
  for (const double a : L.exps) {
    ell = std::log(ell);
    if (a != 0.0) out += a * std::log(ell);
  }
  return out;
}

double sv_eval(const LogPowerSV& L, double x) { return std::exp(sv_log(L, x)); }

LogPowerSV sv_mul(const LogPowerSV& a, const LogPowerSV& b) {
  LogPowerSV out{a.c * b.c, std::vector<double>(std::max(a.exps.size(), b.exps.size()), 0.0)};
  for (std::size_t k = 0; k < a.exps.size(); ++k) out.exps[k] += a.exps[k];
  for (std::size_t k = 0; k < b.exps.size(); ++k) out.exps[k] += b.exps[k];
  return out;
}

LogPowerSV sv_pow(const LogPowerSV& L, double r) {
  LogPowerSV out{std::pow(L.c, r), L.exps};
  for (double& a : out.exps) a *= r;
  return out;
}

LogPowerSV de_bruijn_conjugate(const LogPowerSV& L) { return sv_pow(L, -1.0); }

double de_bruijn_exact(const LogPowerSV& L, double y) {
  // Solve log x + log L(x) = log y for x above the threshold.
  const double lo0 = std::max(L.threshold(), 1.0) * (1.0 + 1e-12) + 1e-12;
  const double target = std::log(y);
  auto h = [&](double s) { return s + sv_log(L, std::exp(s)) - target; };
  double a = std::log(lo0), b = std::max(a + 1.0, target);
  if (h(a) > 0.0) throw Error(ErrorCode::DomainTooSmall, "de_bruijn_exact: y below range of x L(x)");
  for (int it = 0; h(b) < 0.0; ++it) {
    if (it > 200) throw Error(ErrorCode::NoBracket, "de_bruijn_exact: no bracket");
    b += 2.0 * (b - a);
  }
  std::uintmax_t max_iter = 200;
  const auto [l, r] = boost::math::tools::toms748_solve(
      h, a, b, boost::math::tools::eps_tolerance<double>(52), max_iter);
  const double x = std::exp(0.5 * (l + r));
  return x / y;
}

// ---------------------------------------------------------------------------
// Fitting

RegVarFit fit_reg_var(const std::function<double(double)>& f, std::span<const double> grid,
                      const std::optional<LogPowerSV>& sv) {
  check_geometric(grid, 5);
  std::vector<double> u, y;
  for (const double x : grid) {
    const double v = f(x);
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::NonPositiveValue, "fit_reg_var: f(" + std::to_string(x) + ") <= 0");
    }
    u.push_back(std::log(x));
    y.push_back(std::log(v) - (sv ? sv_log(*sv, x) : 0.0));
  }
  const Line line = least_squares(u, y);
  RegVarFit fit;
  fit.index = line.slope;
  fit.constant = std::exp(line.intercept);
  fit.grid.assign(grid.begin(), grid.end());
  for (std::size_t i = 0; i < u.size(); ++i) {
    fit.residuals.push_back(y[i] - (line.intercept + line.slope * u[i]));
  }
  fit.local_slopes = local_slopes(u, y);
  const auto [mn, mx] = std::minmax_element(fit.local_slopes.begin(), fit.local_slopes.end());
  fit.slope_drift = *mx - *mn;
  fit.degraded = fit.slope_drift > kSlopeDriftThreshold;
  return fit;
}

PiClassFit pi_class_test(const std::function<double(double)>& g,
                         const std::function<double(double)>& lref, std::span<const double> grid,
                         std::span<const double> lambdas) {
  if (grid.empty() || lambdas.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "pi_class_test: need a grid and >= 2 lambdas");
  }
  PiClassFit out;
  for (const double x : grid) {
    const double g0 = g(x);
    const double l0 = lref(x);
    // Normal equations for y = c l + e l^2.
    double s11 = 0.0, s12 = 0.0, s22 = 0.0, t1 = 0.0, t2 = 0.0;
    std::vector<double> ls, ys;
    for (const double lam : lambdas) {
      const double l = std::log(lam);
      const double yv = (g(lam * x) - g0) / l0;
      ls.push_back(l);
      ys.push_back(yv);
      s11 += l * l;
      s12 += l * l * l;
      s22 += l * l * l * l;
      t1 += l * yv;
      t2 += l * l * yv;
    }
    const double det = s11 * s22 - s12 * s12;
    const double c = (t1 * s22 - t2 * s12) / det;
    const double e = (s11 * t2 - s12 * t1) / det;
    out.per_x.push_back(c);
    for (std::size_t k = 0; k < ls.size(); ++k) {
      out.residuals.push_back(ys[k] - (c * ls[k] + e * ls[k] * ls[k]));
    }
  }
  out.c = mean(out.per_x);
  const auto [mn, mx] = std::minmax_element(out.per_x.begin(), out.per_x.end());
  out.drift = (*mx - *mn) / std::max(std::abs(out.c), 1e-300);
  out.in_class = std::isfinite(out.c) && std::isfinite(out.drift) && out.drift <= 0.05;
  return out;
}

// ---------------------------------------------------------------------------
// Tail records and predictions

std::string to_string(Regime r) {
  switch (r) {
    case Regime::Slow:
      return "slow";
    case Regime::Alpha01:
      return "alpha01";
    case Regime::Alpha1Critical:
      return "alpha1_critical";
    case Regime::FiniteMean:
      return "finite_mean";
    case Regime::PiClass:
      return "pi_class";
  }
  return "unknown";
}

Regime regime_from_string(const std::string& s) {
  for (const Regime r : {Regime::Slow, Regime::Alpha01, Regime::Alpha1Critical,
                         Regime::FiniteMean, Regime::PiClass}) {
    if (to_string(r) == s) return r;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown regime '" + s + "'");
}

double TailAsymptotic::eval(double x) const { return std::exp(sv_log(sv, x) - index * std::log(x)); }

Regime regime_for_index(double alpha, bool finite_mean) {
  if (alpha == 0.0) return Regime::Slow;
  if (alpha < 1.0) return Regime::Alpha01;
  if (alpha == 1.0 && !finite_mean) return Regime::Alpha1Critical;
  return Regime::FiniteMean;
}

double power_index(double alpha, double t) { return alpha / (alpha + t * (1.0 - alpha)); }

TailAsymptotic predict_power_tail(double alpha, const LogPowerSV& L, double t,
                                  std::optional<double> m1) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::InvalidArgument, "predict_power_tail: alpha must be >= 0");
  }
  if (!(t >= 1.0)) throw Error(ErrorCode::ExponentBelowOne, "predict_power_tail: t must be >= 1");
  if (m1 && !(*m1 > 0.0 && std::isfinite(*m1))) {
    throw Error(ErrorCode::InvalidArgument, "predict_power_tail: m1 must be finite and > 0");
  }
  if (alpha < 1.0 && m1) {
    throw Error(ErrorCode::RegimeMismatch, "a finite first moment needs alpha >= 1");
  }
  TailAsymptotic out{alpha, L, regime_for_index(alpha, m1.has_value()), true, std::nullopt};
  if (t == 1.0) return out;

  if (alpha == 0.0) {
    // L(x) = c log(x)^{-beta} (loglog x)^... ; tail multiplies by t^beta.
    const double beta = L.exps.empty() ? 0.0 : -L.exps[0];
    if (!(beta > 0.0)) {
      throw Error(ErrorCode::RegimeMismatch, "slow regime needs a tail c log(x)^{-beta}, beta > 0");
    }
    out.sv.c = L.c * std::pow(t, beta);
    return out;
  }
  if (alpha < 1.0) {
    // For L = c P with P a pure log-power function, the tail of the power is
    // c_t P^r x^{-alpha_t} with r = t alpha_t / alpha.
    const double at = power_index(alpha, t);
    const double r = t * at / alpha;
    const double a1 = L.exps.empty() ? 0.0 : L.exps[0];
    const double d = sinc_pi(alpha);
    out.index = at;
    out.sv = sv_pow(LogPowerSV{1.0, L.exps}, r);
    out.sv.c = sinc_pi(at) * std::pow(L.c / d, r) * std::pow(at / alpha, r * a1);
    out.regime = Regime::Alpha01;
    return out;
  }
  if (alpha == 1.0 && !m1) {
    if (!L.is_constant()) {
      throw Error(ErrorCode::RegimeMismatch, "alpha = 1 with infinite mean needs constant L");
    }
    out.sv = LogPowerSV{std::pow(L.c, t) * t, {t - 1.0}};
    out.regime = Regime::Alpha1Critical;
    return out;
  }
  if (!m1) throw Error(ErrorCode::RegimeMismatch, "alpha >= 1 with finite mean needs m1");
  out.sv.c = L.c * t * std::pow(*m1, alpha * (t - 1.0));
  out.regime = Regime::FiniteMean;
  return out;
}

// ---------------------------------------------------------------------------
// Estimation from an S-transform

EstimateMode EstimateMode::parse(const std::string& s) {
  EstimateMode m;
  if (s == "auto") return m;
  if (s == "slow") {
    m.kind = Kind::Slow;
  } else if (s == "alpha01") {
    m.kind = Kind::Alpha01;
  } else if (s == "alpha1") {
    m.kind = Kind::Alpha1;
  } else if (s.rfind("finite_mean", 0) == 0) {
    m.kind = Kind::FiniteMean;
    const auto open = s.find('(');
    if (open != std::string::npos) m.order = std::stoi(s.substr(open + 1));
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown estimate mode '" + s + "'");
  }
  return m;
}

std::vector<double> geometric_grid(double a, double b, int n) {
  if (n < 2 || !(b > a)) throw Error(ErrorCode::InvalidArgument, "grid needs b > a and n >= 2");
  std::vector<double> out;
  for (int k = 0; k < n; ++k) out.push_back(std::pow(10.0, a + (b - a) * k / (n - 1)));
  return out;
}

std::vector<double> default_grid() { return geometric_grid(6.0, 16.0, 11); }

namespace {

struct Samples {
  std::vector<double> x, u, y;  // grid, log x, sampled quantity

  std::span<const double> upper_u() const { return std::span(u).subspan(u.size() / 2); }
  std::span<const double> upper_y() const { return std::span(y).subspan(y.size() / 2); }
  std::span<const double> upper_x() const { return std::span(x).subspan(x.size() / 2); }
};

Samples sample_log_s(const STransformHandle& h, std::span<const double> grid) {
  Samples s;
  for (const double x : grid) {
    s.x.push_back(x);
    s.u.push_back(std::log(x));
    s.y.push_back(h.log_value(-1.0 / x));
  }
  return s;
}

TailEstimate alpha01_branch(const Samples& s) {
  const Line line = least_squares(s.upper_u(), s.upper_y());
  const double b = line.slope;
  if (!(b < 0.0)) {
    throw Error(ErrorCode::RegimeMismatch, "log S(-1/x) is not decreasing in log x");
  }
  const double alpha = 1.0 / (1.0 - b);
  const double d = sinc_pi(alpha);
  std::vector<double> logc;
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    logc.push_back(std::log(d) + alpha * ((1.0 - 1.0 / alpha) * s.u[i] - s.y[i]));
  }
  std::vector<double> upper;
  for (std::size_t i = logc.size() / 2; i < logc.size(); ++i) upper.push_back(std::exp(logc[i]));
  const double cbar = mean(upper);
  TailEstimate est;
  est.tail = TailAsymptotic{alpha, LogPowerSV{cbar, {}}, Regime::Alpha01, true, std::nullopt};
  est.branch = "s_power";
  for (const double lc : logc) est.residuals.push_back(lc - std::log(cbar));
  return est;
}

TailEstimate alpha1_branch(const STransformHandle& h, const Samples& s) {
  auto g = [&h](double x) { return std::exp(-h.log_value(-1.0 / x)); };
  const std::vector<double> xs(s.upper_x().begin(), s.upper_x().end());
  const PiClassFit fit = pi_class_test(g, [](double) { return 1.0; }, xs);
  if (!(fit.c > 0.0)) throw Error(ErrorCode::NotRegularlyVarying, "1/S(-1/x) is not in a Pi class");
  TailEstimate est;
  est.tail = TailAsymptotic{1.0, LogPowerSV{fit.c, {}}, Regime::Alpha1Critical, true,
                            LogPowerSV{1.0, {}}};
  est.branch = "pi_inverse_s";
  est.residuals = fit.residuals;
  return est;
}

TailEstimate slow_branch(const Samples& s) {
  // f(x) = (x - 1)/S(-1/x); the tail at y = f(x) is about 1/x. Fit
  // log tail = log c + a log log y.
  std::vector<double> v, lt;
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    const double log_y = std::log(s.x[i] - 1.0) - s.y[i];
    if (!(log_y > 1.0)) continue;
    v.push_back(std::log(log_y));
    lt.push_back(-s.u[i]);
  }
  if (v.size() < 3) throw Error(ErrorCode::NotRegularlyVarying, "f(x) = (x-1)/S(-1/x) does not grow");
  const Line line = least_squares(v, lt);
  TailEstimate est;
  est.tail = TailAsymptotic{0.0, LogPowerSV{std::exp(line.intercept), {line.slope}}, Regime::Slow,
                            false, std::nullopt};
  est.branch = "inverse_f";
  for (std::size_t i = 0; i < v.size(); ++i) {
    est.residuals.push_back(lt[i] - (line.intercept + line.slope * v[i]));
  }
  return est;
}

bool grows(std::span<const double> g) {
  const std::size_t mid = g.size() / 2;
  const double inc1 = std::abs(g[mid] - g.front());
  const double inc2 = std::abs(g.back() - g[mid]);
  double scale = 0.0;
  for (const double v : g) scale = std::max(scale, std::abs(v));
  if (!(inc2 > 1e-7 * std::max(scale, 1e-300))) return false;
  return inc2 >= 0.75 * inc1;
}

TailEstimate finite_mean_branch(const STransformHandle& h, std::span<const double> grid,
                                int forced_order) {
  const double m1 = h.m1().value;
  std::vector<double> g;
  int p = 0;
  const int first = forced_order > 0 ? forced_order : 1;
  const int last = forced_order > 0 ? forced_order : 3;
  for (int order = first; order <= last; ++order) {
    g.clear();
    for (const double x : grid) g.push_back(h.deriv(-1.0 / x, order));
    if (forced_order > 0 || grows(g)) {
      p = order;
      break;
    }
  }
  if (p == 0) {
    throw Error(ErrorCode::NotRegularlyVarying,
                "no derivative of S of order <= 3 grows along the grid");
  }
  Samples s;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(g[i] < 0.0)) {
      throw Error(ErrorCode::NotRegularlyVarying, "S^(p)(-1/x) is not negative on the grid");
    }
    s.x.push_back(grid[i]);
    s.u.push_back(std::log(grid[i]));
    s.y.push_back(std::log(-g[i]));
  }
  const std::vector<double> slopes = local_slopes(s.u, s.y);
  const double slope = least_squares(s.upper_u(), s.upper_y()).slope;
  const auto [mn, mx] = std::minmax_element(slopes.begin(), slopes.end());
  const bool power = slope > 0.1 || (slope > 0.02 && *mx - *mn < 0.02);

  TailEstimate est;
  est.order = p;
  est.local_slopes = slopes;
  if (power) {
    const double alpha = p + 1.0 - slope;
    const double k = std::tgamma(alpha + 1.0) * std::tgamma(p + 1.0 - alpha);
    std::vector<double> cs;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      cs.push_back(-g[i] * std::pow(m1, alpha + 1.0) / (k * std::pow(grid[i], p + 1.0 - alpha)));
    }
    std::vector<double> upper(cs.begin() + static_cast<long>(cs.size() / 2), cs.end());
    const double c = mean(upper);
    est.tail = TailAsymptotic{alpha, LogPowerSV{c, {}}, Regime::FiniteMean, true, std::nullopt};
    est.branch = "derivative_power";
    for (const double ci : cs) est.residuals.push_back(std::log(ci / c));
    return est;
  }
  auto gf = [&h, p](double x) { return h.deriv(-1.0 / x, p); };
  const std::vector<double> xs(s.upper_x().begin(), s.upper_x().end());
  const PiClassFit fit = pi_class_test(gf, [](double) { return 1.0; }, xs);
  const double fact = std::tgamma(p + 2.0);
  const double c = -fit.c * std::pow(m1, p + 2.0) / fact;
  if (!(c > 0.0)) throw Error(ErrorCode::NotRegularlyVarying, "derivative is not in a Pi class");
  est.tail = TailAsymptotic{p + 1.0, LogPowerSV{c, {}}, Regime::PiClass, true, LogPowerSV{1.0, {}}};
  est.branch = "derivative_pi";
  est.residuals = fit.residuals;
  return est;
}

}  // namespace

TailEstimate estimate_tail_from_s(const STransformHandle& h, std::span<const double> grid_in,
                                  EstimateMode mode) {
  std::vector<double> grid = grid_in.empty() ? default_grid()
                                             : std::vector<double>(grid_in.begin(), grid_in.end());
  check_geometric(grid, 5);
  if (std::log10(grid.back() / grid.front()) < 6.0 - 1e-9) {
    throw Error(ErrorCode::InvalidArgument, "estimation grid must span at least 6 decades");
  }
  const bool finite = h.m1().finite();

  if (mode.kind == EstimateMode::Kind::FiniteMean ||
      (mode.kind == EstimateMode::Kind::Auto && finite)) {
    if (!finite) throw Error(ErrorCode::RegimeMismatch, "finite_mean mode needs a finite m1");
    TailEstimate est = finite_mean_branch(h, grid, mode.order);
    est.grid = grid;
    return est;
  }
  if (finite) throw Error(ErrorCode::RegimeMismatch, "this mode needs m1 = infinity");

  const Samples s = sample_log_s(h, grid);
  const std::vector<double> slopes = local_slopes(s.u, s.y);
  TailEstimate est;
  switch (mode.kind) {
    case EstimateMode::Kind::Slow:
      est = slow_branch(s);
      break;
    case EstimateMode::Kind::Alpha01:
      est = alpha01_branch(s);
      break;
    case EstimateMode::Kind::Alpha1:
      est = alpha1_branch(h, s);
      break;
    default: {
      const double bl = slopes.back();
      const double drift = slopes.back() - slopes.front();
      const bool flat = std::all_of(slopes.begin(), slopes.end(),
                                    [](double b) { return std::abs(b) < 1e-12; });
      if (flat) throw Error(ErrorCode::NotRegularlyVarying, "S(-1/x) is constant on the grid");
      if (bl < -0.02 && std::abs(drift) <= 0.02 + 0.02 * std::abs(bl)) {
        est = alpha01_branch(s);
      } else if (bl >= -0.15 && bl < 0.0 && drift > 0.0) {
        est = alpha1_branch(h, s);
      } else if (drift < 0.0) {
        est = slow_branch(s);
      } else {
        throw Error(ErrorCode::AmbiguousRegime,
                    "log-slopes of S(-1/x) do not settle: first " + std::to_string(slopes.front()) +
                        ", last " + std::to_string(bl));
      }
    }
  }
  est.grid = grid;
  est.local_slopes = slopes;
  return est;
}

TailEstimate estimate_left_tail_from_s(const STransformHandle& h, std::span<const double> grid,
                                       EstimateMode mode) {
  return estimate_tail_from_s(hat(h), grid, mode);
}

}  // namespace freemult
