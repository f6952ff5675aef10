#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

#include "freemult/errors.hpp"
#include "freemult/free_mult.hpp"
#include "freemult/id_laws.hpp"
#include "freemult/matrix_mc.hpp"
#include "freemult/regvar.hpp"
#include "freemult/transforms.hpp"
#include "freemult/verify.hpp"

namespace freemult::verify {

namespace {

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!detail.str().empty()) detail << "; ";
    detail << what << (ok ? "" : " [FAIL]");
    passed = passed && ok;
  }
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

bool within_rel(double value, double target, double rel) { return std::abs(value - target) <= rel * std::abs(target); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void transform_roundtrip(Outcome& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::pair<const char*, MeasureSpec> laws[] = {{"pareto(2)", MeasureSpec::pareto(2.0)},
                                                      {"pareto(0.5)", MeasureSpec::pareto(0.5)},
                                                      {"free_poisson", MeasureSpec::free_poisson()}};
  double worst = 0.0;
  for (const auto& [name, mu] : laws) {
    for (double z : {-0.1, -1.0, -10.0}) worst = std::max(worst, std::abs(chi_eval(mu, psi_eval(mu, z)) - z));
  }
  const double secs = seconds_since(t0);
  out.require(worst <= 1e-9, "max |chi(psi(z)) - z| = " + fmt("%.2e", worst) + " (<= 1e-9)");
  out.require(secs < 1.0, "runtime " + fmt("%.3f", secs) + " s (< 1 s)");
}

void closed_form_oracle(Outcome& out) {
  const MeasureSpec fp = MeasureSpec::free_poisson();
  double worst_series = 0.0, worst_exact = 0.0;
  for (int i = 1; i <= 9; ++i) {
    const double w = -0.1 * i;
    const double s = s_eval(fp, w);
    worst_series = std::max(worst_series, std::abs(s - free_poisson_s_series(w)));
    worst_exact = std::max(worst_exact, std::abs(s - 1.0 / (1.0 + w)));
  }
  out.require(worst_series <= 1e-6 && worst_exact <= 1e-6,
              "free_poisson: max |S - catalan series| = " + fmt("%.2e", worst_series) +
                  ", max |S - 1/(1+w)| = " + fmt("%.2e", worst_exact) + " (<= 1e-6)");
  double worst_pm = 0.0;
  for (double a : {0.25, 1.0, 2.0, 7.5}) {
    for (double w : {-0.9, -0.5, -1e-3, -1e-9}) {
      worst_pm = std::max(worst_pm, std::abs(s_eval(MeasureSpec::point_mass(a), w) - 1.0 / a));
    }
  }
  out.require(worst_pm <= 1e-12, "point_mass: max |S - 1/a| = " + fmt("%.2e", worst_pm) + " (<= 1e-12)");
}

void pareto_phase(Outcome& out, bool below_one) {
  if (below_one) {
    const auto t0 = std::chrono::steady_clock::now();
    const STransformHandle h = s_power(s_handle(MeasureSpec::pareto(0.5)), 2.0);
    const std::vector<double> grid = geometric_grid(8.0, 16.0, 9);
    const TailEstimate e = estimate_tail_from_s(h, grid);
    const double secs = seconds_since(t0);
    out.require(std::abs(e.tail.index - 1.0 / 3.0) <= 0.01,
                "pareto(0.5)^2 index " + fmt("%.5f", e.tail.index) + " (1/3 +- 0.01)");
    out.require(within_rel(e.tail.constant(), 1.51005, 0.05),
                "constant " + fmt("%.5f", e.tail.constant()) + " (1.51005 +- 5%)");
    out.require(secs < 30.0, "runtime " + fmt("%.2f", secs) + " s (< 30 s)");
  } else {
    const STransformHandle h = s_power(s_handle(MeasureSpec::pareto(2.0)), 2.0);
    const TailEstimate e = estimate_tail_from_s(h);
    out.require(std::abs(e.tail.index - 2.0) <= 0.02, "pareto(2)^2 index " + fmt("%.5f", e.tail.index) + " (2 +- 0.02)");
    out.require(within_rel(e.tail.constant(), 8.0, 0.10), "constant " + fmt("%.5f", e.tail.constant()) + " (8 +- 10%)");
  }
}

void critical_line(Outcome& out) {
  const STransformHandle h = s_handle(MeasureSpec::pareto(1.0));
  const double x = 1e12;
  const double ratio = 1.0 / h(-1.0 / x) / std::log(x);
  out.require(std::abs(ratio - 1.0) <= 0.05, "(1/S(-1/x))/log x at 1e12 = " + fmt("%.5f", ratio) + " (1 +- 5%)");
  const STransformHandle sq = s_power(h, 2.0);
  const std::vector<double> grid = default_grid();
  const PiClassFit fit = pi_class_test([&](double y) { return 1.0 / sq(-1.0 / y); },
                                       [](double y) { return 2.0 * std::log(y); }, grid);
  out.require(std::abs(fit.c - 1.0) <= 0.05,
              "pi-class constant of 1/S^2 against 2 log x = " + fmt("%.5f", fit.c) + " (1 +- 0.05)");
}

void mu_alpha_beta_family(Outcome& out) {
  const STransformHandle h = closed_form_handle(ClosedFormTag::mu_alpha_beta(0.0, 1.0));
  const TailEstimate e = estimate_tail_from_s(h);
  out.require(std::abs(e.tail.index - 0.5) <= 0.01, "mu_{0,1} index " + fmt("%.5f", e.tail.index) + " (0.5 +- 0.01)");
  out.require(within_rel(e.tail.constant(), 2.0 / std::numbers::pi, 0.02),
              "constant " + fmt("%.5f", e.tail.constant()) + " (2/pi +- 2%)");
  const STransformHandle g = closed_form_handle(ClosedFormTag::mu_alpha_beta(1.0, 0.0));
  const TailEstimate left = estimate_left_tail_from_s(g);
  out.require(std::abs(left.tail.index - 0.5) <= 0.01,
              "mu_{1,0} tail at 0+ index " + fmt("%.5f", left.tail.index) + " (0.5 +- 0.01)");
}

void id_example(Outcome& out) {
  LevyPair pair;
  pair.sigma = MeasureSpec::sigma_min(1.0, 1.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i <= 60; ++i) {
    // w from -1 + 1e-6 to -1e-6, geometric in both ends.
    const double s = -6.0 + 12.0 * i / 60.0;
    const double e = std::pow(10.0, -std::abs(s));
    const double w = s < 0.0 ? -1.0 + e : -e;
    if (!(w > -1.0 && w < 0.0)) continue;
    const double ref = sigma_min_unit_s(1.0, 1.0, 0.0, w);
    worst = std::max(worst, std::abs(s_id_eval(pair, w) - ref) / ref);
  }
  out.require(worst <= 1e-8, "alpha=1: max rel |S_num - S_closed| = " + fmt("%.2e", worst) + " (<= 1e-8)");
  const TailEstimate e = estimate_tail_from_s(s_id_handle(pair));
  out.require(std::abs(e.tail.index - 0.5) <= 0.02, "index " + fmt("%.5f", e.tail.index) + " (0.5 +- 0.02)");
  out.require(within_rel(e.tail.constant(), std::numbers::pi / 2.0, 0.05),
              "constant " + fmt("%.5f", e.tail.constant()) + " (pi/2 +- 5%)");
  LevyPair heavy;
  heavy.sigma = MeasureSpec::sigma_min(1.0, 1.0, 2.0);
  const TailEstimate e2 = estimate_tail_from_s(s_id_handle(heavy));
  out.require(std::abs(e2.tail.index - 2.0) <= 0.02, "alpha=2 index " + fmt("%.5f", e2.tail.index) + " (2 +- 0.02)");
}

void breiman(Outcome& out) {
  const MeasureSpec nu = MeasureSpec::atoms({1.0, 2.0}, {0.5, 0.5});
  const SPart parts[] = {{s_handle(MeasureSpec::pareto(1.5)), 1.0}, {s_handle(nu), 1.0}};
  const TailEstimate e = estimate_tail_from_s(s_combine(parts));
  const double predicted = breiman_predict(1.5, 1.0, 1.5).constant();
  out.require(within_rel(e.tail.constant(), predicted, 0.10),
              "constant " + fmt("%.5f", e.tail.constant()) + " vs 1.5^1.5 = " + fmt("%.5f", predicted) + " (+- 10%)");
}

void monte_carlo(Outcome& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const McConfig cfg{2, 512, 200, 20240601};
  const std::vector<double> ev = product_spectrum(MeasureSpec::pareto(3.0), cfg);
  const RegVarFit hill = hill_fit(ev, ev.size() / 100);
  const MeanEstimate mean = block_mean(ev, cfg.n);
  const double secs = seconds_since(t0);
  out.require(std::abs(-hill.index - 3.0) <= 0.3, "hill index " + fmt("%.4f", -hill.index) + " (3 +- 0.3)");
  const double zscore = (mean.mean - 2.25) / mean.standard_error;
  out.require(std::abs(zscore) <= 3.0, "mean eigenvalue " + fmt("%.5f", mean.mean) + " (2.25, " +
                                           fmt("%.2f", zscore) + " SE)");
  out.require(secs < 120.0, "runtime " + fmt("%.1f", secs) + " s (< 120 s)");
}

void regvar_toolkit(Outcome& out) {
  const double x = 1e8;
  const std::pair<const char*, LogPowerSV> funcs[] = {{"log", LogPowerSV{1.0, {1.0}}},
                                                      {"log*loglog", LogPowerSV{1.0, {1.0, 1.0}}}};
  for (const auto& [name, L] : funcs) {
    const double lx = sv_eval(L, x);
    const double exact = lx * de_bruijn_exact(L, x * lx);
    const double reciprocal = lx * sv_eval(de_bruijn_conjugate(L), x * lx);
    out.require(std::abs(exact - 1.0) <= 0.01, std::string("de Bruijn ") + name + ": " + fmt("%.6f", exact) +
                                                   " (1 +- 1%; 1/L representative gives " +
                                                   fmt("%.4f", reciprocal) + ")");
  }
  const std::vector<double> grid = geometric_grid(2.0, 12.0, 11);
  const RegVarFit pure = fit_reg_var([](double y) { return 3.0 * std::pow(y, -2.0); }, grid);
  out.require(std::abs(pure.index + 2.0) <= 1e-9 && within_rel(pure.constant, 3.0, 1e-9),
              "pure power: index " + fmt("%.12f", pure.index) + ", constant " + fmt("%.12f", pure.constant));
  const LogPowerSV sv{1.0, {1.0, 0.5}};
  const RegVarFit logged =
      fit_reg_var([&](double y) { return 2.5 * std::pow(y, -1.5) * sv_eval(sv, y); }, grid, sv);
  out.require(std::abs(logged.index + 1.5) <= 0.01 && within_rel(logged.constant, 2.5, 0.02),
              "log factors: index " + fmt("%.6f", logged.index) + ", constant " + fmt("%.6f", logged.constant) +
                  " (-1.5 +- 0.01, 2.5 +- 2%)");
}

void symmetric_relation(Outcome& out) {
  const MeasureSpec mu = MeasureSpec::symmetric(MeasureSpec::point_mass(1.0));
  const MeasureSpec sq = symmetric_square(mu);
  double worst_rel = 0.0, worst_mod = 0.0;
  for (double w : {-0.95, -0.9, -0.7, -0.5, -0.3, -0.1, -1e-2, -1e-4, -1e-8}) {
    const double lhs = symmetric_bernoulli_s_modulus_sq(w);
    const double rhs = std::abs((1.0 + w) / w) * s_eval(sq, w);
    worst_rel = std::max(worst_rel, std::abs(lhs - rhs) / rhs);
    const double m = symmetric_s_modulus(mu, w).value;
    worst_mod = std::max(worst_mod, std::abs(m * m - lhs) / lhs);
  }
  out.require(worst_rel <= 1e-9, "max rel ||S|^2 - |(1+w)/w| S_sq| = " + fmt("%.2e", worst_rel) + " (<= 1e-9)");
  out.require(worst_mod <= 1e-9, "library modulus vs imaginary-axis solve " + fmt("%.2e", worst_mod));
}

struct Entry {
  const char* suite;
  const char* title;
  std::function<void(Outcome&)> run;
};

const std::map<int, Entry>& registry() {
  static const std::map<int, Entry> r{
      {1, {"roundtrip", "transform roundtrip", transform_roundtrip}},
      {2, {"closed-form", "closed-form oracle", closed_form_oracle}},
      {3, {"pareto-phase", "phase transition below one", [](Outcome& o) { pareto_phase(o, true); }}},
      {4, {"pareto-phase", "phase transition above one", [](Outcome& o) { pareto_phase(o, false); }}},
      {5, {"critical-line", "critical line", critical_line}},
      {6, {"mu-alpha-beta", "mu_{alpha,beta} family", mu_alpha_beta_family}},
      {7, {"id-example", "infinitely divisible example", id_example}},
      {8, {"breiman", "breiman product", breiman}},
      {9, {"monte-carlo", "monte carlo cross-check", monte_carlo}},
      {10, {"regvar-toolkit", "regular-variation toolkit", regvar_toolkit}},
      {11, {"symmetric", "symmetric relation", symmetric_relation}},
  };
  return r;
}

}  // namespace

std::vector<std::string> suite_names() {
  std::vector<std::string> out;
  for (const auto& [id, e] : registry()) {
    if (out.empty() || out.back() != e.suite) out.push_back(e.suite);
  }
  out.push_back("all");
  return out;
}

std::vector<int> suite_criteria(const std::string& suite) {
  std::vector<int> out;
  for (const auto& [id, e] : registry()) {
    if (suite == "all" || suite == e.suite || suite == std::to_string(id)) out.push_back(id);
  }
  return out;
}

CriterionResult run_criterion(int id) {
  const auto it = registry().find(id);
  if (it == registry().end()) throw Error(ErrorCode::InvalidArgument, "no criterion " + std::to_string(id));
  CriterionResult res{id, it->second.suite, it->second.title, false, "", 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    it->second.run(out);
    res.passed = out.passed;
    res.detail = out.detail.str();
  } catch (const std::exception& e) {
    res.passed = false;
    res.detail = out.detail.str() + (out.detail.str().empty() ? "" : "; ") + "error: " + e.what();
  }
  res.seconds = seconds_since(t0);
  return res;
}

std::string format_line(const CriterionResult& r) {
  char head[96];
  std::snprintf(head, sizeof head, "%s  %2d  %-15s %-30s", r.passed ? "PASS" : "FAIL", r.id, r.suite.c_str(),
                r.title.c_str());
  return std::string(head) + " " + r.detail + fmt(" (%.2f s)", r.seconds);
}

}  // namespace freemult::verify
