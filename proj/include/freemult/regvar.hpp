#pragma once

// Slowly varying functions of log-power form, regular-variation fitting,
// Pi-class diagnostics, and the tail dictionary between S-transforms near
// 0^- and tails at infinity (predictions for convolution powers, and
// estimation from an S-handle).

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "freemult/transforms.hpp"

namespace freemult {

/// c * prod_k (log^{(k)} x)^{exps[k-1]}, with log^{(k)} the k-fold iterated log.
struct LogPowerSV {
  double c = 1.0;
  std::vector<double> exps;

  /// x0 = exp(exp(...exp(1))) with exps.size() - 1 exponentials, i.e. the
  /// point above which every iterated log in use exceeds 1. 0 for constants.
  double threshold() const;
  bool is_constant() const;
};

double sv_eval(const LogPowerSV& L, double x);
/// log of sv_eval, for use when the value itself over/underflows.
double sv_log(const LogPowerSV& L, double x);
LogPowerSV sv_mul(const LogPowerSV& a, const LogPowerSV& b);
LogPowerSV sv_pow(const LogPowerSV& L, double r);

/// Symbolic conjugate 1/L, which is asymptotically equivalent to every de
/// Bruijn conjugate of a log-power function.
LogPowerSV de_bruijn_conjugate(const LogPowerSV& L);

/// The exact-inverse representative L#(y) = x(y) / y where x(y) L(x(y)) = y,
/// so that L(x) L#(x L(x)) = 1 identically.
double de_bruijn_exact(const LogPowerSV& L, double y);

struct RegVarFit {
  double index = 0.0;
  double constant = 0.0;
  std::vector<double> residuals;
  std::vector<double> grid;
  std::vector<double> local_slopes;
  double slope_drift = 0.0;
  bool degraded = false;
};

inline constexpr double kSlopeDriftThreshold = 0.1;

/// Least squares of log(f / sv) against log x on a geometric grid.
RegVarFit fit_reg_var(const std::function<double(double)>& f, std::span<const double> grid,
                      const std::optional<LogPowerSV>& sv = std::nullopt);

struct PiClassFit {
  double c = 0.0;
  std::vector<double> per_x;  // c fitted at each grid point
  std::vector<double> residuals;
  double drift = 0.0;         // relative spread of per_x
  bool in_class = false;      // false flags NotInPiClass
};

/// Fits (g(lambda x) - g(x)) / Lref(x) = c log(lambda) + e log(lambda)^2 at
/// each x; the quadratic term absorbs the second-order part of g.
PiClassFit pi_class_test(const std::function<double(double)>& g,
                         const std::function<double(double)>& lref, std::span<const double> grid,
                         std::span<const double> lambdas = std::array<double, 3>{2.0, 4.0, 8.0});

enum class Regime { Slow, Alpha01, Alpha1Critical, FiniteMean, PiClass };

std::string to_string(Regime r);
Regime regime_from_string(const std::string& s);

/// Tail ~ sv(x) x^{-index}. The constant is sv.c.
struct TailAsymptotic {
  double index = 0.0;
  LogPowerSV sv;
  Regime regime = Regime::FiniteMean;
  bool constant_known = true;
  std::optional<LogPowerSV> pi_reference;

  double constant() const { return sv.c; }
  double eval(double x) const;
};

Regime regime_for_index(double alpha, bool finite_mean);

/// alpha_t = alpha / (alpha + t (1 - alpha)).
double power_index(double alpha, double t);

/// Tail of mu^{boxtimes t} from the tail of mu ~ L(x) x^{-alpha}.
/// alpha = 0 reads L as the whole tail (L(x) = c log(x)^{-beta} ...).
/// alpha = 1 without m1 needs constant L. alpha > 1 needs m1.
TailAsymptotic predict_power_tail(double alpha, const LogPowerSV& L, double t,
                                  std::optional<double> m1 = std::nullopt);

struct EstimateMode {
  enum class Kind { Auto, Slow, Alpha01, Alpha1, FiniteMean };
  Kind kind = Kind::Auto;
  int order = 0;  // derivative order for FiniteMean; 0 lets the estimator pick

  static EstimateMode parse(const std::string& s);
};

struct TailEstimate {
  TailAsymptotic tail;
  std::string branch;  // which dictionary entry produced the estimate
  int order = 0;       // derivative order used by finite-mean branches
  std::vector<double> grid;
  std::vector<double> local_slopes;
  std::vector<double> residuals;
};

/// x = 10^6, ..., 10^16.
std::vector<double> default_grid();
/// n geometric points from 10^a to 10^b.
std::vector<double> geometric_grid(double a, double b, int n);

TailEstimate estimate_tail_from_s(const STransformHandle& h,
                                  std::span<const double> grid = {},
                                  EstimateMode mode = {});

/// Tail at 0^+ through the law of 1/X: mu([0, 1/x)) ~ L(x) x^{-alpha}.
TailEstimate estimate_left_tail_from_s(const STransformHandle& h,
                                       std::span<const double> grid = {},
                                       EstimateMode mode = {});

}  // namespace freemult
