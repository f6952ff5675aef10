#pragma once

// Infinitely divisible laws for the free multiplicative convolution on
// [0, inf), parameterised by a drift gamma and a finite measure sigma on the
// compactified half-line [0, +inf]. S = exp(v) with
//   v(w) = gamma + sigma({0}) / z - sigma({inf}) z + int (1 + t z) / (z - t) sigma(dt),
// z = w / (1 + w).

#include <optional>

#include "freemult/measure.hpp"
#include "freemult/regvar.hpp"
#include "freemult/transforms.hpp"

namespace freemult {

struct LevyPair {
  double gamma = 0.0;
  /// Part of sigma on [0, inf). Empty means no mass there. Atoms of this
  /// measure at t = 0 act exactly like `atom_zero`.
  std::optional<MeasureSpec> sigma;
  double atom_zero = 0.0;
  double atom_inf = 0.0;

  /// sigma({0}) including any zero-location mass carried by `sigma`.
  double mass_at_zero() const;
  /// Throws InvalidArgument on negative atoms or an infinite sigma.
  void validate() const;
};

double v_eval(const LevyPair& pair, double w);

/// v and its first `order` derivatives in w (order <= 3).
SJet v_jet(const LevyPair& pair, double w, int order);

/// m1 = exp(-gamma + int t^{-1} sigma(dt)); infinite when sigma({0}) > 0.
ExtendedMoment id_m1(const LevyPair& pair);
/// m_{-1} = exp(gamma + int t sigma(dt)); infinite when sigma({inf}) > 0.
ExtendedMoment id_m_minus1(const LevyPair& pair);

/// Handle with S = exp(v) on (-1, 0); log_value returns v directly.
STransformHandle s_id_handle(const LevyPair& pair);
double s_id_eval(const LevyPair& pair, double w);

/// Left behaviour of sigma: sigma([0, x)) ~ x^alpha L(1/x) as x -> 0.
struct SigmaLeftTail {
  double alpha = 0.0;
  LogPowerSV L;
  /// lim L, required when alpha = 1. May be +inf.
  std::optional<double> limit;
};

/// Right tail of the law with Levy pair `pair`.
///   alpha < 1: slowly varying tail K L_r(log^r x) / log^r x, r = 1 / (1 - alpha),
///              K = (pi alpha / sin(pi alpha))^r (log-power L only).
///   alpha = 1: index 1 / (1 + limit).
///   alpha > 1: m1^alpha c x^{-alpha} for constant L = c.
TailAsymptotic id_tail_predict(const LevyPair& pair, const SigmaLeftTail& left);

/// Pair of the law of 1/X: (-gamma, sigma pushed forward by t -> 1/t), with
/// the masses at 0 and +inf exchanged.
LevyPair id_hat(const LevyPair& pair);

}  // namespace freemult
