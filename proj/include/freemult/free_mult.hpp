#pragma once

// Free multiplicative convolution at the level of S-transforms:
// S_{mu boxtimes nu} = S_mu S_nu and S_{mu^{boxtimes t}} = S_mu^t.

#include <span>
#include <vector>

#include "freemult/regvar.hpp"
#include "freemult/transforms.hpp"

namespace freemult {

struct SPart {
  STransformHandle handle;
  double t = 1.0;
};

/// Handle with S = prod S_i^{t_i} on the intersection of the domains.
/// Products of products are flattened. Exponents must be >= 1.
STransformHandle s_combine(std::span<const SPart> parts);
STransformHandle s_power(const STransformHandle& h, double t);

/// psi of the law behind `h`: the w in (lower, 0) with w S(w) / (1 + w) = z.
double psi_of_combination(const STransformHandle& h, double z);

/// Tail of mu boxtimes nu from the tail c x^{-alpha} of mu and m1(nu).
TailAsymptotic breiman_predict(double alpha, double tail_constant, double m1_nu);

}  // namespace freemult
