#pragma once

#include <functional>
#include <span>

namespace freemult::quad {

/// Relative tolerance requested from the adaptive scheme. Results whose
/// estimated error exceeds `kAcceptTolerance` (relative to the L1 norm of the
/// integrand) raise QuadratureFailure.
inline constexpr double kRelTolerance = 1e-12;
inline constexpr double kAcceptTolerance = 1e-10;

struct Result {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
};

/// Globally adaptive Gauss-Kronrod (QUADPACK QAG/QAGI) on [a, b]; either
/// endpoint may be infinite.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = kRelTolerance);

/// Integrates over consecutive pieces [cuts[0], cuts[1]], ..., accumulating
/// values and error estimates, then checks the combined error.
Result integrate_pieces(const std::function<double(double)>& f, std::span<const double> cuts,
                        double rel_tol = kRelTolerance);

/// Throws QuadratureFailure when the accumulated error is not acceptable.
void check(const Result& r, const char* what);

}  // namespace freemult::quad
