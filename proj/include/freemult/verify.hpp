#pragma once

// Verification scenarios and the reference computations they compare
// against. The references avoid the library's quadrature and root-finding
// paths.

#include <string>
#include <vector>

namespace freemult::verify {

/// S of the Marchenko-Pastur law from its Catalan moment sequence: exact
/// Lagrange inversion of the moment series in big integers, then the S
/// series summed at w (|w| < 1) with `terms` coefficients.
double free_poisson_s_series(double w, int terms = 240);

/// Integer coefficients s_0..s_{n-1} of that S series.
std::vector<long long> free_poisson_s_coefficients(int n);

/// S(w) of the infinitely divisible law with drift gamma and Levy measure
/// c 1_{(0,d)}(t) dt, from the integral evaluated in closed form.
double sigma_min_unit_s(double c, double d, double gamma, double w);

/// |S(w)|^2 for the symmetric Bernoulli law: psi(iy) = -y^2 / (1 + y^2) is
/// solved for y by bisection and S = (1 + w)/w * iy.
double symmetric_bernoulli_s_modulus_sq(double w);

struct CriterionResult {
  int id = 0;
  std::string suite;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Suite names, one per criterion or group, plus "all".
std::vector<std::string> suite_names();

/// Criterion ids belonging to a suite; empty for unknown names.
std::vector<int> suite_criteria(const std::string& suite);

CriterionResult run_criterion(int id);

/// "PASS  3  pareto-phase  ..." style line.
std::string format_line(const CriterionResult& r);

}  // namespace freemult::verify
