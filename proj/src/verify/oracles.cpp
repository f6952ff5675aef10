#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "freemult/verify.hpp"

namespace freemult::verify {

namespace {

using Big = boost::multiprecision::cpp_int;

std::vector<Big> truncated_product(const std::vector<Big>& a, const std::vector<Big>& b, std::size_t n) {
  std::vector<Big> out(n);
  for (std::size_t i = 0; i < n && i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; i + j < n && j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

}  // namespace

std::vector<long long> free_poisson_s_coefficients(int n) {
  if (n < 1) throw std::invalid_argument("free_poisson_s_coefficients: n >= 1");
  const std::size_t m = static_cast<std::size_t>(n) + 1;

  // Catalan numbers C_0..C_m; the moments of the law are C_1, C_2, ...
  std::vector<Big> cat(m + 1);
  cat[0] = 1;
  for (std::size_t k = 0; k < m; ++k) cat[k + 1] = cat[k] * 2 * (2 * k + 1) / (k + 2);

  // r(z) = psi(z) / z = sum_k C_{k+1} z^k, q = 1 / r (integral since r_0 = 1).
  std::vector<Big> r(m), q(m);
  for (std::size_t k = 0; k < m; ++k) r[k] = cat[k + 1];
  q[0] = 1;
  for (std::size_t k = 1; k < m; ++k) {
    Big acc = 0;
    for (std::size_t j = 1; j <= k; ++j) acc += r[j] * q[k - j];
    q[k] = -acc;
  }

  // Lagrange: [w^k] chi = (1/k) [z^{k-1}] q^k.
  std::vector<Big> chi(m + 1);
  std::vector<Big> power{1};
  for (std::size_t k = 1; k <= m; ++k) {
    power = truncated_product(power, q, m);
    chi[k] = power[k - 1] / k;
  }

  // S(w) = (1 + w) chi(w) / w = sum_k (chi_{k+1} + chi_k) w^k.
  std::vector<long long> s(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = static_cast<long long>(chi[k + 1] + chi[k]);
  return s;
}

double free_poisson_s_series(double w, int terms) {
  if (!(std::abs(w) < 1.0)) throw std::invalid_argument("free_poisson_s_series: |w| < 1");
  const std::vector<long long> s = free_poisson_s_coefficients(terms);
  double acc = 0.0;
  for (auto it = s.rbegin(); it != s.rend(); ++it) acc = acc * w + static_cast<double>(*it);
  return acc;
}

double sigma_min_unit_s(double c, double d, double gamma, double w) {
  // z = w / (1 + w); int_0^d (1 + t z)/(z - t) c dt = -c d z - c (1 + z^2) log(1 + d / (-z)).
  const double q = 1.0 + w;
  const double z = w / q;
  const double mz = -w / q;
  const double v = gamma - c * d * z - c * (1.0 + z * z) * std::log1p(d / mz);
  return std::exp(v);
}

double symmetric_bernoulli_s_modulus_sq(double w) {
  if (!(w > -1.0 && w < 0.0)) throw std::invalid_argument("symmetric_bernoulli_s_modulus_sq: w in (-1, 0)");
  // -y^2 / (1 + y^2) decreases from 0 to -1 on y > 0.
  auto f = [w](double y) { return -y * y / (1.0 + y * y) - w; };
  double lo = 0.0, hi = 1.0;
  while (f(hi) > 0.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-300; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  const double y = 0.5 * (lo + hi);
  const double s = (1.0 + w) / -w * y;
  return s * s;
}

}  // namespace freemult::verify
