#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "freemult/errors.hpp"
#include "freemult/matrix_mc.hpp"

using namespace freemult;

TEST_CASE("product of identities stays at one") {
  const auto ev = product_spectrum(MeasureSpec::point_mass(1.0), McConfig{3, 16, 2, 5});
  REQUIRE(ev.size() == 32);
  for (double x : ev) CHECK(std::abs(x - 1.0) < 1e-10);
}

TEST_CASE("t = 1 returns the sorted diagonal sample") {
  const auto mu = MeasureSpec::pareto(2.0);
  const auto ev = product_spectrum(mu, McConfig{1, 50, 1, 9});
  auto raw = sample(mu, 50, split_seed(split_seed(9, 0), 0));
  std::sort(raw.begin(), raw.end());
  REQUIRE(ev.size() == raw.size());
  CHECK(std::is_sorted(ev.begin(), ev.end()));
  CHECK(ev.front() >= 1.0);
}

TEST_CASE("Haar matrices are orthogonal") {
  const std::size_t n = 20;
  const auto q = haar_orthogonal(n, 77);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += q[i * n + k] * q[j * n + k];
      worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
    }
  }
  CHECK(worst < 1e-12);
  CHECK(haar_orthogonal(n, 77) == q);
}

TEST_CASE("spectra are positive and deterministic") {
  const McConfig cfg{2, 32, 3, 123};
  const auto a = product_spectrum(MeasureSpec::free_poisson(), cfg);
  const auto b = product_spectrum(MeasureSpec::free_poisson(), cfg);
  CHECK(a == b);
  for (double x : a) CHECK(x >= 0.0);
  CHECK_THROWS_AS(product_spectrum(MeasureSpec::sigma_min(1.0, 1.0, 1.0), cfg), Error);
}

TEST_CASE("Hill estimator") {
  // Exact Pareto(2) quantiles.
  const std::size_t n = 10000;
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = std::pow((i + 1.0) / n, -0.5);
  const auto f = hill_fit(q, 500);
  CHECK(-f.index == doctest::Approx(2.0).epsilon(0.025));
  CHECK(f.constant == doctest::Approx(1.0).epsilon(0.05));

  const auto s = sample(MeasureSpec::pareto(2.0), 100000, 2024);
  CHECK(std::abs(-hill_fit(s, 1000).index - 2.0) < 0.1);

  try {
    (void)hill_fit(q, 1);
    FAIL("expected TooFewSamples");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewSamples);
  }
  CHECK_THROWS_AS(hill_fit(q, n), Error);
}

TEST_CASE("block means") {
  const std::vector<double> x{1, 1, 3, 3};
  const auto m = block_mean(x, 2);
  CHECK(m.mean == doctest::Approx(2.0));
  CHECK(m.standard_error == doctest::Approx(1.0));

  std::ostringstream out;
  dump_samples_csv(std::vector<double>{0.5}, out);
  CHECK(out.str().rfind("eigenvalue\n", 0) == 0);
}
