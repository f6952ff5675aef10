#include "doctest.h"

#include <cmath>
#include <numeric>

#include "freemult/errors.hpp"
#include "freemult/measure.hpp"
#include "freemult/transforms.hpp"

using namespace freemult;

namespace {

// Pareto(alpha) density on a geometric grid over [1, 100] with a matching power tail.
MeasureSpec pareto_grid(double alpha, int nodes) {
  std::vector<double> x(nodes), f(nodes);
  for (int i = 0; i < nodes; ++i) {
    x[i] = std::pow(100.0, static_cast<double>(i) / (nodes - 1));
    f[i] = alpha * std::pow(x[i], -alpha - 1.0);
  }
  return MeasureSpec::density_grid(x, f, TailKind::Power, alpha);
}

}  // namespace

TEST_CASE("tails of explicit families") {
  CHECK(tail(MeasureSpec::pareto(2.0), 2.0) == doctest::Approx(0.25));
  CHECK(tail(MeasureSpec::pareto(2.0), 0.5) == 1.0);
  const auto pm = MeasureSpec::point_mass(3.0);
  CHECK(tail(pm, 2.999) == 1.0);
  CHECK(tail(pm, 3.0) == 0.0);
  const auto at = MeasureSpec::atoms({1.0, 2.0, 4.0}, {0.5, 0.25, 0.25});
  CHECK(tail(at, 1.5) == doctest::Approx(0.5));
  CHECK(tail(MeasureSpec::free_poisson(), 4.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(tail(MeasureSpec::free_poisson(), 0.0) == doctest::Approx(1.0));
}

TEST_CASE("density grid reproduces a Pareto tail") {
  const auto g = pareto_grid(1.5, 4000);
  CHECK(total_mass(g) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(tail(g, 10.0) - std::pow(10.0, -1.5)) < 1e-6);
  CHECK(std::abs(tail(g, 1000.0) - std::pow(1000.0, -1.5)) < 1e-6);
}

TEST_CASE("moments") {
  const auto p = MeasureSpec::pareto(2.0);
  CHECK(moment(p, 1.0).value == doctest::Approx(2.0).epsilon(1e-10));
  CHECK_FALSE(moment(p, 2.0).finite());
  CHECK(moment(p, -1.0).value == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
  const auto pm = MeasureSpec::point_mass(3.0);
  for (double q : {-2.0, -0.5, 1.0, 2.5}) CHECK(moment(pm, q).value == doctest::Approx(std::pow(3.0, q)));
  CHECK(moment(MeasureSpec::free_poisson(), 2.0).value == doctest::Approx(2.0).epsilon(1e-8));
  CHECK_THROWS_AS(moment(p, std::nan("")), Error);
}

TEST_CASE("pushforward by inversion") {
  const auto inv = pushforward_inverse(MeasureSpec::atoms({2.0}, {1.0}));
  CHECK(tail(inv, 0.49) == doctest::Approx(1.0));
  CHECK(tail(inv, 0.5) == doctest::Approx(0.0));

  const auto ph = pushforward_inverse(MeasureSpec::pareto(2.0));
  for (double x : {1.0, 2.0, 10.0}) CHECK(tail(ph, x) == 0.0);
  // P(1/X > x) = 1 - x^2 on (0, 1).
  CHECK(tail(ph, 0.3) == doctest::Approx(1.0 - 0.09).epsilon(1e-12));

  // S of the law of 1/X is 1 / S(-1 - w).
  const auto mu = MeasureSpec::pareto(3.0);
  const auto muh = pushforward_inverse(mu);
  for (double w : {-0.8, -0.5, -0.2}) {
    CHECK(std::abs(s_eval(muh, w) - 1.0 / s_eval(mu, -1.0 - w)) < 1e-8);
  }

  const auto with_zero = MeasureSpec::atoms({0.0, 1.0}, {0.5, 0.5});
  try {
    (void)pushforward_inverse(with_zero);
    FAIL("expected AtomAtZero");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AtomAtZero);
  }
}

TEST_CASE("symmetric laws and their squares") {
  const auto bern = MeasureSpec::symmetric(MeasureSpec::point_mass(1.0));
  const auto sq = symmetric_square(bern);
  CHECK(tail(sq, 0.999) == doctest::Approx(1.0));
  CHECK(tail(sq, 1.0) == doctest::Approx(0.0));

  const auto sp = MeasureSpec::symmetric(MeasureSpec::pareto(2.0));
  const auto sp2 = symmetric_square(sp);
  for (double x : {1.5, 3.0, 20.0}) {
    CHECK(tail(sp, x) == doctest::Approx(0.5 * tail(sp2, x * x)));
  }

  // |X| with density 2(1 - t) on [0, 1]: X^2 has density (1 - sqrt u) / sqrt u.
  const auto tri = MeasureSpec::symmetric(
      MeasureSpec::density_grid({0.0, 1.0}, {2.0, 0.0}, TailKind::Exponential, 1.0));
  CHECK(std::abs(density(symmetric_square(tri), 0.25) - 1.0) < 1e-6);
}

TEST_CASE("sampling") {
  const auto s = sample(MeasureSpec::point_mass(3.0), 100, 7);
  for (double x : s) CHECK(x == 3.0);

  const auto p = sample(MeasureSpec::pareto(2.0), 200000, 11);
  const double mean = std::accumulate(p.begin(), p.end(), 0.0) / p.size();
  CHECK(std::abs(mean - 2.0) < 0.1);
  CHECK(*std::min_element(p.begin(), p.end()) >= 1.0);

  CHECK(sample(MeasureSpec::free_poisson(), 50, 5) == sample(MeasureSpec::free_poisson(), 50, 5));
  CHECK(sample(MeasureSpec::free_poisson(), 50, 5) != sample(MeasureSpec::free_poisson(), 50, 6));
}

TEST_CASE("tail is nonincreasing with tail(0) = 1 - mu({0})") {
  const std::vector<MeasureSpec> laws{
      MeasureSpec::pareto(0.7), MeasureSpec::free_poisson(),
      MeasureSpec::atoms({0.0, 1.0, 5.0}, {0.2, 0.3, 0.5}), pareto_grid(2.5, 200),
      pushforward_inverse(MeasureSpec::pareto(1.2))};
  for (const auto& mu : laws) {
    CHECK(tail(mu, 0.0) == doctest::Approx(1.0 - atom_at_zero(mu)).epsilon(1e-12));
    double prev = tail(mu, 0.0);
    for (double x = 0.01; x < 1e4; x *= 1.37) {
      const double t = tail(mu, x);
      CHECK(t <= prev + 1e-14);
      CHECK(t >= 0.0);
      prev = t;
    }
  }
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(MeasureSpec::pareto(0.0), Error);
  CHECK_THROWS_AS(MeasureSpec::point_mass(-1.0), Error);
  CHECK_THROWS_AS(MeasureSpec::atoms({1.0}, {1.0, 2.0}), Error);
  CHECK_THROWS_AS(MeasureSpec::density_grid({1.0, 0.5}, {1.0, 1.0}, TailKind::Power, 1.0), Error);
  try {
    (void)tail(MeasureSpec::mu_alpha_beta(0.0, 1.0), 2.0);
    FAIL("expected NotAvailable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotAvailable);
  }
}

TEST_CASE("split_seed separates streams") {
  CHECK(split_seed(1, 0) != split_seed(1, 1));
  CHECK(split_seed(1, 0) != split_seed(2, 0));
  CHECK(split_seed(42, 3) == split_seed(42, 3));
}
