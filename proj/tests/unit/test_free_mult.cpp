#include "doctest.h"

#include <cmath>
#include <vector>

#include "freemult/errors.hpp"
#include "freemult/free_mult.hpp"

using namespace freemult;

TEST_CASE("products of point masses and powers") {
  const auto a = s_handle(MeasureSpec::point_mass(2.0));
  const auto b = s_handle(MeasureSpec::point_mass(3.0));
  const std::vector<SPart> parts{{a, 1.0}, {b, 1.0}};
  const auto ab = s_combine(parts);
  CHECK(ab(-0.4) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(ab.m1().value == doctest::Approx(6.0).epsilon(1e-12));

  const auto fp = s_handle(MeasureSpec::free_poisson());
  CHECK(s_power(fp, 1.0)(-0.3) == doctest::Approx(fp(-0.3)).epsilon(1e-14));
  CHECK(s_power(fp, 2.0)(-0.5) == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("algebraic laws") {
  const auto p = s_handle(MeasureSpec::pareto(1.5));
  const auto f = s_handle(MeasureSpec::free_poisson());
  const auto m = s_handle(MeasureSpec::atoms({0.5, 2.0}, {0.5, 0.5}));
  const auto pf = s_combine(std::vector<SPart>{{p, 1.0}, {f, 1.0}});
  const auto fpp = s_combine(std::vector<SPart>{{f, 1.0}, {p, 1.0}});
  const auto left = s_combine(std::vector<SPart>{{pf, 1.0}, {m, 1.0}});
  const auto right = s_combine(std::vector<SPart>{{p, 1.0}, {s_combine(std::vector<SPart>{{f, 1.0}, {m, 1.0}}), 1.0}});
  for (double w : {-0.9, -0.5, -0.1}) {
    CHECK(std::abs(pf(w) - fpp(w)) < 1e-12 * pf(w));
    CHECK(std::abs(left(w) - right(w)) < 1e-12 * left(w));
    CHECK(std::abs(s_power(s_power(p, 1.5), 2.0)(w) - s_power(p, 3.0)(w)) < 1e-12 * p(w));
    const auto sum = s_combine(std::vector<SPart>{{p, 1.25}, {p, 1.75}});
    CHECK(std::abs(sum(w) - s_power(p, 3.0)(w)) < 1e-12 * sum(w));
  }
  try {
    (void)s_power(p, 0.5);
    FAIL("expected ExponentBelowOne");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ExponentBelowOne);
  }
}

TEST_CASE("psi of a combination") {
  const auto pm = s_handle(MeasureSpec::point_mass(4.0));
  CHECK(psi_of_combination(pm, -1.0) == doctest::Approx(-0.8).epsilon(1e-12));
  const auto p2 = MeasureSpec::pareto(2.0);
  for (double z : {-5.0, -1.0, -0.01}) {
    CHECK(std::abs(psi_of_combination(s_handle(p2), z) - psi_eval(p2, z)) < 1e-9);
  }
  // Pareto(1/2) squared has tail index 1/3, so -psi(-1/x) ~ x^{-1/3}.
  const auto sq = s_power(s_handle(MeasureSpec::pareto(0.5)), 2.0);
  const double lo = std::log(-psi_of_combination(sq, -1e-8));
  const double hi = std::log(-psi_of_combination(sq, -1e-16));
  CHECK((hi - lo) / std::log(1e8) == doctest::Approx(-1.0 / 3.0).epsilon(0.03));
}

TEST_CASE("Breiman prediction") {
  const auto t = breiman_predict(1.5, 2.0, 3.0);
  CHECK(t.index == doctest::Approx(1.5));
  CHECK(t.constant() == doctest::Approx(2.0 * std::pow(3.0, 1.5)));
  const auto u = breiman_predict(0.5, 1.0, 4.0);
  CHECK(u.constant() == doctest::Approx(2.0));
}
