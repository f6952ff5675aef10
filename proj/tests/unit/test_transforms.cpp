#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "freemult/errors.hpp"
#include "freemult/transforms.hpp"
#include "freemult/verify.hpp"

using namespace freemult;

namespace {

// Richardson-extrapolated central difference.
template <class F>
double richardson(F f, double x, double h) {
  auto d = [&](double s) { return (f(x + s) - f(x - s)) / (2.0 * s); };
  return (4.0 * d(h / 2.0) - d(h)) / 3.0;
}

}  // namespace

TEST_CASE("psi at z = -1") {
  CHECK(psi_eval(MeasureSpec::point_mass(2.0), -1.0) == doctest::Approx(-2.0 / 3.0).epsilon(1e-13));
  // int_1^inf -t/(1+t) 2 t^-3 dt = -2 (1 - ln 2)
  CHECK(psi_eval(MeasureSpec::pareto(2.0), -1.0) ==
        doctest::Approx(-2.0 * (1.0 - std::numbers::ln2)).epsilon(1e-10));
  const double tiny = psi_eval(MeasureSpec::pareto(2.0), -1e-8);
  CHECK(tiny < 0.0);
  CHECK(tiny > -1e-6);
}

TEST_CASE("psi derivatives") {
  CHECK(psi_deriv(MeasureSpec::point_mass(2.0), -1.0, 1) == doctest::Approx(2.0 / 9.0).epsilon(1e-12));
  // int_1^inf t/(1+t)^2 2 t^-3 dt by partial fractions
  CHECK(psi_deriv(MeasureSpec::pareto(2.0), -1.0, 1) ==
        doctest::Approx(3.0 - 4.0 * std::numbers::ln2).epsilon(1e-9));
  const auto fp = MeasureSpec::free_poisson();
  for (double z : {-3.0, -1.0, -0.2}) {
    const double fd = richardson([&](double s) { return psi_eval(fp, s); }, z, 1e-3);
    CHECK(psi_deriv(fp, z, 1) == doctest::Approx(fd).epsilon(1e-7));
    CHECK(psi_deriv(fp, z, 1) > 0.0);
  }
  CHECK_THROWS_AS(psi_deriv(fp, -1.0, 5), Error);
}

TEST_CASE("chi inverts psi") {
  CHECK(chi_eval(MeasureSpec::point_mass(2.0), -0.5) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(chi_eval(MeasureSpec::free_poisson(), -0.5) == doctest::Approx(-2.0).epsilon(1e-10));
  const auto p = MeasureSpec::pareto(1.5);
  for (double w : {-0.9, -0.5, -0.01}) CHECK(psi_eval(p, chi_eval(p, w)) == doctest::Approx(w).epsilon(1e-10));
}

TEST_CASE("S values") {
  CHECK(s_eval(MeasureSpec::point_mass(2.0), -0.3) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s_eval(MeasureSpec::free_poisson(), -0.5) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(s_eval(MeasureSpec::pareto(2.0), -1e-6) == doctest::Approx(0.5).epsilon(1e-3));
  for (double w : {-0.9, -0.4, -0.05}) {
    CHECK(s_eval(MeasureSpec::free_poisson(), w) == doctest::Approx(verify::free_poisson_s_series(w)).epsilon(1e-9));
  }
}

TEST_CASE("S derivatives") {
  const auto pm = s_handle(MeasureSpec::point_mass(4.0));
  CHECK(pm.deriv(-0.5, 1) == doctest::Approx(0.0));
  const auto mab = s_handle(MeasureSpec::mu_alpha_beta(0.0, 1.0));
  CHECK(mab.deriv(-0.3, 1) == doctest::Approx(-1.0).epsilon(1e-12));

  const auto p1 = s_handle(MeasureSpec::pareto(3.0));
  const double fd = richardson([&](double w) { return p1(w); }, -0.5, 1e-3);
  CHECK(std::abs(p1.deriv(-0.5, 1) - fd) < 1e-5);

  // Infinite-mean Pareto: S'(w) blows up like |w|^{-1/2}.
  const auto p15 = s_handle(MeasureSpec::pareto(1.5));
  for (double x : {1e4, 1e6}) {
    const double w = -1.0 / x;
    const double fd15 = richardson([&](double s) { return p15(s); }, w, 1e-2 * std::abs(w));
    CHECK(p15.deriv(w, 1) == doctest::Approx(fd15).epsilon(1e-4));
    CHECK(p15.deriv(w, 1) / std::sqrt(x) == doctest::Approx(-0.15115).epsilon(0.02));
  }
  CHECK_THROWS_AS(p15.deriv(-0.5, 4), Error);
}

TEST_CASE("closed forms") {
  CHECK(closed_form_s(ClosedFormTag::point_mass(4.0), -0.7).value == doctest::Approx(0.25));
  CHECK(closed_form_s(ClosedFormTag::free_poisson(), -0.5).value == doctest::Approx(2.0));
  const auto mab = s_handle(MeasureSpec::mu_alpha_beta(0.0, 1.0));
  CHECK(mab(-0.25) == doctest::Approx(closed_form_s(ClosedFormTag::mu_alpha_beta(0.0, 1.0), -0.25).value));
  const SValue b = closed_form_s(ClosedFormTag::symmetric_bernoulli(), -0.4);
  CHECK(b.imaginary);
  CHECK(b.value * b.value == doctest::Approx(verify::symmetric_bernoulli_s_modulus_sq(-0.4)).epsilon(1e-12));
  try {
    (void)ClosedFormTag::from_name("no_such_law");
    FAIL("expected UnknownTag");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownTag);
  }
}

TEST_CASE("symmetric S modulus through the square") {
  const auto bern = MeasureSpec::symmetric(MeasureSpec::point_mass(1.0));
  for (double w : {-0.9, -0.5, -0.1}) {
    const SValue s = symmetric_s_modulus(bern, w);
    CHECK(s.imaginary);
    CHECK(s.value * s.value == doctest::Approx(verify::symmetric_bernoulli_s_modulus_sq(w)).epsilon(1e-10));
  }
}

TEST_CASE("S is decreasing with range inside (1/m1, m_{-1})") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> loc(0.1, 10.0), wt(0.1, 1.0), ww(-0.99, -0.01);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> l(4), p(4);
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
      l[i] = loc(rng);
      p[i] = wt(rng);
      sum += p[i];
    }
    for (double& x : p) x /= sum;
    const auto mu = MeasureSpec::atoms(l, p);
    const auto h = s_handle(mu);
    const double m1 = moment(mu, 1.0).value, mm1 = moment(mu, -1.0).value;
    double a = ww(rng), b = ww(rng);
    if (a > b) std::swap(a, b);
    CHECK(h(a) >= h(b));
    CHECK(h(a) > 1.0 / m1);
    CHECK(h(a) < mm1);
    CHECK(h.deriv(a, 1) <= 1e-12);
  }
}

TEST_CASE("domain checks") {
  const auto h = s_handle(MeasureSpec::pareto(2.0));
  CHECK_THROWS_AS(h(0.0), Error);
  CHECK_THROWS_AS(h(-1.0), Error);
  const auto withzero = s_handle(MeasureSpec::atoms({0.0, 1.0}, {0.5, 0.5}));
  CHECK(withzero.lower() == doctest::Approx(-0.5));
  CHECK_THROWS_AS(withzero(-0.6), Error);
}
