#include "doctest.h"

#include <cmath>
#include <numbers>

#include "freemult/errors.hpp"
#include "freemult/free_mult.hpp"
#include "freemult/regvar.hpp"

using namespace freemult;

TEST_CASE("log-power slowly varying functions") {
  const LogPowerSV L{2.0, {1.0, -0.5}};
  const double x = 1e6;
  CHECK(sv_eval(L, x) == doctest::Approx(2.0 * std::log(x) / std::sqrt(std::log(std::log(x)))));
  CHECK(sv_log(L, x) == doctest::Approx(std::log(sv_eval(L, x))));
  CHECK(sv_eval(sv_pow(L, 3.0), x) == doctest::Approx(std::pow(sv_eval(L, x), 3.0)));
  const LogPowerSV M{0.5, {-2.0}};
  CHECK(sv_eval(sv_mul(L, M), x) == doctest::Approx(sv_eval(L, x) * sv_eval(M, x)));
  CHECK(LogPowerSV{3.0, {}}.is_constant());
  CHECK_FALSE(L.is_constant());
}

TEST_CASE("de Bruijn conjugates") {
  const LogPowerSV L{1.0, {2.0}};
  const auto conj = de_bruijn_conjugate(L);
  CHECK(conj.c == doctest::Approx(1.0));
  REQUIRE(conj.exps.size() == 1);
  CHECK(conj.exps[0] == doctest::Approx(-2.0));
  for (double x : {1e3, 1e8, 1e20}) {
    CHECK(sv_eval(L, x) * de_bruijn_exact(L, x * sv_eval(L, x)) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("fitting regular variation") {
  const auto grid = geometric_grid(2.0, 8.0, 13);
  const auto exact = fit_reg_var([](double x) { return 5.0 * std::pow(x, -2.0); }, grid);
  CHECK(exact.index == doctest::Approx(-2.0).epsilon(1e-10));
  CHECK(exact.constant == doctest::Approx(5.0).epsilon(1e-8));
  CHECK_FALSE(exact.degraded);

  const auto logged = fit_reg_var([](double x) { return 5.0 * std::pow(x, -2.0) * std::log(x); }, grid,
                                  LogPowerSV{1.0, {1.0}});
  CHECK(logged.index == doctest::Approx(-2.0).epsilon(1e-10));
  CHECK(logged.constant == doctest::Approx(5.0).epsilon(1e-8));

  const auto wobbly = fit_reg_var(
      [](double x) { return std::pow(x, -1.0 + 0.5 * std::sin(std::log(x))); }, grid);
  CHECK(wobbly.degraded);
  CHECK(wobbly.slope_drift > kSlopeDriftThreshold);
}

TEST_CASE("Pi-class diagnostics") {
  const auto grid = geometric_grid(6.0, 10.0, 5);
  auto one = [](double) { return 1.0; };
  const auto lg = pi_class_test([](double x) { return std::log(x); }, one, grid);
  CHECK(lg.in_class);
  CHECK(lg.c == doctest::Approx(1.0).epsilon(1e-8));

  const auto sq = pi_class_test([](double x) { return std::log(x) * std::log(x); },
                                [](double x) { return 2.0 * std::log(x); }, grid);
  CHECK(sq.in_class);
  CHECK(sq.c == doctest::Approx(1.0).epsilon(0.01));

  const auto pw = pi_class_test([](double x) { return std::pow(x, 0.1); }, one, grid);
  CHECK_FALSE(pw.in_class);
}

TEST_CASE("power-tail predictions") {
  const auto half = predict_power_tail(0.5, LogPowerSV{1.0, {}}, 2.0);
  CHECK(half.index == doctest::Approx(1.0 / 3.0));
  CHECK(half.constant() == doctest::Approx(1.51005).epsilon(1e-4));
  CHECK(half.regime == Regime::Alpha01);

  const auto ident = predict_power_tail(0.7, LogPowerSV{2.0, {}}, 1.0);
  CHECK(ident.index == doctest::Approx(0.7));
  CHECK(ident.constant() == doctest::Approx(2.0));

  const auto fm = predict_power_tail(2.0, LogPowerSV{1.0, {}}, 2.0, 2.0);
  CHECK(fm.index == doctest::Approx(2.0));
  CHECK(fm.eval(1e3) == doctest::Approx(8.0e-6));

  const auto crit = predict_power_tail(1.0, LogPowerSV{1.0, {}}, 2.0);
  CHECK(crit.index == doctest::Approx(1.0));
  CHECK(crit.eval(1e6) == doctest::Approx(2.0 * std::log(1e6) / 1e6).epsilon(1e-9));

  try {
    (void)predict_power_tail(2.0, LogPowerSV{1.0, {}}, 2.0);
    FAIL("expected RegimeMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RegimeMismatch);
  }
}

TEST_CASE("index map is a semigroup in t") {
  for (double a : {0.2, 0.5, 0.9}) {
    for (double s : {1.0, 1.5, 3.0}) {
      for (double t : {1.0, 2.0, 2.5}) {
        CHECK(power_index(power_index(a, s), t) == doctest::Approx(power_index(a, s * t)).epsilon(1e-12));
      }
    }
  }
  CHECK(power_index(1.0, 7.0) == 1.0);
}

TEST_CASE("tail estimation from S") {
  const auto mab = estimate_tail_from_s(s_handle(MeasureSpec::mu_alpha_beta(0.0, 1.0)));
  CHECK(mab.tail.index == doctest::Approx(0.5).epsilon(0.02));
  CHECK(mab.tail.constant() == doctest::Approx(2.0 / std::numbers::pi).epsilon(0.02));

  const auto p2 = estimate_tail_from_s(s_handle(MeasureSpec::pareto(2.0)));
  CHECK(p2.tail.index == doctest::Approx(2.0).epsilon(0.02));
  CHECK(p2.tail.constant() == doctest::Approx(1.0).epsilon(0.05));

  for (double beta : {0.5, 1.0, 2.0}) {
    const auto e = estimate_tail_from_s(s_handle(MeasureSpec::mu_alpha_beta(0.0, beta)));
    CHECK(std::abs(e.tail.index - 1.0 / (beta + 1.0)) < 0.02);
  }

  try {
    (void)estimate_tail_from_s(s_handle(MeasureSpec::point_mass(2.0)));
    FAIL("expected NotRegularlyVarying");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotRegularlyVarying);
  }
}

TEST_CASE("estimate agrees with prediction for a power") {
  const auto h = s_power(s_handle(MeasureSpec::pareto(0.5)), 2.0);
  const auto e = estimate_tail_from_s(h);
  CHECK(std::abs(e.tail.index - power_index(0.5, 2.0)) < 0.02);
}

TEST_CASE("regime names round-trip") {
  for (Regime r : {Regime::Slow, Regime::Alpha01, Regime::Alpha1Critical, Regime::FiniteMean, Regime::PiClass}) {
    CHECK(regime_from_string(to_string(r)) == r);
  }
  CHECK(regime_for_index(0.5, false) == Regime::Alpha01);
  CHECK(regime_for_index(2.0, true) == Regime::FiniteMean);
}
