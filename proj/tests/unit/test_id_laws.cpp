#include "doctest.h"

#include <cmath>
#include <numbers>

#include "freemult/errors.hpp"
#include "freemult/id_laws.hpp"
#include "freemult/verify.hpp"

using namespace freemult;

namespace {

LevyPair unit_pair(double c, double d, double alpha, double gamma = 0.0) {
  LevyPair p;
  p.gamma = gamma;
  p.sigma = MeasureSpec::sigma_min(c, d, alpha);
  return p;
}

}  // namespace

TEST_CASE("v for simple pairs") {
  LevyPair drift;
  drift.gamma = 0.7;
  for (double w : {-0.9, -0.5, -0.1}) CHECK(v_eval(drift, w) == doctest::Approx(0.7));

  // Unit atom at 1: at w = -1/2, z = -1 and (1 + tz)/(z - t) = 0.
  LevyPair atom;
  atom.sigma = MeasureSpec::atoms({1.0}, {1.0});
  CHECK(std::abs(v_eval(atom, -0.5)) < 1e-14);
}

TEST_CASE("v matches the closed form for a uniform sigma") {
  const auto pair = unit_pair(1.0, 1.0, 1.0, 0.3);
  for (double w : {-1.0 + 1e-6, -0.999, -0.9, -0.5, -0.1, -1e-3, -1e-6}) {
    const double ref = std::log(verify::sigma_min_unit_s(1.0, 1.0, 0.3, w));
    CHECK(v_eval(pair, w) == doctest::Approx(ref).epsilon(1e-9));
  }
}

TEST_CASE("v derivatives agree with finite differences") {
  const auto pair = unit_pair(0.5, 2.0, 1.5, -0.2);
  const double w = -0.4, h = 1e-4;
  const SJet j = v_jet(pair, w, 3);
  const SJet jp = v_jet(pair, w + h, 2), jm = v_jet(pair, w - h, 2);
  CHECK(j[1] == doctest::Approx((jp[0] - jm[0]) / (2 * h)).epsilon(1e-6));
  CHECK(j[2] == doctest::Approx((jp[1] - jm[1]) / (2 * h)).epsilon(1e-6));
  CHECK(j[3] == doctest::Approx((jp[2] - jm[2]) / (2 * h)).epsilon(1e-5));
}

TEST_CASE("S of an ID law is decreasing") {
  const auto h = s_id_handle(unit_pair(1.0, 1.0, 1.0));
  double prev = h(-0.999);
  for (double w = -0.95; w < 0.0; w += 0.05) {
    CHECK(h(w) <= prev);
    prev = h(w);
  }
  CHECK(s_id_eval(unit_pair(1.0, 1.0, 1.0), -0.5) == doctest::Approx(h(-0.5)));
}

TEST_CASE("moments of ID laws") {
  const auto pair = unit_pair(1.0, 1.0, 2.0, 0.5);
  // sigma = 2 t dt on (0, 1): int t^-1 sigma = 2, int t sigma = 2/3.
  CHECK(id_m1(pair).value == doctest::Approx(std::exp(-0.5 + 2.0)).epsilon(1e-10));
  CHECK(id_m_minus1(pair).value == doctest::Approx(std::exp(0.5 + 2.0 / 3.0)).epsilon(1e-10));
  LevyPair z = pair;
  z.atom_zero = 0.1;
  CHECK_FALSE(id_m1(z).finite());
  LevyPair i = pair;
  i.atom_inf = 0.1;
  CHECK_FALSE(id_m_minus1(i).finite());
}

TEST_CASE("tail predictions") {
  const auto crit = id_tail_predict(unit_pair(1.0, 1.0, 1.0), SigmaLeftTail{1.0, LogPowerSV{1.0, {}}, 1.0});
  CHECK(crit.index == doctest::Approx(0.5));
  CHECK(crit.constant_known);
  CHECK(crit.constant() == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-12));

  const auto pair2 = unit_pair(1.0, 1.0, 2.0);
  const auto fm = id_tail_predict(pair2, SigmaLeftTail{2.0, LogPowerSV{1.0, {}}, std::nullopt});
  CHECK(fm.index == doctest::Approx(2.0));
  CHECK(fm.constant() == doctest::Approx(std::exp(4.0)).epsilon(1e-9));
  const auto est = estimate_tail_from_s(s_id_handle(pair2));
  CHECK(std::abs(est.tail.index - 2.0) < 0.02);

  const auto slow = id_tail_predict(unit_pair(1.0, 1.0, 0.5), SigmaLeftTail{0.5, LogPowerSV{1.0, {}}, std::nullopt});
  CHECK(slow.index == doctest::Approx(0.0));
  const double x = 1e10;
  CHECK(slow.eval(x) == doctest::Approx(std::pow(std::numbers::pi / 2.0, 2.0) / std::pow(std::log(x), 2.0)).epsilon(1e-9));

  try {
    (void)id_tail_predict(unit_pair(1.0, 1.0, 1.0), SigmaLeftTail{1.0, LogPowerSV{1.0, {}}, std::nullopt});
    FAIL("expected MissingLimit");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingLimit);
  }
}

TEST_CASE("estimated index matches the alpha = 1 prediction") {
  for (double c : {0.5, 1.0, 2.0}) {
    const auto pair = unit_pair(c, 1.0, 1.0);
    const auto pred = id_tail_predict(pair, SigmaLeftTail{1.0, LogPowerSV{c, {}}, c});
    const auto est = estimate_tail_from_s(s_id_handle(pair));
    CHECK(std::abs(est.tail.index - pred.index) < 0.02);
  }
}

TEST_CASE("hat of a pair") {
  LevyPair p = unit_pair(1.0, 2.0, 1.0, 0.4);
  p.atom_zero = 0.3;
  const LevyPair ph = id_hat(p);
  CHECK(ph.gamma == doctest::Approx(-0.4));
  CHECK(ph.atom_inf == doctest::Approx(0.3));
  CHECK(ph.atom_zero == doctest::Approx(0.0));

  const LevyPair back = id_hat(ph);
  for (double w : {-0.8, -0.5, -0.2}) {
    CHECK(v_eval(back, w) == doctest::Approx(v_eval(p, w)).epsilon(1e-9));
    CHECK(std::abs(s_id_eval(ph, w) - 1.0 / s_id_eval(p, -1.0 - w)) < 1e-8 * s_id_eval(ph, w));
  }

  LevyPair zero_loc;
  zero_loc.sigma = MeasureSpec::atoms({0.0, 1.0}, {0.25, 0.75});
  const LevyPair zh = id_hat(zero_loc);
  CHECK(zh.atom_inf == doctest::Approx(0.25));
}

TEST_CASE("pair validation") {
  LevyPair bad;
  bad.atom_zero = -1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}
