#include "doctest.h"

#include "freemult/errors.hpp"
#include "freemult/json_io.hpp"

using namespace freemult;

TEST_CASE("measures round-trip") {
  const auto mu = MeasureSpec::symmetric(MeasureSpec::pushforward(MeasureSpec::pareto(1.5), -1.0));
  const Json j = to_json(mu);
  CHECK(j["family"] == "symmetric");
  CHECK(to_json(measure_from_json(j)) == j);

  const Json atoms = parse_json_arg(R"({"family":"atoms","params":{"locations":[1,2],"weights":[0.5,0.5]}})");
  CHECK(tail(measure_from_json(atoms), 1.5) == doctest::Approx(0.5));
}

TEST_CASE("Levy pairs round-trip") {
  LevyPair p;
  p.gamma = 0.25;
  p.sigma = MeasureSpec::sigma_min(1.0, 2.0, 1.0);
  p.atom_inf = 0.5;
  const LevyPair q = levy_pair_from_json(to_json(p));
  CHECK(q.gamma == 0.25);
  CHECK(q.atom_inf == 0.5);
  CHECK(to_json(q) == to_json(p));
}

TEST_CASE("tail reports") {
  TailAsymptotic t;
  t.index = 1.5;
  t.sv = LogPowerSV{2.0, {1.0}};
  const Json j = to_json(t);
  CHECK(j["index"] == 1.5);
  CHECK(j["constant"] == 2.0);
  CHECK(j["sv"]["exps"][0] == 1.0);
  t.constant_known = false;
  CHECK(to_json(t)["constant"].is_null());
  CHECK(std::string(kSchema) == "freemult/1");
}

TEST_CASE("bad input") {
  auto code = [](const std::string& text) {
    try {
      (void)measure_from_json(parse_json_arg(text));
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::NotAvailable;
  };
  CHECK(code("{not json") == ErrorCode::InvalidArgument);
  CHECK(code(R"({"family":"nope"})") == ErrorCode::InvalidArgument);
  CHECK(code(R"({"family":"pareto","params":{}})") == ErrorCode::InvalidArgument);
  CHECK(code(R"({"family":"pareto","params":{"alpha":"x"}})") == ErrorCode::InvalidArgument);
}
