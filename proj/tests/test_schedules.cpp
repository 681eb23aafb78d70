#include <doctest.h>

#include <cmath>

#include "celearn/common.hpp"
#include "celearn/schedules.hpp"

using namespace celearn;

TEST_CASE("first visit always gets a full step") {
  StepSchedules s;
  CHECK(s.gamma(0) == 1.0);
  CHECK(s.alpha(0) == 1.0);
  CHECK(s.beta(0) == 1.0);
  CHECK(s.gamma(1) == 1.0);
  CHECK(s.rate(-3, 0.7) == 1.0);
}

TEST_CASE("rates follow count^-exponent") {
  StepSchedules s;
  CHECK(s.gamma(16) == doctest::Approx(std::pow(16.0, -0.55)).epsilon(1e-15));
  CHECK(s.alpha(16) == doctest::Approx(std::pow(16.0, -0.725)).epsilon(1e-15));
  CHECK(s.beta(16) == doctest::Approx(std::pow(16.0, -0.9)).epsilon(1e-15));
}

TEST_CASE("timescale separation holds out to large counts") {
  // The three rates must stay strictly ordered and their ratios must vanish:
  // beta/alpha and alpha/gamma both go to zero as the shared count grows.
  StepSchedules s;
  double prev_ba = 1.0, prev_ag = 1.0;
  for (long n : {10L, 100L, 10000L, 1000000L}) {
    double g = s.gamma(n), a = s.alpha(n), b = s.beta(n);
    CHECK(b < a);
    CHECK(a < g);
    double ba = b / a, ag = a / g;
    CHECK(ba < prev_ba);
    CHECK(ag < prev_ag);
    prev_ba = ba;
    prev_ag = ag;
  }
  // With the default exponents the gaps are 0.175 and 0.175 decades per
  // decade of n, so at n = 1e6 both ratios sit near 0.089.
  CHECK(prev_ba < 1e-1);
  CHECK(prev_ag < 1e-1);
}

TEST_CASE("validate rejects bad exponents") {
  StepSchedules s;
  s.fast = 0.5;  // boundary excluded: must exceed one half
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = StepSchedules{};
  s.slow = 1.0001;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = StepSchedules{};
  s.mid = s.fast;  // ordering must be strict
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = StepSchedules{};
  CHECK_NOTHROW(s.validate());
  s.slow = 1.0;  // upper boundary included
  CHECK_NOTHROW(s.validate());
}
