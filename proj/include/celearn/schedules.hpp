#pragma once

#include <cmath>

#include "celearn/common.hpp"

namespace celearn {

// Three-timescale step sizes: fast (empirical policy and regret), mid
// (asynchronous Q updates), slow (multiplier ascent). Each is count^-exponent
// with count 0 mapped to 1 so the first update of a freshly-visited state or
// pair lands exactly on its target (the all-zero empirical row jumps onto the
// simplex vertex of the played action).
//
// Validity requires fast < mid < slow, all in (0.5, 1]: every schedule then
// diverges in sum, is square-summable, and the ratios mid/fast and slow/mid
// vanish, which is what the asynchronous convergence argument needs.
struct StepSchedules {
  double fast = 0.55;
  double mid = 0.725;
  double slow = 0.9;

  static double rate(long long count, double exponent) {
    if (count <= 0) return 1.0;
    return std::pow(static_cast<double>(count), -exponent);
  }

  double gamma(long long count) const { return rate(count, fast); }
  double alpha(long long count) const { return rate(count, mid); }
  double beta(long long count) const { return rate(count, slow); }

  void validate() const {
    if (!(fast > 0.5 && fast <= 1.0 && mid > 0.5 && mid <= 1.0 &&
          slow > 0.5 && slow <= 1.0))
      throw ConfigError("schedule exponents must lie in (0.5, 1]");
    if (!(fast < mid && mid < slow))
      throw ConfigError("schedule exponents must be ordered fast < mid < slow");
  }
};

}  // namespace celearn
