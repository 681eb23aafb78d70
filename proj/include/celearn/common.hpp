#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace celearn {

// Closed interval used to declare payoff/cost ranges of a game.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  double abs_max() const { return std::max(std::abs(lo), std::abs(hi)); }
};

// Error taxonomy. Each maps to one failure mode named in the module contracts.
struct ZeroMarginal : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InertiaTooSmall : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MalformedTables : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct Infeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct Unbounded : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct Reducible : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnknownQuantity : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MismatchedConfigs : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SingularSystem : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Deterministic random source. mt19937_64 output is pinned by the standard;
// all distribution transforms are implemented here (the std distributions are
// implementation-defined and would break replay across toolchains).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  // Uniform on [0, 1), 53 bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform integer in {0, ..., n-1} via 128-bit multiply (no modulo bias worth
  // caring about at 64 bits, and branch-free so replay never diverges).
  int below(int n) {
    return static_cast<int>((static_cast<__uint128_t>(gen_()) *
                             static_cast<__uint128_t>(n)) >> 64);
  }

  // Standard normal, Box-Muller with a cached spare.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  // Poisson by inversion of the exponential product (fine for mean < ~30).
  int poisson(double mean) {
    double limit = std::exp(-mean);
    double prod = uniform();
    int k = 0;
    while (prod > limit) {
      prod *= uniform();
      ++k;
    }
    return k;
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace celearn
