#include <doctest.h>

#include <cmath>
#include <vector>

#include "celearn/common.hpp"
#include "celearn/kernels.hpp"

using namespace celearn;

namespace {

// Relative tolerance for comparing SIMD variants against the scalar
// reference: reductions reorder additions, so results differ in the last
// couple of ulps but never more at these lengths.
bool close(double a, double b) {
  double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= 1e-12 * scale;
}

}  // namespace

TEST_CASE("dispatched kernels agree with the scalar reference") {
  Rng rng(99);
  for (std::size_t n : {std::size_t(1), std::size_t(3), std::size_t(4),
                        std::size_t(7), std::size_t(8), std::size_t(129)}) {
    std::vector<double> a(n), b(n);
    for (auto& v : a) v = rng.uniform() * 2.0 - 1.0;
    for (auto& v : b) v = rng.uniform() * 2.0 - 1.0;

    CHECK(close(kernels::dot(a.data(), b.data(), n),
                kernels::scalar::dot(a.data(), b.data(), n)));
    CHECK(close(kernels::sum(a.data(), n), kernels::scalar::sum(a.data(), n)));

    std::vector<double> y1 = b, y2 = b;
    kernels::axpy(0.37, a.data(), y1.data(), n);
    kernels::scalar::axpy(0.37, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(close(y1[i], y2[i]));

    std::vector<double> x1 = a, x2 = a;
    kernels::scale(x1.data(), -1.75, n);
    kernels::scalar::scale(x2.data(), -1.75, n);
    for (std::size_t i = 0; i < n; ++i) CHECK(close(x1[i], x2[i]));
  }
}

#if defined(CELEARN_HAVE_AVX2)
TEST_CASE("avx2 kernels agree with scalar when the cpu has them") {
  if (!kernels::avx2::supported()) return;
  Rng rng(7);
  const std::size_t n = 61;  // deliberately not a multiple of the lane width
  std::vector<double> a(n), b(n);
  for (auto& v : a) v = rng.normal();
  for (auto& v : b) v = rng.normal();
  CHECK(close(kernels::avx2::dot(a.data(), b.data(), n),
              kernels::scalar::dot(a.data(), b.data(), n)));
  CHECK(close(kernels::avx2::sum(a.data(), n),
              kernels::scalar::sum(a.data(), n)));
  std::vector<double> y1 = b, y2 = b;
  kernels::avx2::axpy(-2.5, a.data(), y1.data(), n);
  kernels::scalar::axpy(-2.5, a.data(), y2.data(), n);
  for (std::size_t i = 0; i < n; ++i) CHECK(close(y1[i], y2[i]));
  std::vector<double> x1 = a, x2 = a;
  kernels::avx2::scale(x1.data(), 3.25, n);
  kernels::scalar::scale(x2.data(), 3.25, n);
  for (std::size_t i = 0; i < n; ++i) CHECK(x1[i] == x2[i]);  // pure multiply
}
#endif

TEST_CASE("rng transforms are deterministic and in range") {
  Rng a(123), b(123);
  for (int i = 0; i < 1000; ++i) {
    double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  Rng c(5), d(5);
  for (int i = 0; i < 1000; ++i) {
    int v = c.below(7);
    CHECK(v == d.below(7));
    CHECK(v >= 0);
    CHECK(v < 7);
  }
  Rng e(9);
  double m = 0.0;
  const int trials = 20000;
  for (int i = 0; i < trials; ++i) m += e.poisson(5.5);
  CHECK(std::abs(m / trials - 5.5) < 0.1);
}
