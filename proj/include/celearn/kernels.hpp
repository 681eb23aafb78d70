#pragma once

#include <cstddef>

// Dense vector kernels used by the hot loops (empirical-policy updates,
// expectation dots over joint-action rows, simplex pivot row operations).
//
// A scalar reference implementation always exists. On x86 an AVX2 variant is
// selected at startup when the CPU supports it; on ARM a NEON variant is
// compiled in directly. Selection can be forced with the environment variable
// CELEARN_KERNELS=scalar|avx2|neon (unknown or unavailable values fall back to
// scalar). Variants agree with the reference to ~1e-12 relative tolerance;
// SIMD reductions reorder floating-point additions, so bit-equality across
// variants is not guaranteed (a single run is still bit-reproducible because
// the selection is fixed for the process lifetime).

namespace celearn::kernels {

// sum_i a[i] * b[i]
double dot(const double* a, const double* b, std::size_t n);

// y[i] += a * x[i]
void axpy(double a, const double* x, double* y, std::size_t n);

// x[i] *= c
void scale(double* x, double c, std::size_t n);

// sum_i x[i]
double sum(const double* x, std::size_t n);

// Name of the variant handling calls in this process: "scalar", "avx2", "neon".
const char* active_backend();

// Reference implementations, exposed so equivalence tests can compare the
// dispatched variant against them regardless of what was selected.
namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void scale(double* x, double c, std::size_t n);
double sum(const double* x, std::size_t n);
}  // namespace scalar

#if defined(CELEARN_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void scale(double* x, double c, std::size_t n);
double sum(const double* x, std::size_t n);
bool supported();  // runtime CPU check
}  // namespace avx2
#endif

}  // namespace celearn::kernels
