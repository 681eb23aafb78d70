#include "celearn/kernels.hpp"

#include <cstdlib>
#include <cstring>

#if defined(__ARM_NEON)
#include <arm_neon.h>
#endif

namespace celearn::kernels {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale(double* x, double c, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= c;
}

double sum(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

}  // namespace scalar

#if defined(__ARM_NEON)
namespace neon {

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    acc = vfmaq_f64(acc, vld1q_f64(a + i), vld1q_f64(b + i));
  double out = vaddvq_f64(acc);
  for (; i < n; ++i) out += a[i] * b[i];
  return out;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale(double* x, double c, std::size_t n) {
  float64x2_t vc = vdupq_n_f64(c);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_f64(vld1q_f64(x + i), vc));
  for (; i < n; ++i) x[i] *= c;
}

double sum(const double* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(x + i));
  double out = vaddvq_f64(acc);
  for (; i < n; ++i) out += x[i];
  return out;
}

}  // namespace neon
#endif  // __ARM_NEON

namespace {

struct Backend {
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scale)(double*, double, std::size_t);
  double (*sum)(const double*, std::size_t);
  const char* name;
};

Backend pick() {
  const char* force = std::getenv("CELEARN_KERNELS");
  bool forced_scalar = force != nullptr && std::strcmp(force, "scalar") == 0;
#if defined(CELEARN_HAVE_AVX2)
  bool want_avx2 = force == nullptr || std::strcmp(force, "avx2") == 0;
  if (!forced_scalar && want_avx2 && avx2::supported())
    return {avx2::dot, avx2::axpy, avx2::scale, avx2::sum, "avx2"};
#endif
#if defined(__ARM_NEON)
  bool want_neon = force == nullptr || std::strcmp(force, "neon") == 0;
  if (!forced_scalar && want_neon)
    return {neon::dot, neon::axpy, neon::scale, neon::sum, "neon"};
#endif
  return {scalar::dot, scalar::axpy, scalar::scale, scalar::sum, "scalar"};
}

const Backend& backend() {
  static const Backend b = pick();
  return b;
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  return backend().dot(a, b, n);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  backend().axpy(a, x, y, n);
}

void scale(double* x, double c, std::size_t n) { backend().scale(x, c, n); }

double sum(const double* x, std::size_t n) { return backend().sum(x, n); }

const char* active_backend() { return backend().name; }

}  // namespace celearn::kernels
