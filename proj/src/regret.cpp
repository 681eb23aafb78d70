#include "celearn/regret.hpp"

#include <cmath>

namespace celearn {

double smooth_max(double x, double delta) {
  if (x >= delta) return x;
  if (x <= -delta) return 0.0;
  double t = x + delta;
  return t * t / (4.0 * delta);
}

std::vector<double> transition_matrix(const double* regret_block, int n,
                                      const SmoothMaxParams& p) {
  std::vector<double> T(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double t = smooth_max(regret_block[static_cast<std::size_t>(i) * n + j],
                            p.delta) /
                 p.mu;
      T[static_cast<std::size_t>(i) * n + j] = t;
      off += t;
    }
    double diag = 1.0 - off;
    if (diag <= 0.0)
      throw InertiaTooSmall(
          "transition_matrix: inertia mu too small, diagonal <= 0");
    T[static_cast<std::size_t>(i) * n + i] = diag;
  }
  return T;
}

std::vector<double> stationary_distribution(const std::vector<double>& T,
                                            int n, double eps) {
  if (static_cast<int>(T.size()) != n * n)
    throw DimensionMismatch("stationary_distribution: matrix size mismatch");
  if (n == 1) return {1.0};

  // Balance equations of the trembled chain: p^T T~ = p^T, i.e.
  // (T~^T - I) p = 0, with the last (redundant) row replaced by sum(p) = 1.
  double u = eps / n;
  std::vector<double> m(static_cast<std::size_t>(n) * (n + 1), 0.0);
  auto M = [&](int r, int c) -> double& {
    return m[static_cast<std::size_t>(r) * (n + 1) + c];
  };
  for (int r = 0; r < n - 1; ++r) {
    for (int c = 0; c < n; ++c) {
      double t = (1.0 - eps) * T[static_cast<std::size_t>(c) * n + r] + u;
      M(r, c) = t - (r == c ? 1.0 : 0.0);
    }
    M(r, n) = 0.0;
  }
  for (int c = 0; c < n; ++c) M(n - 1, c) = 1.0;
  M(n - 1, n) = 1.0;

  // Partially-pivoted Gaussian elimination.
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::abs(M(col, col));
    for (int r = col + 1; r < n; ++r) {
      double v = std::abs(M(r, col));
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best < 1e-14)
      throw SingularSystem("stationary_distribution: singular balance system");
    if (piv != col)
      for (int c = col; c <= n; ++c) std::swap(M(piv, c), M(col, c));
    for (int r = col + 1; r < n; ++r) {
      double f = M(r, col) / M(col, col);
      if (f == 0.0) continue;
      for (int c = col; c <= n; ++c) M(r, c) -= f * M(col, c);
    }
  }
  std::vector<double> p(n);
  for (int r = n - 1; r >= 0; --r) {
    double v = M(r, n);
    for (int c = r + 1; c < n; ++c) v -= M(r, c) * p[c];
    p[r] = v / M(r, r);
  }
  return p;
}

int select_action(const std::vector<double>& p, double eps, Rng& rng) {
  int n = static_cast<int>(p.size());
  double u = rng.uniform();
  double acc = 0.0;
  double floor = eps / n;
  for (int a = 0; a < n; ++a) {
    acc += (1.0 - eps) * p[a] + floor;
    if (u < acc) return a;
  }
  return n - 1;
}

double lyapunov_value(const RegretTable& regrets, double delta) {
  return lyapunov_value(regrets.flat(), delta);
}

double lyapunov_value(const std::vector<double>& values, double delta) {
  double acc = 0.0;
  for (double v : values) {
    double y = smooth_max(v, delta);
    acc += y * y;
  }
  return 0.5 * acc;
}

}  // namespace celearn
