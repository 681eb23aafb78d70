#pragma once

#include <vector>

#include "celearn/common.hpp"

namespace celearn {

// Parameters of the smoothed positive-part map and the inertia constant that
// turns regrets into switching probabilities.
struct SmoothMaxParams {
  double delta = 1e-3;  // half-width of the quadratic bridge around 0
  double mu = 1.0;      // inertia; must dominate each row's smoothed regrets
};

// C^1 smoothing of max(x, 0):
//   x            for x >= delta
//   (x+delta)^2 / (4 delta)   on (-delta, delta)
//   0            for x <= -delta
double smooth_max(double x, double delta);

// Per-state regret matrices of one agent: num_states blocks of n*n, row-major,
// entry (i, j) = smoothed observation average of the gain of playing j when i
// was played. Diagonals stay exactly 0.
class RegretTable {
 public:
  RegretTable() = default;
  RegretTable(int num_states, int num_actions)
      : states_(num_states),
        n_(num_actions),
        r_(static_cast<std::size_t>(num_states) * num_actions * num_actions,
           0.0) {}

  int num_states() const { return states_; }
  int num_actions() const { return n_; }

  double* row_block(int s) {
    return r_.data() + static_cast<std::size_t>(s) * n_ * n_;
  }
  const double* row_block(int s) const {
    return r_.data() + static_cast<std::size_t>(s) * n_ * n_;
  }
  double at(int s, int i, int j) const {
    return row_block(s)[static_cast<std::size_t>(i) * n_ + j];
  }
  double& at(int s, int i, int j) {
    return row_block(s)[static_cast<std::size_t>(i) * n_ + j];
  }
  const std::vector<double>& flat() const { return r_; }

 private:
  int states_ = 0;
  int n_ = 0;
  std::vector<double> r_;
};

// Row-stochastic switching matrix from one state's regret block:
// T(i, j) = Y(R(i, j)) / mu off the diagonal, diagonal takes the residual.
// Throws InertiaTooSmall when a diagonal entry would drop to 0 or below,
// which means mu does not dominate that row's smoothed regrets.
std::vector<double> transition_matrix(const double* regret_block, int n,
                                      const SmoothMaxParams& p);

// Invariant distribution of the trembled chain
// T~ = (1 - eps) T + (eps / n) * ones. Solved by replacing the redundant last
// balance equation with the normalization row and running partially-pivoted
// Gaussian elimination. The tremble makes the chain irreducible, so every
// entry of the result is >= eps / n (up to roundoff).
std::vector<double> stationary_distribution(const std::vector<double>& T,
                                            int n, double eps);

// Sample from (1 - eps) p + (eps / n) uniform.
int select_action(const std::vector<double>& p, double eps, Rng& rng);

// 1/2 * sum of Y(entry)^2 over every entry of every state's regret block.
double lyapunov_value(const RegretTable& regrets, double delta);

// Same functional over an arbitrary flat collection of regret-like values.
double lyapunov_value(const std::vector<double>& values, double delta);

}  // namespace celearn
