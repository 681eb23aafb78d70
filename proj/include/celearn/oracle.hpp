#pragma once

#include <vector>

#include "celearn/envs.hpp"
#include "celearn/game.hpp"

// Exact small-instance solvers used to validate the learners. Deliberately
// implemented on different numerical routes than the learning code (Eigen
// full-pivot/QR factorizations here, hand-rolled partially-pivoted elimination
// there) so agreement between the two is meaningful evidence.

namespace celearn {

// Fully enumerated discounted model with per-agent instantaneous payoffs
// (typically Lagrangians at a frozen multiplier).
struct ExplicitModel {
  JointActionSpace space;
  int num_states = 0;
  double rho = 0.0;
  std::vector<double> transition;            // S * A * S
  std::vector<std::vector<double>> payoff;   // per agent, S * A

  double P(int s, int a, int t) const {
    return transition[(static_cast<std::size_t>(s) * space.joint_count() + a) *
                          num_states + t];
  }
  double r(int agent, int s, int a) const {
    return payoff[agent][static_cast<std::size_t>(s) * space.joint_count() + a];
  }
};

// Model of a tabular game under frozen multipliers: payoffs become
// u_k - lambda_k (c_k - bound_k).
ExplicitModel explicit_model(const TabularGame& game,
                             const std::vector<double>& lambda, double rho);

struct PolicyValues {
  std::vector<double> L;  // normalized discounted value per state
  std::vector<double> Q;  // per (state, joint action)
};

// Solves (I - rho P_pi) L = (1 - rho) r_pi exactly, then
// Q(s,a) = (1-rho) r(s,a) + rho sum_t P(s,a,t) L(t). The policy must have
// normalized rows. Throws on residuals above 1e-10.
PolicyValues exact_policy_evaluation(const ExplicitModel& m,
                                     const JointPolicy& pi, int agent);

struct ViResult {
  std::vector<double> V;
  std::vector<int> greedy;
  int sweeps = 0;
};

// Value iteration treating the joint action set as a single controller's
// choices; meant for single-agent models. Iterates to a fixed-point residual
// below `tol`.
ViResult value_iteration(const ExplicitModel& m, int agent, double tol = 1e-12,
                         int max_sweeps = 1000000);

// All vertices of the correlated-equilibrium polytope of a one-state game
// described by per-agent payoff vectors over joint actions. Exhaustive
// basis enumeration (supports + tight deviation constraints); capped at 16
// joint actions. Vertices are deduplicated at sup-distance `tol`.
std::vector<std::vector<double>> ce_vertex_enumerate(
    const JointActionSpace& space,
    const std::vector<std::vector<double>>& payoff, double tol = 1e-9);

// Invariant distribution of the trembled chain (1-eps) T + eps/n ones, on an
// independent route from the learner's solver: full-pivot LU on
// (I - T~^T + ones ones^T) p = ones. Throws Reducible when the stationary
// distribution is not unique.
std::vector<double> exact_stationary(const std::vector<double>& T, int n,
                                     double eps);

}  // namespace celearn
