#pragma once

#include <string>
#include <vector>

#include "celearn/common.hpp"

namespace celearn {

// Canonical flattening of joint actions: row-major over the agent-ordered
// action tuple (a_0, ..., a_{K-1}), last agent fastest. Every module that
// touches joint actions indexes through this class so the encoding can never
// drift between learner, baselines, environments and oracle.
class JointActionSpace {
 public:
  JointActionSpace() = default;
  explicit JointActionSpace(std::vector<int> counts);

  int num_agents() const { return static_cast<int>(counts_.size()); }
  int joint_count() const { return joint_count_; }
  int count(int agent) const { return counts_[agent]; }
  const std::vector<int>& counts() const { return counts_; }

  // Agent `agent`'s component of the flattened joint action.
  int component(int joint, int agent) const {
    return (joint / strides_[agent]) % counts_[agent];
  }

  // Same joint action with agent `agent`'s component replaced by `action`.
  int replace(int joint, int agent, int action) const {
    return joint + (action - component(joint, agent)) * strides_[agent];
  }

  int flatten(const std::vector<int>& actions) const;
  std::vector<int> unflatten(int joint) const;

  // Number of joint actions of everyone except `agent`.
  int opponents_count(int agent) const { return joint_count_ / counts_[agent]; }

  // Flattened index of the opponents' tuple (row-major over agents != agent,
  // keeping agent order), and its inverse combined with an own action.
  int opponents_index(int joint, int agent) const;
  int compose(int agent, int action, int opponents) const;

 private:
  std::vector<int> counts_;
  std::vector<int> strides_;
  int joint_count_ = 0;
};

// A discounted constrained stochastic game at the granularity the learners
// consume: finite states, per-agent finite action sets, per-agent utility and
// cost tables, per-agent time-average cost bounds, and a transition sampler.
// Implementations must make sample_transition a pure function of
// (state, joint, rng draws) so that runs replay bit-identically.
class Game {
 public:
  virtual ~Game() = default;

  virtual std::string name() const = 0;
  virtual int num_states() const = 0;
  virtual const JointActionSpace& actions() const = 0;
  int num_agents() const { return actions().num_agents(); }

  virtual double utility(int agent, int state, int joint) const = 0;
  virtual double cost(int agent, int state, int joint) const = 0;
  virtual double cost_bound(int agent) const = 0;

  // Compact ranges the payoffs/costs are guaranteed to stay inside; used to
  // size smooth-max inertia and Q clamps.
  virtual Interval utility_range() const = 0;
  virtual Interval cost_range() const = 0;

  virtual int initial_state() const { return 0; }
  virtual int sample_transition(int state, int joint, Rng& rng) const = 0;
};

// Per-state distribution over joint actions. Starts all-zero (no visits yet);
// after the first fast-timescale update of a state its row lies exactly on the
// simplex and stays there.
class JointPolicy {
 public:
  JointPolicy() = default;
  JointPolicy(int num_states, int joint_count)
      : states_(num_states),
        joints_(joint_count),
        p_(static_cast<std::size_t>(num_states) * joint_count, 0.0) {}

  int num_states() const { return states_; }
  int joint_count() const { return joints_; }

  double* row(int s) { return p_.data() + static_cast<std::size_t>(s) * joints_; }
  const double* row(int s) const {
    return p_.data() + static_cast<std::size_t>(s) * joints_;
  }
  double at(int s, int a) const { return row(s)[a]; }
  double& at(int s, int a) { return row(s)[a]; }

 private:
  int states_ = 0;
  int joints_ = 0;
  std::vector<double> p_;
};

// One agent's action-value table over (state, joint action).
class QTable {
 public:
  QTable() = default;
  QTable(int num_states, int joint_count)
      : states_(num_states),
        joints_(joint_count),
        q_(static_cast<std::size_t>(num_states) * joint_count, 0.0) {}

  int num_states() const { return states_; }
  int joint_count() const { return joints_; }

  double* row(int s) { return q_.data() + static_cast<std::size_t>(s) * joints_; }
  const double* row(int s) const {
    return q_.data() + static_cast<std::size_t>(s) * joints_;
  }
  double at(int s, int a) const { return row(s)[a]; }
  double& at(int s, int a) { return row(s)[a]; }

 private:
  int states_ = 0;
  int joints_ = 0;
  std::vector<double> q_;
};

// Conditional-deviation values residual(agent, state, recommended, deviation):
// the joint-mass-weighted gain agent would collect by swapping `recommended`
// for `deviation` whenever the policy recommends `recommended`. A policy is a
// correlated equilibrium for the given Q exactly when no entry is positive.
class CEResiduals {
 public:
  CEResiduals() = default;
  CEResiduals(const JointActionSpace& space, int num_states);

  int num_agents() const { return static_cast<int>(counts_.size()); }
  int num_states() const { return states_; }
  int count(int agent) const { return counts_[agent]; }

  double at(int agent, int state, int i, int j) const {
    return r_[index(agent, state, i, j)];
  }
  double& at(int agent, int state, int i, int j) {
    return r_[index(agent, state, i, j)];
  }

  const std::vector<double>& flat() const { return r_; }

  // Largest positive entry, 0 if none are positive (diagonals are always 0).
  double max_positive() const;

 private:
  std::size_t index(int agent, int state, int i, int j) const {
    int n = counts_[agent];
    return offsets_[agent] +
           (static_cast<std::size_t>(state) * n + i) * n + j;
  }

  std::vector<int> counts_;
  std::vector<std::size_t> offsets_;
  int states_ = 0;
  std::vector<double> r_;
};

// Distribution over opponents' joint actions conditional on the policy
// recommending `recommended` to `agent` in `state`. Throws ZeroMarginal when
// the recommendation has no mass.
std::vector<double> conditional_policy(const JointPolicy& pi,
                                       const JointActionSpace& space, int state,
                                       int agent, int recommended);

// residual(k, s, a, a') = sum over joints with component a of
// pi_s(joint) * (Q_k(s, joint with a->a') - Q_k(s, joint)); linear in Q,
// exactly 0 on diagonals and for zero-marginal recommendations. Throws
// DimensionMismatch when a Q table's shape disagrees with the space.
CEResiduals ce_residuals(const JointPolicy& pi, const JointActionSpace& space,
                         int num_states, const std::vector<QTable>& q);

// u_k(s,a) - lambda_k * (c_k(s,a) - cost_bound_k)
double instantaneous_lagrangian(const Game& game, int agent, double lambda,
                                int state, int joint);

double max_positive_regret(const CEResiduals& residuals);

}  // namespace celearn
