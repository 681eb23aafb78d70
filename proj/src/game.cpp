#include "celearn/game.hpp"

#include <numeric>

namespace celearn {

JointActionSpace::JointActionSpace(std::vector<int> counts)
    : counts_(std::move(counts)) {
  if (counts_.empty()) throw MalformedTables("joint action space: no agents");
  for (int c : counts_)
    if (c < 1) throw MalformedTables("joint action space: empty action set");
  strides_.assign(counts_.size(), 1);
  for (int k = static_cast<int>(counts_.size()) - 2; k >= 0; --k)
    strides_[k] = strides_[k + 1] * counts_[k + 1];
  joint_count_ = strides_[0] * counts_[0];
}

int JointActionSpace::flatten(const std::vector<int>& actions) const {
  if (static_cast<int>(actions.size()) != num_agents())
    throw DimensionMismatch("flatten: tuple arity != number of agents");
  int joint = 0;
  for (int k = 0; k < num_agents(); ++k) {
    if (actions[k] < 0 || actions[k] >= counts_[k])
      throw DimensionMismatch("flatten: action out of range");
    joint += actions[k] * strides_[k];
  }
  return joint;
}

std::vector<int> JointActionSpace::unflatten(int joint) const {
  std::vector<int> a(num_agents());
  for (int k = 0; k < num_agents(); ++k) a[k] = component(joint, k);
  return a;
}

int JointActionSpace::opponents_index(int joint, int agent) const {
  int idx = 0;
  for (int k = 0; k < num_agents(); ++k) {
    if (k == agent) continue;
    idx = idx * counts_[k] + component(joint, k);
  }
  return idx;
}

int JointActionSpace::compose(int agent, int action, int opponents) const {
  std::vector<int> a(num_agents());
  for (int k = num_agents() - 1; k >= 0; --k) {
    if (k == agent) continue;
    a[k] = opponents % counts_[k];
    opponents /= counts_[k];
  }
  a[agent] = action;
  return flatten(a);
}

CEResiduals::CEResiduals(const JointActionSpace& space, int num_states)
    : counts_(space.counts()), states_(num_states) {
  offsets_.resize(counts_.size());
  std::size_t total = 0;
  for (std::size_t k = 0; k < counts_.size(); ++k) {
    offsets_[k] = total;
    total += static_cast<std::size_t>(num_states) * counts_[k] * counts_[k];
  }
  r_.assign(total, 0.0);
}

double CEResiduals::max_positive() const {
  double m = 0.0;
  for (double v : r_)
    if (v > m) m = v;
  return m;
}

std::vector<double> conditional_policy(const JointPolicy& pi,
                                       const JointActionSpace& space, int state,
                                       int agent, int recommended) {
  const double* row = pi.row(state);
  double marginal = 0.0;
  std::vector<double> cond(space.opponents_count(agent), 0.0);
  for (int a = 0; a < space.joint_count(); ++a) {
    if (space.component(a, agent) != recommended) continue;
    marginal += row[a];
    cond[space.opponents_index(a, agent)] = row[a];
  }
  if (marginal <= 0.0)
    throw ZeroMarginal("conditional_policy: recommendation has zero marginal");
  for (double& v : cond) v /= marginal;
  return cond;
}

CEResiduals ce_residuals(const JointPolicy& pi, const JointActionSpace& space,
                         int num_states, const std::vector<QTable>& q) {
  if (static_cast<int>(q.size()) != space.num_agents())
    throw DimensionMismatch("ce_residuals: one Q table per agent required");
  for (const QTable& t : q)
    if (t.num_states() != num_states || t.joint_count() != space.joint_count())
      throw DimensionMismatch("ce_residuals: Q table shape mismatch");
  if (pi.num_states() != num_states || pi.joint_count() != space.joint_count())
    throw DimensionMismatch("ce_residuals: policy shape mismatch");

  CEResiduals out(space, num_states);
  for (int k = 0; k < space.num_agents(); ++k) {
    int nk = space.count(k);
    const QTable& qk = q[k];
    for (int s = 0; s < num_states; ++s) {
      const double* mass = pi.row(s);
      const double* qrow = qk.row(s);
      for (int a = 0; a < space.joint_count(); ++a) {
        double w = mass[a];
        if (w == 0.0) continue;
        int i = space.component(a, k);
        double qa = qrow[a];
        for (int j = 0; j < nk; ++j) {
          if (j == i) continue;
          out.at(k, s, i, j) += w * (qrow[space.replace(a, k, j)] - qa);
        }
      }
    }
  }
  return out;
}

double instantaneous_lagrangian(const Game& game, int agent, double lambda,
                                int state, int joint) {
  return game.utility(agent, state, joint) -
         lambda * (game.cost(agent, state, joint) - game.cost_bound(agent));
}

double max_positive_regret(const CEResiduals& residuals) {
  return residuals.max_positive();
}

}  // namespace celearn
