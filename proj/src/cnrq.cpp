#include "celearn/cnrq.hpp"

#include <cmath>
#include <cstdio>

#include "celearn/kernels.hpp"

namespace celearn {

void update_empirical(JointPolicy& pi, std::vector<long long>& state_visits,
                      int state, int joint, const StepSchedules& sched) {
  double gamma = sched.gamma(state_visits[state]);
  double* row = pi.row(state);
  kernels::scale(row, 1.0 - gamma, pi.joint_count());
  row[joint] += gamma;
  ++state_visits[state];
}

double long_term_lagrangian(const JointPolicy& pi, const QTable& q,
                            int state) {
  return kernels::dot(pi.row(state), q.row(state), pi.joint_count());
}

void update_q(QTable& q, int state, int joint, double ell, double next_value,
              double alpha, double rho) {
  double target = (1.0 - rho) * ell + rho * next_value;
  q.at(state, joint) += alpha * (target - q.at(state, joint));
}

double update_lambda(double lambda, double cost, double bound, double beta,
                     double lambda_max) {
  double next = lambda + beta * (cost - bound);
  if (next < 0.0) return 0.0;
  if (next > lambda_max) return lambda_max;
  return next;
}

void update_regret(RegretTable& regrets, const JointActionSpace& space,
                   int agent, const QTable& q, int state, int joint,
                   double gamma) {
  int n = space.count(agent);
  int played = space.component(joint, agent);
  double* block = regrets.row_block(state);
  double q_played = q.at(state, joint);
  for (int i = 0; i < n; ++i) {
    double* row = block + static_cast<std::size_t>(i) * n;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double inc = 0.0;
      if (i == played)
        inc = q.at(state, space.replace(joint, agent, j)) - q_played;
      row[j] += gamma * (inc - row[j]);
    }
  }
}

double default_inertia(const Game& game, int agent, double lambda_max,
                       double rho) {
  Interval u = game.utility_range();
  Interval c = game.cost_range();
  double bound = game.cost_bound(agent);
  double cost_dev = std::max(c.hi - bound, bound - c.lo);
  double ell_max = u.abs_max() + lambda_max * std::max(cost_dev, 0.0);
  int n = game.actions().count(agent);
  return 2.0 * n * ell_max / (1.0 - rho);
}

CnrqRun::CnrqRun(const Game& game, const CnrqParams& params, Rng& rng)
    : game_(game), params_(params) {
  params_.schedules.validate();
  const JointActionSpace& space = game_.actions();
  state_ = game_.initial_state();
  empirical_ = JointPolicy(game_.num_states(), space.joint_count());
  state_visits_.assign(game_.num_states(), 0);
  pair_visits_.assign(
      static_cast<std::size_t>(game_.num_states()) * space.joint_count(), 0);
  agents_.resize(space.num_agents());
  for (int k = 0; k < space.num_agents(); ++k) {
    AgentState& ag = agents_[k];
    ag.q = QTable(game_.num_states(), space.joint_count());
    ag.regret = RegretTable(game_.num_states(), space.count(k));
    ag.smooth.delta = params_.smooth_delta;
    ag.smooth.mu = params_.mu > 0.0
                       ? params_.mu
                       : default_inertia(game_, k, params_.lambda_max,
                                         params_.rho);
    ag.lambda = 0.0;
    ag.last_action = rng.below(space.count(k));
  }
}

StepRecord CnrqRun::step(Rng& rng) {
  const JointActionSpace& space = game_.actions();
  int K = space.num_agents();
  long long n = ++iter_;
  int s = state_;

  std::vector<int> played(K);
  for (int k = 0; k < K; ++k) played[k] = agents_[k].last_action;
  int joint = space.flatten(played);

  // Fast timescale: empirical policy at the visited state. The same step size
  // drives the regret move below, so capture it before the visit counter
  // advances.
  double gamma = params_.schedules.gamma(state_visits_[s]);
  update_empirical(empirical_, state_visits_, s, joint, params_.schedules);

  StepRecord rec;
  rec.n = n;
  rec.state = s;
  rec.joint = joint;
  rec.utility.resize(K);
  rec.cost.resize(K);
  rec.lambda.resize(K);

  std::vector<double> ell(K);
  for (int k = 0; k < K; ++k) {
    rec.utility[k] = game_.utility(k, s, joint);
    rec.cost[k] = game_.cost(k, s, joint);
    ell[k] = rec.utility[k] -
             agents_[k].lambda * (rec.cost[k] - game_.cost_bound(k));
  }

  int next = game_.sample_transition(s, joint, rng);
  rec.next_state = next;

  // Mid timescale: asynchronous Q update at the visited pair, one shared
  // visit counter per (state, joint).
  std::size_t pair = static_cast<std::size_t>(s) * space.joint_count() + joint;
  double alpha = params_.schedules.alpha(pair_visits_[pair]);
  ++pair_visits_[pair];
  for (int k = 0; k < K; ++k) {
    double l_next = long_term_lagrangian(empirical_, agents_[k].q, next);
    update_q(agents_[k].q, s, joint, ell[k], l_next, alpha, params_.rho);
  }

  // Slow timescale: projected multiplier ascent on the cost overshoot.
  double beta = params_.schedules.beta(n);
  for (int k = 0; k < K; ++k) {
    agents_[k].lambda =
        update_lambda(agents_[k].lambda, rec.cost[k], game_.cost_bound(k),
                      beta, params_.lambda_max);
    rec.lambda[k] = agents_[k].lambda;
  }

  // Fast timescale again: regret move at the visited state with the updated Q.
  for (int k = 0; k < K; ++k)
    update_regret(agents_[k].regret, space, k, agents_[k].q, s, joint, gamma);

  // Next actions from the invariant distribution of the trembled switching
  // chain at the next state.
  for (int k = 0; k < K; ++k) {
    AgentState& ag = agents_[k];
    int nk = space.count(k);
    std::vector<double> T;
    for (;;) {
      try {
        T = transition_matrix(ag.regret.row_block(next), nk, ag.smooth);
        break;
      } catch (const InertiaTooSmall&) {
        ag.smooth.mu *= 2.0;
        ++mu_doublings_;
        std::fprintf(stderr,
                     "warning: inertia too small for agent %d, doubled to "
                     "%g\n",
                     k, ag.smooth.mu);
      }
    }
    std::vector<double> p = stationary_distribution(T, nk, params_.epsilon);
    ag.last_action = select_action(p, params_.epsilon, rng);
  }

  state_ = next;
  return rec;
}

double CnrqRun::lyapunov() const {
  double acc = 0.0;
  for (const AgentState& ag : agents_)
    acc += lyapunov_value(ag.regret, ag.smooth.delta);
  return acc;
}

CEResiduals CnrqRun::residuals() const {
  std::vector<QTable> q;
  q.reserve(agents_.size());
  for (const AgentState& ag : agents_) q.push_back(ag.q);
  return ce_residuals(empirical_, game_.actions(), game_.num_states(), q);
}

}  // namespace celearn
