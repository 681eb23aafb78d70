#include "celearn/baselines.hpp"

#include <cmath>

#include "celearn/kernels.hpp"

namespace celearn {

LinearProgram build_ce_lp(const JointActionSpace& space,
                          const std::vector<const double*>& q_rows) {
  if (static_cast<int>(q_rows.size()) != space.num_agents())
    throw DimensionMismatch("build_ce_lp: one Q slice per agent");
  int A = space.joint_count();
  LinearProgram lp;
  lp.nvars = A;
  lp.objective.assign(A, 0.0);
  for (int k = 0; k < space.num_agents(); ++k)
    for (int a = 0; a < A; ++a) lp.objective[a] += q_rows[k][a];

  for (int k = 0; k < space.num_agents(); ++k) {
    int nk = space.count(k);
    for (int i = 0; i < nk; ++i)
      for (int j = 0; j < nk; ++j) {
        if (j == i) continue;
        std::vector<double> row(A, 0.0);
        for (int a = 0; a < A; ++a) {
          if (space.component(a, k) != i) continue;
          row[a] = q_rows[k][space.replace(a, k, j)] - q_rows[k][a];
        }
        lp.le_rows.push_back(std::move(row));
        lp.le_rhs.push_back(0.0);
      }
  }
  lp.eq_rows.push_back(std::vector<double>(A, 1.0));
  lp.eq_rhs.push_back(1.0);
  return lp;
}

CeSolution utilitarian_ce(const JointActionSpace& space,
                          const std::vector<const double*>& q_rows,
                          SimplexSolver& solver) {
  LinearProgram lp = build_ce_lp(space, q_rows);
  LpResult res = solver.solve(lp);
  CeSolution out;
  out.distribution = std::move(res.x);
  out.objective = res.objective;
  // The simplex can leave tiny negative dust on basic variables.
  double sum = 0.0;
  for (double& v : out.distribution) {
    if (v < 0.0) v = 0.0;
    sum += v;
  }
  for (double& v : out.distribution) v /= sum;
  return out;
}

CeSolution utilitarian_ce(const JointActionSpace& space,
                          const std::vector<QTable>& q, int state,
                          SimplexSolver& solver) {
  std::vector<const double*> rows;
  rows.reserve(q.size());
  for (const QTable& t : q) rows.push_back(t.row(state));
  return utilitarian_ce(space, rows, solver);
}

std::vector<double> marginal_distribution(const JointActionSpace& space,
                                          const std::vector<double>& joint,
                                          int agent) {
  std::vector<double> m(space.count(agent), 0.0);
  for (int a = 0; a < space.joint_count(); ++a)
    m[space.component(a, agent)] += joint[a];
  return m;
}

// ---------------------------------------------------------------------------
// CE-Q
// ---------------------------------------------------------------------------

CeqRun::CeqRun(const Game& game, const CeqParams& params, Rng& rng)
    : game_(game), params_(params) {
  params_.schedules.validate();
  const JointActionSpace& space = game_.actions();
  int K = space.num_agents();
  state_ = game_.initial_state();
  int owners = params_.semidistributed ? K : 1;
  models_.assign(owners,
                 std::vector<QTable>(K, QTable(game_.num_states(),
                                               space.joint_count())));
  lambda_.assign(K, 0.0);
  pair_visits_.assign(
      static_cast<std::size_t>(game_.num_states()) * space.joint_count(), 0);
  last_action_.resize(K);
  for (int k = 0; k < K; ++k) last_action_[k] = rng.below(space.count(k));
}

StepRecord CeqRun::step(Rng& rng) {
  const JointActionSpace& space = game_.actions();
  int K = space.num_agents();
  long long n = ++iter_;
  int s = state_;
  int joint = space.flatten(last_action_);

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
             lambda_[k] * (rec.cost[k] - game_.cost_bound(k));
  }

  int next = game_.sample_transition(s, joint, rng);
  rec.next_state = next;

  std::size_t pair = static_cast<std::size_t>(s) * space.joint_count() + joint;
  double alpha = params_.schedules.alpha(pair_visits_[pair]);
  ++pair_visits_[pair];

  int owners = static_cast<int>(models_.size());
  std::vector<CeSolution> solutions(owners);
  for (int o = 0; o < owners; ++o)
    solutions[o] = utilitarian_ce(space, models_[o], next, solver_);

  // Each owner's observation of each agent's realized Lagrangian; other
  // agents' rewards are what the observation-noise knob perturbs.
  for (int o = 0; o < owners; ++o) {
    for (int k = 0; k < K; ++k) {
      double observed = ell[k];
      if (params_.semidistributed && params_.observation_noise > 0.0 &&
          k != o)
        observed += params_.observation_noise * rng.normal();
      double v = kernels::dot(solutions[o].distribution.data(),
                              models_[o][k].row(next), space.joint_count());
      update_q(models_[o][k], s, joint, observed, v, alpha, params_.rho);
    }
  }

  double beta = params_.schedules.beta(n);
  for (int k = 0; k < K; ++k) {
    lambda_[k] = update_lambda(lambda_[k], rec.cost[k], game_.cost_bound(k),
                               beta, params_.lambda_max);
    rec.lambda[k] = lambda_[k];
  }

  if (owners > 1) {
    for (int o = 1; o < owners && !rec.miscoordination; ++o)
      for (int a = 0; a < space.joint_count(); ++a)
        if (std::abs(solutions[o].distribution[a] -
                     solutions[0].distribution[a]) > 1e-9) {
          rec.miscoordination = true;
          break;
        }
    if (rec.miscoordination) ++miscoordinated_;
  }

  for (int k = 0; k < K; ++k) {
    const CeSolution& sol = solutions[params_.semidistributed ? k : 0];
    std::vector<double> marg = marginal_distribution(space, sol.distribution, k);
    last_action_[k] = select_action(marg, params_.epsilon, rng);
  }

  state_ = next;
  return rec;
}

// ---------------------------------------------------------------------------
// Regret matching
// ---------------------------------------------------------------------------

void NormalFormLearner::observe(int played, const std::vector<double>& payoffs) {
  if (static_cast<int>(payoffs.size()) != n_)
    throw DimensionMismatch("regret observe: payoff vector length mismatch");
  ++rounds_;
  double kappa = 1.0 / static_cast<double>(rounds_);
  double base = payoffs[played];
  for (int i = 0; i < n_; ++i) {
    double* row = regret_.data() + static_cast<std::size_t>(i) * n_;
    for (int j = 0; j < n_; ++j) {
      if (j == i) continue;
      double inc = i == played ? payoffs[j] - base : 0.0;
      row[j] += kappa * (inc - row[j]);
    }
  }
}

std::vector<double> NormalFormLearner::play_distribution() const {
  std::vector<double> T = transition_matrix(regret_.data(), n_, smooth_);
  return stationary_distribution(T, n_, epsilon_);
}

int NormalFormLearner::act(Rng& rng) {
  std::vector<double> p = play_distribution();
  return select_action(p, epsilon_, rng);
}

int regret_matching_step(NormalFormLearner& learner, int played,
                         const std::vector<double>& payoffs, Rng& rng) {
  learner.observe(played, payoffs);
  return learner.act(rng);
}

// ---------------------------------------------------------------------------
// QnR
// ---------------------------------------------------------------------------

QnrRun::QnrRun(const Game& game, const QnrParams& params, Rng& rng)
    : game_(game), params_(params) {
  params_.schedules.validate();
  if (params_.inner_rounds < 1)
    throw ConfigError("qnr: inner_rounds must be at least 1");
  const JointActionSpace& space = game_.actions();
  int K = space.num_agents();
  state_ = game_.initial_state();
  empirical_ = JointPolicy(game_.num_states(), space.joint_count());
  state_visits_.assign(game_.num_states(), 0);
  pair_visits_.assign(
      static_cast<std::size_t>(game_.num_states()) * space.joint_count(), 0);
  q_.assign(K, QTable(game_.num_states(), space.joint_count()));
  mu_.resize(K);
  averaged_.resize(K);
  last_action_.resize(K);
  for (int k = 0; k < K; ++k) {
    mu_[k] = params_.mu > 0.0
                 ? params_.mu
                 : default_inertia(game_, k, 0.0, params_.rho);
    last_action_[k] = rng.below(space.count(k));
  }
}

StepRecord QnrRun::step(Rng& rng) {
  const JointActionSpace& space = game_.actions();
  int K = space.num_agents();
  long long n = ++iter_;
  int s = state_;
  int joint = space.flatten(last_action_);

  StepRecord rec;
  rec.n = n;
  rec.state = s;
  rec.joint = joint;
  rec.utility.resize(K);
  rec.cost.resize(K);
  rec.lambda.assign(K, 0.0);  // unconstrained baseline
  for (int k = 0; k < K; ++k) {
    rec.utility[k] = game_.utility(k, s, joint);
    rec.cost[k] = game_.cost(k, s, joint);
  }

  // Exact play frequency at the visited state.
  {
    double kappa = 1.0 / static_cast<double>(state_visits_[s] + 1);
    double* row = empirical_.row(s);
    kernels::scale(row, 1.0 - kappa, space.joint_count());
    row[joint] += kappa;
    ++state_visits_[s];
  }

  int next = game_.sample_transition(s, joint, rng);
  rec.next_state = next;

  std::size_t pair = static_cast<std::size_t>(s) * space.joint_count() + joint;
  double alpha = params_.schedules.alpha(pair_visits_[pair]);
  ++pair_visits_[pair];
  for (int k = 0; k < K; ++k) {
    double v_next = kernels::dot(empirical_.row(next), q_[k].row(next),
                                 space.joint_count());
    double target = (1.0 - params_.rho) * rec.utility[k] + params_.rho * v_next;
    q_[k].at(s, joint) += alpha * (target - q_[k].at(s, joint));
  }

  // Virtual regret-matching rounds at the visited state, payoffs taken from
  // the current Q row; regrets start fresh every outer iteration.
  std::vector<NormalFormLearner> virt;
  virt.reserve(K);
  for (int k = 0; k < K; ++k)
    virt.emplace_back(space.count(k),
                      SmoothMaxParams{params_.smooth_delta, mu_[k]},
                      params_.epsilon);
  std::vector<int> vplay = last_action_;
  for (int k = 0; k < K; ++k)
    averaged_[k].assign(space.count(k), 0.0);

  std::vector<double> payoffs;
  for (int m = 0; m < params_.inner_rounds; ++m) {
    int vjoint = space.flatten(vplay);
    for (int k = 0; k < K; ++k) {
      int nk = space.count(k);
      payoffs.resize(nk);
      for (int j = 0; j < nk; ++j)
        payoffs[j] = q_[k].at(s, space.replace(vjoint, k, j));
      virt[k].observe(vplay[k], payoffs);
    }
    for (int k = 0; k < K; ++k) {
      std::vector<double> p = virt[k].play_distribution();
      for (int i = 0; i < space.count(k); ++i) averaged_[k][i] += p[i];
      vplay[k] = select_action(p, params_.epsilon, rng);
    }
  }
  for (int k = 0; k < K; ++k) {
    for (double& v : averaged_[k]) v /= params_.inner_rounds;
    last_action_[k] = select_action(averaged_[k], params_.epsilon, rng);
  }

  state_ = next;
  return rec;
}

}  // namespace celearn
