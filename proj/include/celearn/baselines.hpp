#pragma once

#include <functional>
#include <vector>

#include "celearn/cnrq.hpp"
#include "celearn/game.hpp"
#include "celearn/lp.hpp"
#include "celearn/regret.hpp"
#include "celearn/schedules.hpp"

namespace celearn {

// ---------------------------------------------------------------------------
// Utilitarian correlated equilibrium LP
// ---------------------------------------------------------------------------

struct CeSolution {
  std::vector<double> distribution;  // over joint actions
  double objective = 0.0;
};

// Builds the CE polytope LP over one state's Q slices and maximizes the sum
// of all agents' expected Q-values. Constraint system per state: one
// deviation row per (agent, recommended, alternative) pair
// (sum_k |A_k|(|A_k|-1) rows), |A| nonnegativity bounds, one normalization.
LinearProgram build_ce_lp(const JointActionSpace& space,
                          const std::vector<const double*>& q_rows);

CeSolution utilitarian_ce(const JointActionSpace& space,
                          const std::vector<const double*>& q_rows,
                          SimplexSolver& solver);

// Convenience overload over full tables at one state.
CeSolution utilitarian_ce(const JointActionSpace& space,
                          const std::vector<QTable>& q, int state,
                          SimplexSolver& solver);

// Marginal of a joint distribution onto one agent's action set.
std::vector<double> marginal_distribution(const JointActionSpace& space,
                                          const std::vector<double>& joint,
                                          int agent);

// ---------------------------------------------------------------------------
// CE-Q (centralized and semi-distributed)
// ---------------------------------------------------------------------------

struct CeqParams {
  StepSchedules schedules;
  double rho = 0.5;
  double epsilon = 0.05;
  double lambda_max = 100.0;
  bool semidistributed = false;
  // Standard deviation of the noise an agent's model adds to every observed
  // reward of *other* agents (semi-distributed only). 0 keeps all models,
  // and hence all selected equilibria, exactly identical.
  double observation_noise = 0.0;
};

// Constrained CE-Q: one utilitarian CE solve at the next state per iteration,
// asynchronous Q update on the Lagrangian, projected multiplier ascent on the
// slow timescale, epsilon-soft action from the agent's CE marginal. The
// semi-distributed variant gives each agent its own copy of everyone's
// Q models (optionally noise-perturbed) and its own LP.
class CeqRun {
 public:
  CeqRun(const Game& game, const CeqParams& params, Rng& rng);

  StepRecord step(Rng& rng);

  int state() const { return state_; }
  long long iteration() const { return iter_; }
  double lambda(int agent) const { return lambda_[agent]; }
  // Centralized model of `agent` (owner 0's model in the semi variant).
  const QTable& q(int agent) const { return models_[0][agent]; }
  const QTable& model(int owner, int about) const {
    return models_[owner][about];
  }
  long long miscoordination_steps() const { return miscoordinated_; }

 private:
  const Game& game_;
  CeqParams params_;
  int state_ = 0;
  long long iter_ = 0;
  // models_[owner][about]; centralized keeps a single owner.
  std::vector<std::vector<QTable>> models_;
  std::vector<double> lambda_;
  std::vector<int> last_action_;
  std::vector<long long> pair_visits_;
  long long miscoordinated_ = 0;
  SimplexSolver solver_;
};

// ---------------------------------------------------------------------------
// Normal-form regret matching
// ---------------------------------------------------------------------------

// Average-form conditional regrets with kappa(n) = 1/n, smoothed switching
// probabilities with inertia mu, trembled balance equations for the play
// distribution.
class NormalFormLearner {
 public:
  NormalFormLearner(int num_actions, SmoothMaxParams smooth, double epsilon)
      : n_(num_actions),
        smooth_(smooth),
        epsilon_(epsilon),
        regret_(static_cast<std::size_t>(num_actions) * num_actions, 0.0) {}

  // payoffs[j] = payoff the agent would have collected playing j against the
  // observed opponents' play; `played` is what it actually played.
  void observe(int played, const std::vector<double>& payoffs);

  std::vector<double> play_distribution() const;
  int act(Rng& rng);

  const std::vector<double>& regrets() const { return regret_; }
  long long rounds() const { return rounds_; }
  int num_actions() const { return n_; }
  const SmoothMaxParams& smooth() const { return smooth_; }

 private:
  int n_;
  SmoothMaxParams smooth_;
  double epsilon_;
  long long rounds_ = 0;
  std::vector<double> regret_;
};

// One regret-matching round: fold the observed payoff vector into the
// learner's regrets and sample the next action.
int regret_matching_step(NormalFormLearner& learner, int played,
                         const std::vector<double>& payoffs, Rng& rng);

// ---------------------------------------------------------------------------
// QnR (nested no-regret / Q-learning, unconstrained)
// ---------------------------------------------------------------------------

struct QnrParams {
  StepSchedules schedules;
  double rho = 0.5;
  double epsilon = 0.05;
  double smooth_delta = 1e-3;
  double mu = 0.0;  // <= 0: bound-derived default
  int inner_rounds = 200;
};

// Literal nested baseline: on-policy Q update against the empirical play
// frequency, then `inner_rounds` rounds of virtual regret matching at the
// visited state with the Q row as payoffs (fresh regrets every outer
// iteration), next action epsilon-soft from the averaged virtual play
// distribution.
class QnrRun {
 public:
  QnrRun(const Game& game, const QnrParams& params, Rng& rng);

  StepRecord step(Rng& rng);

  int state() const { return state_; }
  long long iteration() const { return iter_; }
  const JointPolicy& empirical() const { return empirical_; }
  const QTable& q(int agent) const { return q_[agent]; }
  // Averaged virtual distribution of the most recent inner loop.
  const std::vector<double>& averaged_play(int agent) const {
    return averaged_[agent];
  }

 private:
  const Game& game_;
  QnrParams params_;
  int state_ = 0;
  long long iter_ = 0;
  JointPolicy empirical_;
  std::vector<long long> state_visits_;
  std::vector<long long> pair_visits_;
  std::vector<QTable> q_;
  std::vector<double> mu_;
  std::vector<int> last_action_;
  std::vector<std::vector<double>> averaged_;
};

}  // namespace celearn
