#pragma once

#include <vector>

#include "celearn/game.hpp"
#include "celearn/regret.hpp"
#include "celearn/schedules.hpp"

namespace celearn {

// One iteration's observables, shared by all learners so the harness logs a
// uniform schema.
struct StepRecord {
  long long n = 0;
  int state = 0;
  int joint = 0;
  int next_state = 0;
  std::vector<double> utility;  // per agent
  std::vector<double> cost;     // per agent
  std::vector<double> lambda;   // per agent, after this iteration's update
  bool miscoordination = false;
};

struct CnrqParams {
  StepSchedules schedules;
  double rho = 0.5;
  double epsilon = 0.05;
  double lambda_max = 100.0;
  double smooth_delta = 1e-3;
  // Inertia constant; <= 0 selects the bound-derived default
  // 2 * |A_k| * max|lagrangian| / (1 - rho). A transition row whose smoothed
  // regrets outgrow the inertia triggers a one-time doubling (logged).
  double mu = 0.0;
};

// --- Single-update building blocks (unit-tested against worked values) ---

// Fast-timescale empirical move at the visited state:
// pi_s <- pi_s + gamma(visits(s)) * (e_joint - pi_s); then visits(s) += 1.
// First visit uses step 1, putting the all-zero row exactly on the vertex.
void update_empirical(JointPolicy& pi, std::vector<long long>& state_visits,
                      int state, int joint, const StepSchedules& sched);

// sum_a pi_state(a) * q(state, a)
double long_term_lagrangian(const JointPolicy& pi, const QTable& q, int state);

// q(s,a) += alpha * ((1-rho) ell + rho next_value - q(s,a))
void update_q(QTable& q, int state, int joint, double ell, double next_value,
              double alpha, double rho);

// clamp(lambda + beta * (cost - bound), [0, lambda_max])
double update_lambda(double lambda, double cost, double bound, double beta,
                     double lambda_max);

// Regret block of `agent` at `state`: every off-diagonal entry (i, j) moves by
// gamma * (increment - entry), where the increment is
// q(s, joint with own action -> j) - q(s, joint) when i was the played own
// action, and 0 otherwise (rows of unplayed actions decay). Diagonals stay 0.
void update_regret(RegretTable& regrets, const JointActionSpace& space,
                   int agent, const QTable& q, int state, int joint,
                   double gamma);

// --- Full learner ---

class CnrqRun {
 public:
  CnrqRun(const Game& game, const CnrqParams& params, Rng& rng);

  // One full iteration: fast empirical/regret moves at the visited state,
  // mid-timescale asynchronous Q update on the Lagrangian, slow projected
  // multiplier ascent, then next-action sampling from the invariant
  // distribution of the trembled regret-switching chain at the next state.
  StepRecord step(Rng& rng);

  int state() const { return state_; }
  long long iteration() const { return iter_; }
  const JointPolicy& empirical() const { return empirical_; }
  const QTable& q(int agent) const { return agents_[agent].q; }
  const RegretTable& regrets(int agent) const { return agents_[agent].regret; }
  double lambda(int agent) const { return agents_[agent].lambda; }
  double mu(int agent) const { return agents_[agent].smooth.mu; }
  int last_action(int agent) const { return agents_[agent].last_action; }
  int mu_doublings() const { return mu_doublings_; }

  // Sum over agents of the smoothed-regret Lyapunov functional.
  double lyapunov() const;

  // Residual diagnostics of the current empirical policy against current Q.
  CEResiduals residuals() const;

 private:
  struct AgentState {
    QTable q;
    RegretTable regret;
    SmoothMaxParams smooth;
    double lambda = 0.0;
    int last_action = 0;
  };

  const Game& game_;
  CnrqParams params_;
  int state_ = 0;
  long long iter_ = 0;
  JointPolicy empirical_;
  std::vector<long long> state_visits_;
  std::vector<long long> pair_visits_;  // state * joint
  std::vector<AgentState> agents_;
  int mu_doublings_ = 0;
};

// Bound-derived default inertia for one agent.
double default_inertia(const Game& game, int agent, double lambda_max,
                       double rho);

}  // namespace celearn
