#include <cmath>

#include "celearn/envs.hpp"

namespace celearn {

namespace {

Interval table_range(const std::vector<std::vector<double>>& tables) {
  Interval r{0.0, 0.0};
  bool first = true;
  for (const auto& t : tables)
    for (double v : t) {
      if (first) {
        r = {v, v};
        first = false;
      } else {
        r.lo = std::min(r.lo, v);
        r.hi = std::max(r.hi, v);
      }
    }
  return r;
}

}  // namespace

TabularGame::TabularGame(TabularSpec spec)
    : spec_(std::move(spec)), space_(spec_.action_counts) {
  int S = spec_.num_states;
  int A = space_.joint_count();
  int K = space_.num_agents();
  if (S < 1) throw MalformedTables("tabular game: need at least one state");
  if (spec_.transition.size() != static_cast<std::size_t>(S) * A * S)
    throw MalformedTables("tabular game: transition table shape mismatch");
  if (static_cast<int>(spec_.utility.size()) != K ||
      static_cast<int>(spec_.cost.size()) != K ||
      static_cast<int>(spec_.cost_bounds.size()) != K)
    throw MalformedTables("tabular game: per-agent table count mismatch");
  for (int k = 0; k < K; ++k)
    if (spec_.utility[k].size() != static_cast<std::size_t>(S) * A ||
        spec_.cost[k].size() != static_cast<std::size_t>(S) * A)
      throw MalformedTables("tabular game: payoff table shape mismatch");
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) {
      double sum = 0.0;
      for (int t = 0; t < S; ++t) {
        double p = transition_prob(s, a, t);
        if (p < -1e-12)
          throw MalformedTables("tabular game: negative transition entry");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-9)
        throw MalformedTables("tabular game: transition row does not sum to 1");
    }
  if (spec_.initial_state < 0 || spec_.initial_state >= S)
    throw MalformedTables("tabular game: initial state out of range");
  utility_range_ = table_range(spec_.utility);
  cost_range_ = table_range(spec_.cost);
}

int TabularGame::sample_transition(int state, int joint, Rng& rng) const {
  double u = rng.uniform();
  double acc = 0.0;
  int S = spec_.num_states;
  for (int t = 0; t < S; ++t) {
    acc += transition_prob(state, joint, t);
    if (u < acc) return t;
  }
  return S - 1;
}

TabularGame make_synthetic_game(TabularSpec spec) {
  return TabularGame(std::move(spec));
}

TabularGame make_normal_form_game(const std::string& name,
                                  std::vector<int> action_counts,
                                  std::vector<std::vector<double>> payoffs) {
  TabularSpec spec;
  spec.name = name;
  spec.action_counts = std::move(action_counts);
  spec.num_states = 1;
  JointActionSpace space(spec.action_counts);
  int A = space.joint_count();
  int K = space.num_agents();
  if (static_cast<int>(payoffs.size()) != K)
    throw MalformedTables("normal form game: one payoff table per agent");
  spec.transition.assign(A, 1.0);  // S*A*S with S=1
  spec.utility = std::move(payoffs);
  spec.cost.assign(K, std::vector<double>(A, 0.0));
  spec.cost_bounds.assign(K, 1.0);
  return TabularGame(std::move(spec));
}

TabularGame fixture_prisoners_dilemma() {
  // Actions: 0 cooperate, 1 defect. Joint order (a0, a1): CC, CD, DC, DD.
  return make_normal_form_game("prisoners-dilemma", {2, 2},
                               {{3, 0, 5, 1}, {3, 5, 0, 1}});
}

TabularGame fixture_matching_pennies() {
  // Agent 0 wins on a match, agent 1 wins on a mismatch.
  return make_normal_form_game("matching-pennies", {2, 2},
                               {{1, -1, -1, 1}, {-1, 1, 1, -1}});
}

TabularGame fixture_chicken() {
  // Actions: 0 dare, 1 yield.
  return make_normal_form_game("chicken", {2, 2},
                               {{0, 7, 2, 6}, {0, 2, 7, 6}});
}

TabularGame fixture_common_payoff() {
  std::vector<double> shared = {1.0, 0.0, 0.0, 4.0};
  return make_normal_form_game("common-payoff", {2, 2}, {shared, shared});
}

TabularGame fixture_dominant_strategy() {
  // Action 1 strictly dominates for both agents.
  return make_normal_form_game("dominant-strategy", {2, 2},
                               {{0, 0, 2, 2}, {0, 2, 0, 2}});
}

TabularGame fixture_single_agent_mdp() {
  TabularSpec spec;
  spec.name = "single-agent-mdp";
  spec.action_counts = {2};
  spec.num_states = 2;
  // P(s, a, s'): action 0 tends to stay, action 1 tends to move.
  spec.transition = {
      // s=0
      0.9, 0.1,   // a=0
      0.2, 0.8,   // a=1
      // s=1
      0.3, 0.7,   // a=0
      0.6, 0.4};  // a=1
  spec.utility = {{1.0, 0.2, 0.0, 0.8}};  // r(s, a)
  spec.cost = {{0.0, 0.0, 0.0, 0.0}};
  spec.cost_bounds = {1.0};
  return TabularGame(std::move(spec));
}

TabularGame fixture_two_agent_stochastic() {
  TabularSpec spec;
  spec.name = "two-agent-stochastic";
  spec.action_counts = {2, 2};
  spec.num_states = 2;
  // Joint actions in canonical order: (0,0), (0,1), (1,0), (1,1).
  spec.transition = {
      // s=0
      0.8, 0.2,
      0.5, 0.5,
      0.4, 0.6,
      0.1, 0.9,
      // s=1
      0.6, 0.4,
      0.3, 0.7,
      0.7, 0.3,
      0.2, 0.8};
  spec.utility = {
      {0.9, 0.1, 0.6, 0.3, 0.2, 0.8, 0.4, 0.7},
      {0.3, 0.7, 0.2, 0.9, 0.5, 0.1, 0.8, 0.4}};
  spec.cost = {
      {0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0},
      {0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0, 1.0}};
  spec.cost_bounds = {0.6, 0.6};
  return TabularGame(std::move(spec));
}

TabularGame random_tabular_game(Rng& rng, int num_agents, int num_states,
                                int actions_per_agent) {
  TabularSpec spec;
  spec.name = "random-tabular";
  spec.action_counts.assign(num_agents, actions_per_agent);
  spec.num_states = num_states;
  JointActionSpace space(spec.action_counts);
  int A = space.joint_count();
  spec.transition.resize(static_cast<std::size_t>(num_states) * A *
                         num_states);
  for (int s = 0; s < num_states; ++s)
    for (int a = 0; a < A; ++a) {
      double sum = 0.0;
      std::vector<double> row(num_states);
      for (int t = 0; t < num_states; ++t) {
        row[t] = -std::log(1.0 - rng.uniform());
        sum += row[t];
      }
      for (int t = 0; t < num_states; ++t)
        spec.transition[(static_cast<std::size_t>(s) * A + a) * num_states +
                        t] = row[t] / sum;
    }
  spec.utility.assign(num_agents,
                      std::vector<double>(static_cast<std::size_t>(num_states) *
                                          A));
  spec.cost.assign(num_agents,
                   std::vector<double>(static_cast<std::size_t>(num_states) *
                                       A));
  for (int k = 0; k < num_agents; ++k)
    for (std::size_t i = 0; i < spec.utility[k].size(); ++i) {
      spec.utility[k][i] = 2.0 * rng.uniform() - 1.0;
      spec.cost[k][i] = rng.uniform();
    }
  spec.cost_bounds.assign(num_agents, 0.5);
  return TabularGame(std::move(spec));
}

}  // namespace celearn
