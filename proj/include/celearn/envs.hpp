#pragma once

#include <memory>
#include <string>
#include <vector>

#include "celearn/game.hpp"

namespace celearn {

// ---------------------------------------------------------------------------
// Synthetic tabular games
// ---------------------------------------------------------------------------

// Fully explicit game description: transition kernel P(s, a, s'), per-agent
// utility and cost tables, per-agent cost bounds. Used by unit fixtures, the
// oracle, and randomized property tests.
struct TabularSpec {
  std::string name = "tabular";
  std::vector<int> action_counts;
  int num_states = 0;
  std::vector<double> transition;              // S * A * S, rows sum to 1
  std::vector<std::vector<double>> utility;    // per agent, S * A
  std::vector<std::vector<double>> cost;       // per agent, S * A
  std::vector<double> cost_bounds;             // per agent
  int initial_state = 0;
};

class TabularGame : public Game {
 public:
  // Validates shapes and row sums (1e-9); throws MalformedTables otherwise.
  explicit TabularGame(TabularSpec spec);

  std::string name() const override { return spec_.name; }
  int num_states() const override { return spec_.num_states; }
  const JointActionSpace& actions() const override { return space_; }
  double utility(int agent, int state, int joint) const override {
    return spec_.utility[agent][static_cast<std::size_t>(state) *
                                    space_.joint_count() + joint];
  }
  double cost(int agent, int state, int joint) const override {
    return spec_.cost[agent][static_cast<std::size_t>(state) *
                                 space_.joint_count() + joint];
  }
  double cost_bound(int agent) const override {
    return spec_.cost_bounds[agent];
  }
  Interval utility_range() const override { return utility_range_; }
  Interval cost_range() const override { return cost_range_; }
  int initial_state() const override { return spec_.initial_state; }
  int sample_transition(int state, int joint, Rng& rng) const override;

  double transition_prob(int state, int joint, int next) const {
    return spec_.transition[(static_cast<std::size_t>(state) *
                                 space_.joint_count() + joint) *
                                spec_.num_states + next];
  }
  const TabularSpec& spec() const { return spec_; }

 private:
  TabularSpec spec_;
  JointActionSpace space_;
  Interval utility_range_, cost_range_;
};

TabularGame make_synthetic_game(TabularSpec spec);

// A one-state game from per-agent payoff matrices over joint actions
// (costs zero, bounds large: the multiplier never engages).
TabularGame make_normal_form_game(const std::string& name,
                                  std::vector<int> action_counts,
                                  std::vector<std::vector<double>> payoffs);

// Named fixtures used across tests.
TabularGame fixture_prisoners_dilemma();     // 2x2, unique CE at mutual defect
TabularGame fixture_matching_pennies();      // 2x2 zero-sum, unique CE uniform
TabularGame fixture_chicken();               // 2x2 anti-coordination
TabularGame fixture_common_payoff();         // 2x2 identical payoffs
TabularGame fixture_dominant_strategy();     // 2x2, one strictly dominant action
TabularGame fixture_single_agent_mdp();      // 1 agent, 2 states, 2 actions
TabularGame fixture_two_agent_stochastic();  // 2 agents, 2 states, 2x2 actions

// Random instances for property tests. Payoffs uniform in [-1, 1], transition
// rows sampled from a flat Dirichlet; costs in [0, 1] with bound 0.5.
TabularGame random_tabular_game(Rng& rng, int num_agents, int num_states,
                                int actions_per_agent);

// ---------------------------------------------------------------------------
// Uplink spectrum access
// ---------------------------------------------------------------------------

// Femto users share an uplink channel with a macro user whose occupancy is an
// exogenous two-state chain. Action = transmit power; utility = Shannon rate
// under cross-tier and co-tier interference; cost = own transmit power with a
// time-average power budget.
struct UplinkParams {
  double noise_power = 1e-7;  // mW
  double mue_power = 5.0;     // mW, macro user transmit power
  std::vector<double> fue_power_levels = {0.0, 1.0};  // mW
  std::vector<double> mue_fbs_gains = {0.038, 0.082, 0.071, 0.086};
  // fue_fbs_gains[i][j]: channel gain from femto user i to femto base j.
  std::vector<std::vector<double>> fue_fbs_gains = {
      {0.44, 0.10, 0.02, 0.10},
      {0.07, 0.23, 0.03, 0.06},
      {0.10, 0.10, 0.25, 0.10},
      {0.10, 0.05, 0.09, 0.24}};
  double bandwidth_mhz = 1.0;
  double power_constraint = 0.75;  // mW, per-user time-average budget
  // Occupancy chain of the macro user: state 0 idle, state 1 transmitting.
  std::vector<std::vector<double>> mue_dtmc = {{0.9, 0.1}, {0.1, 0.9}};
};

// Rate of femto user `agent` given occupancy state and the joint power choice.
double uplink_rate(const UplinkParams& p, int agent, int state,
                   const std::vector<int>& power_index);

class UplinkGame : public Game {
 public:
  explicit UplinkGame(UplinkParams params);

  std::string name() const override { return "uplink"; }
  int num_states() const override { return 2; }
  const JointActionSpace& actions() const override { return space_; }
  double utility(int agent, int state, int joint) const override {
    return utility_[static_cast<std::size_t>(state) * space_.joint_count() *
                        num_agents_ +
                    static_cast<std::size_t>(joint) * num_agents_ + agent];
  }
  double cost(int agent, int state, int joint) const override {
    return params_.fue_power_levels[space_.component(joint, agent)];
  }
  double cost_bound(int agent) const override {
    return params_.power_constraint;
  }
  Interval utility_range() const override { return utility_range_; }
  Interval cost_range() const override { return cost_range_; }
  int sample_transition(int state, int joint, Rng& rng) const override;

  const UplinkParams& params() const { return params_; }

 private:
  UplinkParams params_;
  JointActionSpace space_;
  int num_agents_ = 0;
  std::vector<double> utility_;  // state x joint x agent
  Interval utility_range_, cost_range_;
};

// ---------------------------------------------------------------------------
// Downlink power control
// ---------------------------------------------------------------------------

// Femto bases choose downlink powers; the macro base serves a fixed-rate
// download whose leftover packets queue in a finite buffer. The buffer level
// is the shared state, each base's utility is its own downlink rate, and the
// shared cost is the buffer level with a time-average bound.
struct DownlinkParams {
  double noise_power = 1e-7;  // mW
  double mbs_power = 500.0;   // mW
  std::vector<double> fbs_power_levels = {0.0, 10.0, 100.0};  // mW
  std::vector<double> mbs_fue_gains = {0.003, 0.005, 0.008, 0.002};  // macro->femto user k
  std::vector<double> fbs_mue_gains = {0.055, 0.051, 0.035, 0.012};  // femto base k->macro user
  double mbs_mue_gain = 0.01;  // macro base -> macro user
  // fbs_fue_gains[i][j]: gain from femto base i to femto user j.
  std::vector<std::vector<double>> fbs_fue_gains = {
      {0.68, 0.09, 0.03, 0.04},
      {0.07, 0.82, 0.04, 0.04},
      {0.01, 0.04, 0.16, 0.03},
      {0.03, 0.08, 0.01, 0.29}};
  double slot_msec = 1.0;
  double arrival_rate = 5.5;   // packets per msec (Poisson)
  double packet_bits = 2048.0; // 256 bytes
  int buffer_cap = 20;
  double buffer_constraint = 10.0;  // packets, time-average bound
  double bandwidth_mhz = 1.0;
};

// Macro user's downlink rate in Mbit/s given the joint femto power choice.
double downlink_mue_rate(const DownlinkParams& p,
                         const std::vector<int>& power_index);

// Femto user `agent`'s downlink rate in Mbit/s.
double downlink_fue_rate(const DownlinkParams& p, int agent,
                         const std::vector<int>& power_index);

// Exact buffer recursion: min((b - tau * r / L)^+ + arrivals, cap), with the
// rate in Mbit/s, the slot in msec and the packet size in bits. Real-valued;
// the environment lands on an integer state by unbiased stochastic rounding.
double buffer_step(double buffer, double rate_mbps, int arrivals,
                   const DownlinkParams& p);

class DownlinkGame : public Game {
 public:
  explicit DownlinkGame(DownlinkParams params);

  std::string name() const override { return "downlink"; }
  int num_states() const override { return params_.buffer_cap + 1; }
  const JointActionSpace& actions() const override { return space_; }
  double utility(int agent, int state, int joint) const override {
    (void)state;  // rates do not depend on the buffer
    return utility_[static_cast<std::size_t>(joint) * num_agents_ + agent];
  }
  double cost(int agent, int state, int joint) const override {
    (void)agent;
    (void)joint;
    return static_cast<double>(state);
  }
  double cost_bound(int agent) const override {
    (void)agent;
    return params_.buffer_constraint;
  }
  Interval utility_range() const override { return utility_range_; }
  Interval cost_range() const override {
    return {0.0, static_cast<double>(params_.buffer_cap)};
  }
  int sample_transition(int state, int joint, Rng& rng) const override;

  const DownlinkParams& params() const { return params_; }
  double mue_rate(int joint) const { return mue_rate_[joint]; }

 private:
  DownlinkParams params_;
  JointActionSpace space_;
  int num_agents_ = 0;
  std::vector<double> utility_;   // joint x agent
  std::vector<double> mue_rate_;  // joint
  Interval utility_range_;
};

}  // namespace celearn
