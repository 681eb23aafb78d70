#include <cmath>

#include "celearn/envs.hpp"

namespace celearn {

double uplink_rate(const UplinkParams& p, int agent, int state,
                   const std::vector<int>& power_index) {
  int K = static_cast<int>(power_index.size());
  double own = p.fue_power_levels[power_index[agent]] *
               p.fue_fbs_gains[agent][agent];
  double interference = p.noise_power;
  if (state == 1) interference += p.mue_fbs_gains[agent] * p.mue_power;
  for (int k = 0; k < K; ++k) {
    if (k == agent) continue;
    interference += p.fue_power_levels[power_index[k]] *
                    p.fue_fbs_gains[k][agent];
  }
  return p.bandwidth_mhz * std::log2(1.0 + own / interference);
}

UplinkGame::UplinkGame(UplinkParams params)
    : params_(std::move(params)),
      num_agents_(static_cast<int>(params_.mue_fbs_gains.size())) {
  if (static_cast<int>(params_.fue_fbs_gains.size()) != num_agents_)
    throw MalformedTables("uplink: gain matrix row count mismatch");
  for (const auto& row : params_.fue_fbs_gains)
    if (static_cast<int>(row.size()) != num_agents_)
      throw MalformedTables("uplink: gain matrix column count mismatch");
  if (params_.fue_power_levels.empty())
    throw MalformedTables("uplink: no power levels");
  for (const auto& row : params_.mue_dtmc) {
    double sum = 0.0;
    for (double v : row) sum += v;
    if (std::abs(sum - 1.0) > 1e-9)
      throw MalformedTables("uplink: occupancy chain row does not sum to 1");
  }

  space_ = JointActionSpace(std::vector<int>(
      num_agents_, static_cast<int>(params_.fue_power_levels.size())));
  int A = space_.joint_count();
  utility_.resize(static_cast<std::size_t>(2) * A * num_agents_);
  utility_range_ = {0.0, 0.0};
  for (int s = 0; s < 2; ++s)
    for (int a = 0; a < A; ++a) {
      std::vector<int> idx = space_.unflatten(a);
      for (int k = 0; k < num_agents_; ++k) {
        double r = uplink_rate(params_, k, s, idx);
        utility_[static_cast<std::size_t>(s) * A * num_agents_ +
                 static_cast<std::size_t>(a) * num_agents_ + k] = r;
        utility_range_.hi = std::max(utility_range_.hi, r);
      }
    }
  double pmax = 0.0;
  for (double lv : params_.fue_power_levels) pmax = std::max(pmax, lv);
  cost_range_ = {0.0, pmax};
}

int UplinkGame::sample_transition(int state, int joint, Rng& rng) const {
  (void)joint;  // occupancy is exogenous
  double u = rng.uniform();
  return u < params_.mue_dtmc[state][0] ? 0 : 1;
}

}  // namespace celearn
