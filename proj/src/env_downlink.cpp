#include <cmath>

#include "celearn/envs.hpp"

namespace celearn {

double downlink_mue_rate(const DownlinkParams& p,
                         const std::vector<int>& power_index) {
  double interference = p.noise_power;
  for (std::size_t k = 0; k < power_index.size(); ++k)
    interference += p.fbs_power_levels[power_index[k]] * p.fbs_mue_gains[k];
  double own = p.mbs_power * p.mbs_mue_gain;
  return p.bandwidth_mhz * std::log2(1.0 + own / interference);
}

double downlink_fue_rate(const DownlinkParams& p, int agent,
                         const std::vector<int>& power_index) {
  int K = static_cast<int>(power_index.size());
  double own = p.fbs_power_levels[power_index[agent]] *
               p.fbs_fue_gains[agent][agent];
  double interference = p.noise_power + p.mbs_fue_gains[agent] * p.mbs_power;
  for (int k = 0; k < K; ++k) {
    if (k == agent) continue;
    interference += p.fbs_power_levels[power_index[k]] *
                    p.fbs_fue_gains[k][agent];
  }
  return p.bandwidth_mhz * std::log2(1.0 + own / interference);
}

double buffer_step(double buffer, double rate_mbps, int arrivals,
                   const DownlinkParams& p) {
  // Mbit/s over a msec slot: rate_mbps * 1000 bits per msec.
  double served_packets = p.slot_msec * rate_mbps * 1000.0 / p.packet_bits;
  double remaining = std::max(buffer - served_packets, 0.0);
  return std::min(remaining + arrivals, static_cast<double>(p.buffer_cap));
}

DownlinkGame::DownlinkGame(DownlinkParams params)
    : params_(std::move(params)),
      num_agents_(static_cast<int>(params_.mbs_fue_gains.size())) {
  if (static_cast<int>(params_.fbs_fue_gains.size()) != num_agents_ ||
      static_cast<int>(params_.fbs_mue_gains.size()) != num_agents_)
    throw MalformedTables("downlink: gain table size mismatch");
  for (const auto& row : params_.fbs_fue_gains)
    if (static_cast<int>(row.size()) != num_agents_)
      throw MalformedTables("downlink: gain matrix column count mismatch");
  if (params_.fbs_power_levels.empty())
    throw MalformedTables("downlink: no power levels");
  if (params_.buffer_cap < 1)
    throw MalformedTables("downlink: buffer cap must be positive");

  space_ = JointActionSpace(std::vector<int>(
      num_agents_, static_cast<int>(params_.fbs_power_levels.size())));
  int A = space_.joint_count();
  utility_.resize(static_cast<std::size_t>(A) * num_agents_);
  mue_rate_.resize(A);
  utility_range_ = {0.0, 0.0};
  for (int a = 0; a < A; ++a) {
    std::vector<int> idx = space_.unflatten(a);
    mue_rate_[a] = downlink_mue_rate(params_, idx);
    for (int k = 0; k < num_agents_; ++k) {
      double r = downlink_fue_rate(params_, k, idx);
      utility_[static_cast<std::size_t>(a) * num_agents_ + k] = r;
      utility_range_.hi = std::max(utility_range_.hi, r);
    }
  }
}

int DownlinkGame::sample_transition(int state, int joint, Rng& rng) const {
  int arrivals = rng.poisson(params_.arrival_rate * params_.slot_msec);
  double next = buffer_step(static_cast<double>(state), mue_rate_[joint],
                            arrivals, params_);
  // Unbiased stochastic rounding onto the integer state grid.
  double fl = std::floor(next);
  double frac = next - fl;
  int b = static_cast<int>(fl);
  if (frac > 0.0 && rng.uniform() < frac) ++b;
  if (b > params_.buffer_cap) b = params_.buffer_cap;
  return b;
}

}  // namespace celearn
