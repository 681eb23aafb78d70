#include "celearn/harness.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "celearn/common.hpp"
#include "celearn/envs.hpp"

namespace celearn {

namespace {

using nlohmann::json;

[[noreturn]] void bad_field(const std::string& source, const std::string& field,
                            const std::string& why) {
  throw ConfigError(source + ": field '" + field + "' " + why);
}

double get_number(const json& j, const std::string& source,
                  const std::string& field, double fallback) {
  if (!j.contains(field)) return fallback;
  if (!j.at(field).is_number()) bad_field(source, field, "must be a number");
  return j.at(field).get<double>();
}

long long get_integer(const json& j, const std::string& source,
                      const std::string& field, long long fallback) {
  if (!j.contains(field)) return fallback;
  if (!j.at(field).is_number_integer())
    bad_field(source, field, "must be an integer");
  return j.at(field).get<long long>();
}

const std::set<std::string> kKnownKeys = {
    "name",          "environment",   "algorithm",       "iterations",
    "seeds",         "discount",      "exploration",     "lambda_max",
    "smooth_delta",  "mu",            "gamma_exponent",  "alpha_exponent",
    "beta_exponent", "thin_interval", "qnr_inner_rounds",
    "observation_noise", "output_dir"};

const std::set<std::string> kAlgorithms = {
    "cnrq", "ceq-central", "ceq-semi", "qnr", "regret-matching"};

const std::set<std::string> kPresets = {
    "uplink-paper",     "downlink-paper", "pd-repeated",
    "matching-pennies", "chicken",        "common-payoff",
    "dominant-strategy", "single-agent-mdp", "two-agent-stochastic"};

// Overrides each preset accepts, checked up front so a typo fails loudly
// instead of silently running the default parameters.
const std::set<std::string> kUplinkKeys = {
    "noise_power",   "mue_power",     "fue_power_levels", "mue_fbs_gains",
    "fue_fbs_gains", "bandwidth_mhz", "power_constraint", "mue_dtmc"};
const std::set<std::string> kDownlinkKeys = {
    "noise_power",   "mbs_power",    "fbs_power_levels", "mbs_fue_gains",
    "fbs_mue_gains", "mbs_mue_gain", "fbs_fue_gains",    "slot_msec",
    "arrival_rate",  "packet_bits",  "buffer_cap",       "buffer_constraint",
    "bandwidth_mhz"};

void check_override_keys(const json& ov, const std::set<std::string>& allowed,
                         const std::string& source) {
  for (auto it = ov.begin(); it != ov.end(); ++it) {
    if (!allowed.count(it.key()))
      bad_field(source, "environment.overrides." + it.key(),
                "is not a parameter of this preset");
  }
}

template <typename T>
void get_vector(const json& ov, const std::string& source,
                const std::string& field, T& target) {
  if (!ov.contains(field)) return;
  try {
    target = ov.at(field).get<T>();
  } catch (const json::exception&) {
    bad_field(source, "environment.overrides." + field,
              "has the wrong shape");
  }
}

UplinkParams uplink_params(const json& ov, const std::string& source) {
  check_override_keys(ov, kUplinkKeys, source);
  UplinkParams p;
  p.noise_power = get_number(ov, source, "noise_power", p.noise_power);
  p.mue_power = get_number(ov, source, "mue_power", p.mue_power);
  get_vector(ov, source, "fue_power_levels", p.fue_power_levels);
  get_vector(ov, source, "mue_fbs_gains", p.mue_fbs_gains);
  get_vector(ov, source, "fue_fbs_gains", p.fue_fbs_gains);
  p.bandwidth_mhz = get_number(ov, source, "bandwidth_mhz", p.bandwidth_mhz);
  p.power_constraint =
      get_number(ov, source, "power_constraint", p.power_constraint);
  get_vector(ov, source, "mue_dtmc", p.mue_dtmc);
  return p;
}

DownlinkParams downlink_params(const json& ov, const std::string& source) {
  check_override_keys(ov, kDownlinkKeys, source);
  DownlinkParams p;
  p.noise_power = get_number(ov, source, "noise_power", p.noise_power);
  p.mbs_power = get_number(ov, source, "mbs_power", p.mbs_power);
  get_vector(ov, source, "fbs_power_levels", p.fbs_power_levels);
  get_vector(ov, source, "mbs_fue_gains", p.mbs_fue_gains);
  get_vector(ov, source, "fbs_mue_gains", p.fbs_mue_gains);
  p.mbs_mue_gain = get_number(ov, source, "mbs_mue_gain", p.mbs_mue_gain);
  get_vector(ov, source, "fbs_fue_gains", p.fbs_fue_gains);
  p.slot_msec = get_number(ov, source, "slot_msec", p.slot_msec);
  p.arrival_rate = get_number(ov, source, "arrival_rate", p.arrival_rate);
  p.packet_bits = get_number(ov, source, "packet_bits", p.packet_bits);
  p.buffer_cap =
      static_cast<int>(get_integer(ov, source, "buffer_cap", p.buffer_cap));
  p.buffer_constraint =
      get_number(ov, source, "buffer_constraint", p.buffer_constraint);
  p.bandwidth_mhz = get_number(ov, source, "bandwidth_mhz", p.bandwidth_mhz);
  if (p.buffer_cap < 1)
    bad_field(source, "environment.overrides.buffer_cap", "must be >= 1");
  return p;
}

}  // namespace

ExperimentConfig config_from_json(const json& j, const std::string& source) {
  if (!j.is_object()) throw ConfigError(source + ": top level must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!kKnownKeys.count(it.key()))
      bad_field(source, it.key(), "is not recognised");
  }

  ExperimentConfig cfg;
  if (!j.contains("environment") || !j.at("environment").is_object())
    bad_field(source, "environment", "must be an object with a 'preset'");
  const json& env = j.at("environment");
  for (auto it = env.begin(); it != env.end(); ++it) {
    if (it.key() != "preset" && it.key() != "overrides")
      bad_field(source, "environment." + it.key(), "is not recognised");
  }
  if (!env.contains("preset") || !env.at("preset").is_string())
    bad_field(source, "environment.preset", "must be a string");
  cfg.environment.preset = env.at("preset").get<std::string>();
  if (!kPresets.count(cfg.environment.preset))
    bad_field(source, "environment.preset",
              "'" + cfg.environment.preset + "' is not a known preset");
  cfg.environment.overrides = env.value("overrides", json::object());
  if (!cfg.environment.overrides.is_object())
    bad_field(source, "environment.overrides", "must be an object");

  if (!j.contains("algorithm") || !j.at("algorithm").is_string())
    bad_field(source, "algorithm", "must be a string");
  cfg.algorithm = j.at("algorithm").get<std::string>();
  if (!kAlgorithms.count(cfg.algorithm))
    bad_field(source, "algorithm",
              "'" + cfg.algorithm + "' is not one of cnrq, ceq-central, "
              "ceq-semi, qnr, regret-matching");

  cfg.iterations = get_integer(j, source, "iterations", 0);
  if (cfg.iterations < 1) bad_field(source, "iterations", "must be >= 1");

  if (j.contains("seeds")) {
    if (!j.at("seeds").is_array() || j.at("seeds").empty())
      bad_field(source, "seeds", "must be a non-empty array of integers");
    for (const auto& s : j.at("seeds")) {
      if (!s.is_number_integer())
        bad_field(source, "seeds", "must contain only integers");
      cfg.seeds.push_back(s.get<std::uint64_t>());
    }
  } else {
    cfg.seeds = {1};
  }

  cfg.discount = get_number(j, source, "discount", cfg.discount);
  if (!(cfg.discount >= 0.0 && cfg.discount < 1.0))
    bad_field(source, "discount", "must lie in [0, 1)");
  cfg.exploration = get_number(j, source, "exploration", cfg.exploration);
  if (!(cfg.exploration > 0.0 && cfg.exploration < 1.0))
    bad_field(source, "exploration", "must lie in (0, 1)");
  cfg.lambda_max = get_number(j, source, "lambda_max", cfg.lambda_max);
  if (cfg.lambda_max < 0.0) bad_field(source, "lambda_max", "must be >= 0");
  cfg.smooth_delta = get_number(j, source, "smooth_delta", cfg.smooth_delta);
  if (cfg.smooth_delta <= 0.0) bad_field(source, "smooth_delta", "must be > 0");
  cfg.mu = get_number(j, source, "mu", cfg.mu);

  cfg.schedules.fast = get_number(j, source, "gamma_exponent", cfg.schedules.fast);
  cfg.schedules.mid = get_number(j, source, "alpha_exponent", cfg.schedules.mid);
  cfg.schedules.slow = get_number(j, source, "beta_exponent", cfg.schedules.slow);
  try {
    cfg.schedules.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }

  cfg.thin_interval = get_integer(j, source, "thin_interval", cfg.thin_interval);
  if (cfg.thin_interval < 1) bad_field(source, "thin_interval", "must be >= 1");
  cfg.qnr_inner_rounds = static_cast<int>(
      get_integer(j, source, "qnr_inner_rounds", cfg.qnr_inner_rounds));
  if (cfg.qnr_inner_rounds < 1)
    bad_field(source, "qnr_inner_rounds", "must be >= 1");
  cfg.observation_noise =
      get_number(j, source, "observation_noise", cfg.observation_noise);
  if (cfg.observation_noise < 0.0)
    bad_field(source, "observation_noise", "must be >= 0");

  if (j.contains("output_dir")) {
    if (!j.at("output_dir").is_string())
      bad_field(source, "output_dir", "must be a string");
    cfg.output_dir = j.at("output_dir").get<std::string>();
  }
  if (j.contains("name")) {
    if (!j.at("name").is_string()) bad_field(source, "name", "must be a string");
    cfg.name = j.at("name").get<std::string>();
  }
  if (cfg.name.empty())
    cfg.name = cfg.algorithm + "-" + cfg.environment.preset;

  // Validate preset overrides eagerly so a bad config never starts a run.
  make_environment(cfg.environment);
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return config_from_json(j, path);
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  j["environment"]["preset"] = cfg.environment.preset;
  j["environment"]["overrides"] = cfg.environment.overrides;
  j["algorithm"] = cfg.algorithm;
  j["iterations"] = cfg.iterations;
  j["seeds"] = cfg.seeds;
  j["discount"] = cfg.discount;
  j["exploration"] = cfg.exploration;
  j["lambda_max"] = cfg.lambda_max;
  j["smooth_delta"] = cfg.smooth_delta;
  j["mu"] = cfg.mu;
  j["gamma_exponent"] = cfg.schedules.fast;
  j["alpha_exponent"] = cfg.schedules.mid;
  j["beta_exponent"] = cfg.schedules.slow;
  j["thin_interval"] = cfg.thin_interval;
  j["qnr_inner_rounds"] = cfg.qnr_inner_rounds;
  j["observation_noise"] = cfg.observation_noise;
  if (!cfg.output_dir.empty()) j["output_dir"] = cfg.output_dir;
  return j;
}

std::unique_ptr<Game> make_environment(const EnvironmentChoice& env) {
  const std::string source = "environment";
  const json& ov = env.overrides.is_null() ? json::object() : env.overrides;
  if (env.preset == "uplink-paper")
    return std::make_unique<UplinkGame>(uplink_params(ov, source));
  if (env.preset == "downlink-paper")
    return std::make_unique<DownlinkGame>(downlink_params(ov, source));
  // The remaining presets are fixed fixtures and take no overrides.
  if (!ov.empty())
    throw ConfigError(source + ": preset '" + env.preset +
                      "' does not accept overrides");
  if (env.preset == "pd-repeated")
    return std::make_unique<TabularGame>(fixture_prisoners_dilemma());
  if (env.preset == "matching-pennies")
    return std::make_unique<TabularGame>(fixture_matching_pennies());
  if (env.preset == "chicken")
    return std::make_unique<TabularGame>(fixture_chicken());
  if (env.preset == "common-payoff")
    return std::make_unique<TabularGame>(fixture_common_payoff());
  if (env.preset == "dominant-strategy")
    return std::make_unique<TabularGame>(fixture_dominant_strategy());
  if (env.preset == "single-agent-mdp")
    return std::make_unique<TabularGame>(fixture_single_agent_mdp());
  if (env.preset == "two-agent-stochastic")
    return std::make_unique<TabularGame>(fixture_two_agent_stochastic());
  throw ConfigError(source + ": unknown preset '" + env.preset + "'");
}

std::string resolve_output_dir(const ExperimentConfig& cfg) {
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  if (const char* env = std::getenv("CELEARN_OUT_DIR"); env && *env)
    return env;
  return "runs";
}

}  // namespace celearn
