#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "celearn/game.hpp"
#include "celearn/schedules.hpp"

namespace celearn {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct EnvironmentChoice {
  std::string preset;           // uplink-paper, downlink-paper, fixtures...
  nlohmann::json overrides;     // field-by-field parameter replacements
};

struct ExperimentConfig {
  std::string name;             // output subdirectory; defaults to algorithm+preset
  EnvironmentChoice environment;
  std::string algorithm;        // cnrq | ceq-central | ceq-semi | qnr | regret-matching
  long long iterations = 0;
  std::vector<std::uint64_t> seeds;
  double discount = 0.5;        // rho
  double exploration = 0.05;    // epsilon tremble
  double lambda_max = 100.0;
  double smooth_delta = 1e-3;
  double mu = 0.0;              // inertia; <= 0 selects the bound-derived default
  StepSchedules schedules;
  long long thin_interval = 100;
  int qnr_inner_rounds = 200;
  double observation_noise = 0.0;  // ceq-semi only
  std::string output_dir;       // empty: $CELEARN_OUT_DIR or ./runs
};

// Parse and validate; every complaint names the offending field.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig config_from_json(const nlohmann::json& j,
                                  const std::string& source);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

// Instantiate the environment behind a config (preset + overrides).
std::unique_ptr<Game> make_environment(const EnvironmentChoice& env);

// Resolved output directory: explicit config value, else $CELEARN_OUT_DIR,
// else ./runs.
std::string resolve_output_dir(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

struct MetricsRecord {
  long long n = 0;
  int state = 0;
  int joint = 0;
  bool miscoordination = false;
  double max_pos_regret = 0.0;
  double lyapunov = 0.0;
  std::vector<double> utility, cost, lambda;
  std::vector<double> mean_utility, mean_cost;
  std::vector<double> disc_utility, disc_cost;
  std::vector<std::vector<double>> action_freq;  // [agent][action]
};

// Column layout: n,state,joint,miscoord,max_pos_regret,lyapunov, then per
// agent u{k},cost{k},lambda{k},mean_u{k},mean_cost{k},disc_u{k},disc_cost{k},
// then freq{k}_{a}. Doubles are written with shortest round-trip formatting,
// so parse(write(x)) == x and fixed seeds give byte-identical files.
std::string metrics_header(int num_agents, const std::vector<int>& action_counts);
void append_metrics_row(std::string& out, const MetricsRecord& r);
std::vector<MetricsRecord> read_metrics(const std::string& path);

// ---------------------------------------------------------------------------
// Experiment runner
// ---------------------------------------------------------------------------

struct SeedSummary {
  std::uint64_t seed = 0;
  std::string metrics_file;
  double tail_welfare = 0.0;
  std::vector<double> tail_utility, tail_cost, tail_lambda;
  double tail_max_pos_regret = 0.0;
  double early_max_pos_regret = 0.0;  // logged rows with 900 <= n <= 1100
  std::vector<double> lyapunov_tail_blocks;  // 5 block means across the tail
  std::vector<int> violating_agents;  // tail cost above bound
  long long miscoordination_steps = 0;
  int mu_doublings = 0;
};

struct RunSummary {
  ExperimentConfig config;
  int num_agents = 0;
  long long tail_start = 0;  // first iteration inside the last-10% window
  std::vector<double> cost_bounds;
  std::vector<SeedSummary> seeds;
  // Seed means.
  double tail_welfare = 0.0;
  std::vector<double> tail_utility, tail_cost;
  double tail_max_pos_regret = 0.0;
  double early_max_pos_regret = 0.0;
};

nlohmann::json summary_to_json(const RunSummary& s);
RunSummary summary_from_json(const nlohmann::json& j,
                             const std::string& source);
RunSummary load_summary(const std::string& path);

// Runs every seed sequentially, writes one metrics CSV per seed plus
// summary.json under <output_dir>/<name>/, and returns the summary.
// `log` receives one progress line per seed when non-null.
RunSummary run_experiment(const ExperimentConfig& cfg,
                          std::ostream* log = nullptr);

// ---------------------------------------------------------------------------
// Comparison and series extraction
// ---------------------------------------------------------------------------

struct CompareRow {
  std::string label;       // algorithm plus override suffix
  double tail_welfare = 0.0;
  double worst_cost_gap = 0.0;  // max over agents of tail cost - bound
  bool violator = false;        // any seed, any agent above bound + tolerance
  int num_seeds = 0;
};

// Rows sorted by tail welfare, best first. All summaries must share the
// environment preset and iteration budget; throws MismatchedConfigs.
std::vector<CompareRow> compare_runs(const std::vector<RunSummary>& summaries,
                                     double tolerance);
void print_comparison(const std::vector<CompareRow>& rows, std::ostream& out);

// Moving-average series of one metrics column ("welfare" sums the per-agent
// utility columns). Window w emits interior values only: n_out = n_in - w + 1
// rows, each labeled with the centre row's iteration. Throws UnknownQuantity.
void emit_plot_series(const std::string& metrics_path,
                      const std::string& quantity, int window,
                      std::ostream& out);

}  // namespace celearn
