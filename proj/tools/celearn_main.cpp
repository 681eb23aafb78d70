#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "celearn/common.hpp"
#include "celearn/harness.hpp"

namespace {

// 0 success, 2 bad configuration or arguments, 3 runtime failure.
constexpr int kConfigExit = 2;
constexpr int kRuntimeExit = 3;

std::vector<std::uint64_t> parse_seed_list(const std::string& csv) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty())
      throw celearn::ConfigError("--seed-override: empty seed entry");
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(tok, &used);
    } catch (const std::exception&) {
      throw celearn::ConfigError("--seed-override: '" + tok +
                                 "' is not an integer");
    }
    if (used != tok.size())
      throw celearn::ConfigError("--seed-override: '" + tok +
                                 "' is not an integer");
    seeds.push_back(v);
  }
  if (seeds.empty())
    throw celearn::ConfigError("--seed-override: no seeds given");
  return seeds;
}

int run_verb(const std::string& config_path, const std::string& seed_override,
             const std::string& out_dir) {
  celearn::ExperimentConfig cfg = celearn::parse_config(config_path);
  if (!seed_override.empty()) cfg.seeds = parse_seed_list(seed_override);
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  celearn::RunSummary summary = celearn::run_experiment(cfg, &std::cerr);

  std::cout << "wrote " << celearn::resolve_output_dir(cfg) << "/" << cfg.name
            << "/summary.json\n";
  std::cout << "tail welfare (seed mean): " << summary.tail_welfare << "\n";
  for (int k = 0; k < summary.num_agents; ++k) {
    std::cout << "agent " << k << ": tail cost " << summary.tail_cost[k]
              << " (bound " << summary.cost_bounds[k] << ")\n";
  }
  std::cout << "tail max positive regret: " << summary.tail_max_pos_regret
            << "\n";
  return 0;
}

int compare_verb(const std::vector<std::string>& paths, double tolerance) {
  std::vector<celearn::RunSummary> summaries;
  summaries.reserve(paths.size());
  for (const auto& p : paths) summaries.push_back(celearn::load_summary(p));
  auto rows = celearn::compare_runs(summaries, tolerance);
  celearn::print_comparison(rows, std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained no-regret learning experiment runner"};
  app.require_subcommand(1);

  std::string config_path, seed_override, out_dir;
  auto* run = app.add_subcommand("run", "execute a configured experiment");
  run->add_option("--config", config_path, "experiment config (JSON)")
      ->required();
  run->add_option("--seed-override", seed_override,
                  "comma-separated seed list replacing the config's");
  run->add_option("--out", out_dir, "output directory root");

  std::vector<std::string> summary_paths;
  double tolerance = 0.0;
  auto* cmp = app.add_subcommand(
      "compare", "tabulate welfare and constraint gaps across summaries");
  cmp->add_option("paths", summary_paths, "summary.json files")
      ->required()
      ->expected(-1);
  cmp->add_option("--tolerance", tolerance,
                  "slack added to each cost bound before flagging violators");

  std::string metrics_path, quantity;
  int window = 1;
  auto* plot = app.add_subcommand(
      "plot-series", "emit a smoothed (iteration, value) column to stdout");
  plot->add_option("--metrics", metrics_path, "per-seed metrics CSV")
      ->required();
  plot->add_option("--quantity", quantity,
                   "column name, or 'welfare' for the utility sum")
      ->required();
  plot->add_option("--window", window, "moving-average width (default 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  try {
    if (run->parsed()) return run_verb(config_path, seed_override, out_dir);
    if (cmp->parsed()) return compare_verb(summary_paths, tolerance);
    celearn::emit_plot_series(metrics_path, quantity, window, std::cout);
    return 0;
  } catch (const celearn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const celearn::UnknownQuantity& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const celearn::MismatchedConfigs& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeExit;
  }
}
