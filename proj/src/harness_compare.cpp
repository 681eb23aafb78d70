#include "celearn/harness.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <string_view>

#include "celearn/common.hpp"

namespace celearn {

namespace {

using nlohmann::json;

json seed_to_json(const SeedSummary& s) {
  json j;
  j["seed"] = s.seed;
  j["metrics_file"] = s.metrics_file;
  j["tail_welfare"] = s.tail_welfare;
  j["tail_utility"] = s.tail_utility;
  j["tail_cost"] = s.tail_cost;
  j["tail_lambda"] = s.tail_lambda;
  j["tail_max_pos_regret"] = s.tail_max_pos_regret;
  j["early_max_pos_regret"] = s.early_max_pos_regret;
  j["lyapunov_tail_blocks"] = s.lyapunov_tail_blocks;
  j["violating_agents"] = s.violating_agents;
  j["miscoordination_steps"] = s.miscoordination_steps;
  j["mu_doublings"] = s.mu_doublings;
  return j;
}

SeedSummary seed_from_json(const json& j, const std::string& source) {
  try {
    SeedSummary s;
    s.seed = j.at("seed").get<std::uint64_t>();
    s.metrics_file = j.at("metrics_file").get<std::string>();
    s.tail_welfare = j.at("tail_welfare").get<double>();
    s.tail_utility = j.at("tail_utility").get<std::vector<double>>();
    s.tail_cost = j.at("tail_cost").get<std::vector<double>>();
    s.tail_lambda = j.at("tail_lambda").get<std::vector<double>>();
    s.tail_max_pos_regret = j.at("tail_max_pos_regret").get<double>();
    s.early_max_pos_regret = j.at("early_max_pos_regret").get<double>();
    s.lyapunov_tail_blocks =
        j.at("lyapunov_tail_blocks").get<std::vector<double>>();
    s.violating_agents = j.at("violating_agents").get<std::vector<int>>();
    s.miscoordination_steps = j.at("miscoordination_steps").get<long long>();
    s.mu_doublings = j.at("mu_doublings").get<int>();
    return s;
  } catch (const json::exception& e) {
    throw ConfigError(source + ": malformed seed summary: " + e.what());
  }
}

}  // namespace

json summary_to_json(const RunSummary& s) {
  json j;
  j["config"] = config_to_json(s.config);
  j["num_agents"] = s.num_agents;
  j["tail_start"] = s.tail_start;
  j["cost_bounds"] = s.cost_bounds;
  json seeds = json::array();
  for (const auto& ss : s.seeds) seeds.push_back(seed_to_json(ss));
  j["seeds"] = seeds;
  j["aggregate"]["tail_welfare"] = s.tail_welfare;
  j["aggregate"]["tail_utility"] = s.tail_utility;
  j["aggregate"]["tail_cost"] = s.tail_cost;
  j["aggregate"]["tail_max_pos_regret"] = s.tail_max_pos_regret;
  j["aggregate"]["early_max_pos_regret"] = s.early_max_pos_regret;
  return j;
}

RunSummary summary_from_json(const json& j, const std::string& source) {
  RunSummary s;
  if (!j.is_object() || !j.contains("config"))
    throw ConfigError(source + ": not a run summary (missing 'config')");
  s.config = config_from_json(j.at("config"), source + ": config");
  try {
    s.num_agents = j.at("num_agents").get<int>();
    s.tail_start = j.at("tail_start").get<long long>();
    s.cost_bounds = j.at("cost_bounds").get<std::vector<double>>();
    for (const auto& ss : j.at("seeds"))
      s.seeds.push_back(seed_from_json(ss, source));
    const json& agg = j.at("aggregate");
    s.tail_welfare = agg.at("tail_welfare").get<double>();
    s.tail_utility = agg.at("tail_utility").get<std::vector<double>>();
    s.tail_cost = agg.at("tail_cost").get<std::vector<double>>();
    s.tail_max_pos_regret = agg.at("tail_max_pos_regret").get<double>();
    s.early_max_pos_regret = agg.at("early_max_pos_regret").get<double>();
  } catch (const json::exception& e) {
    throw ConfigError(source + ": malformed summary: " + e.what());
  }
  return s;
}

RunSummary load_summary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open summary file");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return summary_from_json(j, path);
}

std::vector<CompareRow> compare_runs(const std::vector<RunSummary>& summaries,
                                     double tolerance) {
  if (summaries.empty()) return {};
  const auto& first = summaries.front();
  for (const auto& s : summaries) {
    if (s.config.environment.preset != first.config.environment.preset)
      throw MismatchedConfigs(
          "compare_runs: presets differ ('" + s.config.environment.preset +
          "' vs '" + first.config.environment.preset + "')");
    if (s.config.iterations != first.config.iterations)
      throw MismatchedConfigs(
          "compare_runs: iteration budgets differ (" +
          std::to_string(s.config.iterations) + " vs " +
          std::to_string(first.config.iterations) + ")");
  }

  std::vector<CompareRow> rows;
  for (const auto& s : summaries) {
    CompareRow row;
    row.label = s.config.algorithm;
    if (!s.config.environment.overrides.empty())
      row.label += " " + s.config.environment.overrides.dump();
    row.num_seeds = static_cast<int>(s.seeds.size());
    row.tail_welfare = s.tail_welfare;
    row.worst_cost_gap = -1e300;
    for (std::size_t k = 0; k < s.cost_bounds.size(); ++k)
      row.worst_cost_gap =
          std::max(row.worst_cost_gap, s.tail_cost[k] - s.cost_bounds[k]);
    // A run violates when any seed's tail places any agent above bound +
    // tolerance, matching the per-seed flag semantics of the summary.
    for (const auto& ss : s.seeds)
      for (std::size_t k = 0; k < s.cost_bounds.size(); ++k)
        if (ss.tail_cost[k] > s.cost_bounds[k] + tolerance)
          row.violator = true;
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const CompareRow& a, const CompareRow& b) {
                     return a.tail_welfare > b.tail_welfare;
                   });
  return rows;
}

void print_comparison(const std::vector<CompareRow>& rows, std::ostream& out) {
  out << std::left << std::setw(44) << "run" << std::right << std::setw(14)
      << "tail_welfare" << std::setw(16) << "worst_cost_gap" << std::setw(10)
      << "violator" << std::setw(7) << "seeds" << "\n";
  for (const auto& r : rows) {
    out << std::left << std::setw(44) << r.label << std::right
        << std::setw(14) << std::setprecision(6) << std::fixed
        << r.tail_welfare << std::setw(16) << r.worst_cost_gap
        << std::setw(10) << (r.violator ? "YES" : "no") << std::setw(7)
        << r.num_seeds << "\n";
  }
  out.unsetf(std::ios::fixed);
}

void emit_plot_series(const std::string& metrics_path,
                      const std::string& quantity, int window,
                      std::ostream& out) {
  if (window < 1)
    throw ConfigError("plot-series: window must be >= 1");
  std::vector<MetricsRecord> rows = read_metrics(metrics_path);
  if (rows.empty()) throw IoError(metrics_path + ": no data rows");

  const int K = static_cast<int>(rows.front().utility.size());
  auto column = [&](const MetricsRecord& r) -> double {
    if (quantity == "welfare") {
      double s = 0.0;
      for (double u : r.utility) s += u;
      return s;
    }
    if (quantity == "max_pos_regret") return r.max_pos_regret;
    if (quantity == "lyapunov") return r.lyapunov;
    if (quantity == "miscoord") return r.miscoordination ? 1.0 : 0.0;
    for (int k = 0; k < K; ++k) {
      const std::string ks = std::to_string(k);
      if (quantity == "u" + ks) return r.utility[k];
      if (quantity == "cost" + ks) return r.cost[k];
      if (quantity == "lambda" + ks) return r.lambda[k];
      if (quantity == "mean_u" + ks) return r.mean_utility[k];
      if (quantity == "mean_cost" + ks) return r.mean_cost[k];
      if (quantity == "disc_u" + ks) return r.disc_utility[k];
      if (quantity == "disc_cost" + ks) return r.disc_cost[k];
      for (std::size_t a = 0; a < r.action_freq[k].size(); ++a)
        if (quantity == "freq" + ks + "_" + std::to_string(a))
          return r.action_freq[k][a];
    }
    throw UnknownQuantity("plot-series: no column named '" + quantity + "'");
  };

  std::vector<double> values;
  values.reserve(rows.size());
  for (const auto& r : rows) values.push_back(column(r));
  if (static_cast<std::size_t>(window) > values.size())
    throw ConfigError("plot-series: window exceeds the number of rows");

  char buf[32];
  out << "iteration," << quantity << "\n";
  // Full windows only, labeled by the centre row. The mean is anchored at the
  // window's first value so a constant series passes through bit-exactly.
  const std::size_t w = static_cast<std::size_t>(window);
  for (std::size_t i = 0; i + w <= values.size(); ++i) {
    double devsum = 0.0;
    for (std::size_t j = i + 1; j < i + w; ++j) devsum += values[j] - values[i];
    const double mean = values[i] + devsum / static_cast<double>(w);
    auto res = std::to_chars(buf, buf + sizeof buf, mean);
    out << rows[i + (w - 1) / 2].n << ','
        << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf))
        << "\n";
  }
}

}  // namespace celearn
