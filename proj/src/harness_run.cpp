#include "celearn/harness.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>

#include "celearn/baselines.hpp"
#include "celearn/cnrq.hpp"
#include "celearn/common.hpp"
#include "celearn/envs.hpp"

namespace celearn {

namespace {

// Uniform driver interface over the four learner families so the run loop
// and the metrics schema stay identical across algorithms.
class AlgoAdapter {
 public:
  virtual ~AlgoAdapter() = default;
  virtual StepRecord step(Rng& rng) = 0;
  // Max positive CE residual of the current empirical play against the
  // algorithm's own value estimates.
  virtual double residual_metric() const = 0;
  virtual double lyapunov_metric() const = 0;
  virtual int mu_doublings() const { return 0; }
};

class CnrqAdapter : public AlgoAdapter {
 public:
  CnrqAdapter(const Game& game, const ExperimentConfig& cfg, Rng& rng)
      : run_(game, make_params(cfg), rng) {}

  StepRecord step(Rng& rng) override { return run_.step(rng); }
  double residual_metric() const override {
    return run_.residuals().max_positive();
  }
  double lyapunov_metric() const override { return run_.lyapunov(); }
  int mu_doublings() const override { return run_.mu_doublings(); }

 private:
  static CnrqParams make_params(const ExperimentConfig& cfg) {
    CnrqParams p;
    p.schedules = cfg.schedules;
    p.rho = cfg.discount;
    p.epsilon = cfg.exploration;
    p.lambda_max = cfg.lambda_max;
    p.smooth_delta = cfg.smooth_delta;
    p.mu = cfg.mu;
    return p;
  }
  CnrqRun run_;
};

// Tracks realized play frequencies per state; the CE-Q and regret-matching
// learners do not keep an empirical policy of their own.
class PlayFrequency {
 public:
  PlayFrequency(int num_states, int joint_count)
      : counts_(static_cast<std::size_t>(num_states) * joint_count, 0),
        visits_(num_states, 0),
        joints_(joint_count),
        states_(num_states) {}

  void record(int state, int joint) {
    ++counts_[static_cast<std::size_t>(state) * joints_ + joint];
    ++visits_[state];
  }

  JointPolicy policy() const {
    JointPolicy pi(states_, joints_);
    for (int s = 0; s < states_; ++s) {
      if (visits_[s] == 0) continue;  // zero row: no visits, no residual mass
      double inv = 1.0 / static_cast<double>(visits_[s]);
      double* row = pi.row(s);
      for (int a = 0; a < joints_; ++a)
        row[a] = static_cast<double>(
                     counts_[static_cast<std::size_t>(s) * joints_ + a]) *
                 inv;
    }
    return pi;
  }

 private:
  std::vector<long long> counts_;
  std::vector<long long> visits_;
  int joints_ = 0;
  int states_ = 0;
};

class CeqAdapter : public AlgoAdapter {
 public:
  CeqAdapter(const Game& game, const ExperimentConfig& cfg, Rng& rng)
      : game_(game),
        semi_(cfg.algorithm == "ceq-semi"),
        run_(game, make_params(cfg), rng),
        played_(game.num_states(), game.actions().joint_count()) {}

  StepRecord step(Rng& rng) override {
    StepRecord r = run_.step(rng);
    played_.record(r.state, r.joint);
    return r;
  }

  double residual_metric() const override {
    const int K = game_.actions().num_agents();
    std::vector<QTable> q;
    q.reserve(K);
    // Semi-distributed agents act on their own models; measure those.
    for (int k = 0; k < K; ++k) q.push_back(run_.model(owner(k), k));
    return ce_residuals(played_.policy(), game_.actions(), game_.num_states(),
                        q)
        .max_positive();
  }

  // CE-Q keeps no regret state; the Lyapunov diagnostic is CNRQ-specific.
  double lyapunov_metric() const override { return 0.0; }

 private:
  int owner(int agent) const { return semi_ ? agent : 0; }

  static CeqParams make_params(const ExperimentConfig& cfg) {
    CeqParams p;
    p.schedules = cfg.schedules;
    p.rho = cfg.discount;
    p.epsilon = cfg.exploration;
    p.lambda_max = cfg.lambda_max;
    p.semidistributed = cfg.algorithm == "ceq-semi";
    p.observation_noise = p.semidistributed ? cfg.observation_noise : 0.0;
    return p;
  }

  const Game& game_;
  bool semi_ = false;
  CeqRun run_;
  PlayFrequency played_;
};

class QnrAdapter : public AlgoAdapter {
 public:
  QnrAdapter(const Game& game, const ExperimentConfig& cfg, Rng& rng)
      : game_(game), run_(game, make_params(cfg), rng) {}

  StepRecord step(Rng& rng) override { return run_.step(rng); }

  double residual_metric() const override {
    const int K = game_.actions().num_agents();
    std::vector<QTable> q;
    q.reserve(K);
    for (int k = 0; k < K; ++k) q.push_back(run_.q(k));
    return ce_residuals(run_.empirical(), game_.actions(), game_.num_states(),
                        q)
        .max_positive();
  }

  // Inner-loop regrets are rebuilt from zero each iteration and discarded.
  double lyapunov_metric() const override { return 0.0; }

 private:
  static QnrParams make_params(const ExperimentConfig& cfg) {
    QnrParams p;
    p.schedules = cfg.schedules;
    p.rho = cfg.discount;
    p.epsilon = cfg.exploration;
    p.smooth_delta = cfg.smooth_delta;
    p.mu = cfg.mu;
    p.inner_rounds = cfg.qnr_inner_rounds;
    return p;
  }
  const Game& game_;
  QnrRun run_;
};

class RegretMatchingAdapter : public AlgoAdapter {
 public:
  RegretMatchingAdapter(const Game& game, const ExperimentConfig& cfg,
                        Rng& rng)
      : game_(game), played_(1, game.actions().joint_count()) {
    if (game.num_states() != 1)
      throw ConfigError(
          "algorithm: regret-matching needs a one-state environment; preset '" +
          game.name() + "' has " + std::to_string(game.num_states()) +
          " states");
    const auto& space = game.actions();
    const int K = space.num_agents();
    for (int k = 0; k < K; ++k) {
      SmoothMaxParams smooth;
      smooth.delta = cfg.smooth_delta;
      smooth.mu = cfg.mu > 0.0 ? cfg.mu : default_inertia(game, k, 0.0, 0.0);
      learners_.emplace_back(space.count(k), smooth, cfg.exploration);
      actions_.push_back(rng.below(space.count(k)));
    }
  }

  StepRecord step(Rng& rng) override {
    const auto& space = game_.actions();
    const int K = space.num_agents();
    StepRecord r;
    r.n = ++iter_;
    r.state = 0;
    r.joint = space.flatten(actions_);
    r.next_state = 0;
    r.utility.resize(K);
    r.cost.resize(K);
    r.lambda.assign(K, 0.0);
    played_.record(0, r.joint);
    for (int k = 0; k < K; ++k) {
      r.utility[k] = game_.utility(k, 0, r.joint);
      r.cost[k] = game_.cost(k, 0, r.joint);
    }
    std::vector<double> payoffs;
    for (int k = 0; k < K; ++k) {
      payoffs.resize(space.count(k));
      for (int j = 0; j < space.count(k); ++j)
        payoffs[j] = game_.utility(k, 0, space.replace(r.joint, k, j));
      actions_[k] =
          regret_matching_step(learners_[k], actions_[k], payoffs, rng);
    }
    return r;
  }

  double residual_metric() const override {
    const auto& space = game_.actions();
    const int K = space.num_agents();
    std::vector<QTable> q;
    q.reserve(K);
    for (int k = 0; k < K; ++k) {
      QTable t(1, space.joint_count());
      for (int a = 0; a < space.joint_count(); ++a)
        t.at(0, a) = game_.utility(k, 0, a);
      q.push_back(std::move(t));
    }
    return ce_residuals(played_.policy(), space, 1, q).max_positive();
  }

  double lyapunov_metric() const override {
    double sum = 0.0;
    for (const auto& l : learners_)
      sum += lyapunov_value(l.regrets(), l.smooth().delta);
    return sum;
  }

 private:
  const Game& game_;
  std::vector<NormalFormLearner> learners_;
  std::vector<int> actions_;
  long long iter_ = 0;
  PlayFrequency played_;
};

std::unique_ptr<AlgoAdapter> make_adapter(const Game& game,
                                          const ExperimentConfig& cfg,
                                          Rng& rng) {
  if (cfg.algorithm == "cnrq")
    return std::make_unique<CnrqAdapter>(game, cfg, rng);
  if (cfg.algorithm == "ceq-central" || cfg.algorithm == "ceq-semi")
    return std::make_unique<CeqAdapter>(game, cfg, rng);
  if (cfg.algorithm == "qnr")
    return std::make_unique<QnrAdapter>(game, cfg, rng);
  if (cfg.algorithm == "regret-matching")
    return std::make_unique<RegretMatchingAdapter>(game, cfg, rng);
  throw ConfigError("algorithm: unknown algorithm '" + cfg.algorithm + "'");
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& cfg, std::ostream* log) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::path(resolve_output_dir(cfg)) / cfg.name;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw IoError("cannot create output directory '" + dir.string() +
                  "': " + ec.message());

  RunSummary summary;
  summary.config = cfg;
  const long long tail_len = std::max<long long>(1, cfg.iterations / 10);
  summary.tail_start = cfg.iterations - tail_len + 1;

  for (std::uint64_t seed : cfg.seeds) {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(seed);
    std::unique_ptr<Game> game = make_environment(cfg.environment);
    const auto& space = game->actions();
    const int K = space.num_agents();
    if (summary.num_agents == 0) {
      summary.num_agents = K;
      summary.cost_bounds.resize(K);
      for (int k = 0; k < K; ++k) summary.cost_bounds[k] = game->cost_bound(k);
    }
    std::unique_ptr<AlgoAdapter> algo = make_adapter(*game, cfg, rng);

    // Running statistics, updated every iteration whether or not logged.
    std::vector<double> mean_u(K, 0.0), mean_c(K, 0.0);
    std::vector<double> disc_u(K, 0.0), disc_c(K, 0.0);
    std::vector<std::vector<long long>> act_counts(K);
    for (int k = 0; k < K; ++k) act_counts[k].assign(space.count(k), 0);
    long long miscoordinated = 0;

    std::string body = metrics_header(K, space.counts());
    std::vector<MetricsRecord> logged;

    for (long long n = 1; n <= cfg.iterations; ++n) {
      StepRecord rec = algo->step(rng);
      for (int k = 0; k < K; ++k) {
        mean_u[k] += (rec.utility[k] - mean_u[k]) / static_cast<double>(n);
        mean_c[k] += (rec.cost[k] - mean_c[k]) / static_cast<double>(n);
        disc_u[k] = cfg.discount * disc_u[k] +
                    (1.0 - cfg.discount) * rec.utility[k];
        disc_c[k] =
            cfg.discount * disc_c[k] + (1.0 - cfg.discount) * rec.cost[k];
        ++act_counts[k][space.component(rec.joint, k)];
      }
      if (rec.miscoordination) ++miscoordinated;

      const bool log_row = n <= 1000 || n % cfg.thin_interval == 0 ||
                           n == cfg.iterations;
      if (!log_row) continue;

      MetricsRecord row;
      row.n = n;
      row.state = rec.state;
      row.joint = rec.joint;
      row.miscoordination = rec.miscoordination;
      row.max_pos_regret = algo->residual_metric();
      row.lyapunov = algo->lyapunov_metric();
      row.utility = rec.utility;
      row.cost = rec.cost;
      row.lambda = rec.lambda;
      row.mean_utility = mean_u;
      row.mean_cost = mean_c;
      row.disc_utility = disc_u;
      row.disc_cost = disc_c;
      row.action_freq.resize(K);
      for (int k = 0; k < K; ++k) {
        row.action_freq[k].resize(space.count(k));
        for (int a = 0; a < space.count(k); ++a)
          row.action_freq[k][a] =
              static_cast<double>(act_counts[k][a]) / static_cast<double>(n);
      }
      append_metrics_row(body, row);
      logged.push_back(std::move(row));
    }

    const std::string fname = "metrics_seed" + std::to_string(seed) + ".csv";
    {
      std::ofstream out(dir / fname, std::ios::binary);
      if (!out) throw IoError("cannot write '" + (dir / fname).string() + "'");
      out << body;
    }

    // Seed summary from the logged rows, so the stored aggregates are exactly
    // recomputable from the file.
    SeedSummary ss;
    ss.seed = seed;
    ss.metrics_file = (dir / fname).string();
    ss.miscoordination_steps = miscoordinated;
    ss.mu_doublings = algo->mu_doublings();
    ss.tail_utility.assign(K, 0.0);
    ss.tail_cost.assign(K, 0.0);
    ss.tail_lambda.assign(K, 0.0);
    long long tail_rows = 0;
    for (const auto& row : logged) {
      if (row.n < summary.tail_start) continue;
      ++tail_rows;
      for (int k = 0; k < K; ++k) {
        ss.tail_utility[k] += row.utility[k];
        ss.tail_cost[k] += row.cost[k];
        ss.tail_lambda[k] += row.lambda[k];
      }
      ss.tail_max_pos_regret += row.max_pos_regret;
    }
    if (tail_rows > 0) {
      for (int k = 0; k < K; ++k) {
        ss.tail_utility[k] /= static_cast<double>(tail_rows);
        ss.tail_cost[k] /= static_cast<double>(tail_rows);
        ss.tail_lambda[k] /= static_cast<double>(tail_rows);
      }
      ss.tail_max_pos_regret /= static_cast<double>(tail_rows);
    }
    for (int k = 0; k < K; ++k) {
      ss.tail_welfare += ss.tail_utility[k];
      if (ss.tail_cost[k] > game->cost_bound(k)) ss.violating_agents.push_back(k);
    }

    // Early residual level, for convergence-ratio diagnostics.
    double early = 0.0;
    long long early_rows = 0;
    for (const auto& row : logged) {
      if (row.n < 900 || row.n > 1100) continue;
      early += row.max_pos_regret;
      ++early_rows;
    }
    if (early_rows == 0) {
      early = logged.empty() ? 0.0 : logged.front().max_pos_regret;
      early_rows = logged.empty() ? 0 : 1;
    }
    ss.early_max_pos_regret =
        early_rows > 0 ? early / static_cast<double>(early_rows) : 0.0;

    // Five contiguous block means of the Lyapunov value across the tail.
    std::vector<const MetricsRecord*> tail;
    for (const auto& row : logged)
      if (row.n >= summary.tail_start) tail.push_back(&row);
    const int blocks = std::min<int>(5, static_cast<int>(tail.size()));
    for (int b = 0; b < blocks; ++b) {
      std::size_t lo = tail.size() * b / blocks;
      std::size_t hi = tail.size() * (b + 1) / blocks;
      double sum = 0.0;
      for (std::size_t i = lo; i < hi; ++i) sum += tail[i]->lyapunov;
      ss.lyapunov_tail_blocks.push_back(sum /
                                        static_cast<double>(hi - lo));
    }

    summary.seeds.push_back(std::move(ss));
    if (log) {
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
      (*log) << cfg.name << ": seed " << seed << " finished "
             << cfg.iterations << " iterations in " << secs << " s\n";
      log->flush();
    }
  }

  // Seed means.
  const double ns = static_cast<double>(summary.seeds.size());
  summary.tail_utility.assign(summary.num_agents, 0.0);
  summary.tail_cost.assign(summary.num_agents, 0.0);
  for (const auto& ss : summary.seeds) {
    summary.tail_welfare += ss.tail_welfare / ns;
    summary.tail_max_pos_regret += ss.tail_max_pos_regret / ns;
    summary.early_max_pos_regret += ss.early_max_pos_regret / ns;
    for (int k = 0; k < summary.num_agents; ++k) {
      summary.tail_utility[k] += ss.tail_utility[k] / ns;
      summary.tail_cost[k] += ss.tail_cost[k] / ns;
    }
  }

  std::ofstream out(dir / "summary.json", std::ios::binary);
  if (!out)
    throw IoError("cannot write '" + (dir / "summary.json").string() + "'");
  out << summary_to_json(summary).dump(2) << "\n";
  return summary;
}

}  // namespace celearn
