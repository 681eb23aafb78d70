#include "celearn/oracle.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace celearn {

ExplicitModel explicit_model(const TabularGame& game,
                             const std::vector<double>& lambda, double rho) {
  const JointActionSpace& space = game.actions();
  if (static_cast<int>(lambda.size()) != space.num_agents())
    throw DimensionMismatch("explicit_model: one multiplier per agent");
  ExplicitModel m;
  m.space = space;
  m.num_states = game.num_states();
  m.rho = rho;
  int S = m.num_states;
  int A = space.joint_count();
  m.transition.resize(static_cast<std::size_t>(S) * A * S);
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a)
      for (int t = 0; t < S; ++t)
        m.transition[(static_cast<std::size_t>(s) * A + a) * S + t] =
            game.transition_prob(s, a, t);
  m.payoff.assign(space.num_agents(),
                  std::vector<double>(static_cast<std::size_t>(S) * A));
  for (int k = 0; k < space.num_agents(); ++k)
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a)
        m.payoff[k][static_cast<std::size_t>(s) * A + a] =
            instantaneous_lagrangian(game, k, lambda[k], s, a);
  return m;
}

PolicyValues exact_policy_evaluation(const ExplicitModel& m,
                                     const JointPolicy& pi, int agent) {
  int S = m.num_states;
  int A = m.space.joint_count();
  if (pi.num_states() != S || pi.joint_count() != A)
    throw DimensionMismatch("exact_policy_evaluation: policy shape mismatch");

  Eigen::MatrixXd P_pi = Eigen::MatrixXd::Zero(S, S);
  Eigen::VectorXd r_pi = Eigen::VectorXd::Zero(S);
  for (int s = 0; s < S; ++s) {
    const double* row = pi.row(s);
    double mass = 0.0;
    for (int a = 0; a < A; ++a) {
      mass += row[a];
      if (row[a] == 0.0) continue;
      r_pi(s) += row[a] * m.r(agent, s, a);
      for (int t = 0; t < S; ++t) P_pi(s, t) += row[a] * m.P(s, a, t);
    }
    if (std::abs(mass - 1.0) > 1e-9)
      throw MalformedTables(
          "exact_policy_evaluation: policy row is not normalized");
  }

  Eigen::MatrixXd lhs =
      Eigen::MatrixXd::Identity(S, S) - m.rho * P_pi;
  Eigen::VectorXd rhs = (1.0 - m.rho) * r_pi;
  Eigen::VectorXd L = lhs.fullPivLu().solve(rhs);
  if ((lhs * L - rhs).lpNorm<Eigen::Infinity>() > 1e-10)
    throw SingularSystem("exact_policy_evaluation: residual too large");

  PolicyValues out;
  out.L.assign(L.data(), L.data() + S);
  out.Q.resize(static_cast<std::size_t>(S) * A);
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) {
      double future = 0.0;
      for (int t = 0; t < S; ++t) future += m.P(s, a, t) * out.L[t];
      out.Q[static_cast<std::size_t>(s) * A + a] =
          (1.0 - m.rho) * m.r(agent, s, a) + m.rho * future;
    }
  return out;
}

ViResult value_iteration(const ExplicitModel& m, int agent, double tol,
                         int max_sweeps) {
  int S = m.num_states;
  int A = m.space.joint_count();
  ViResult out;
  out.V.assign(S, 0.0);
  out.greedy.assign(S, 0);
  std::vector<double> next(S, 0.0);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double diff = 0.0;
    for (int s = 0; s < S; ++s) {
      double best = -1e300;
      int arg = 0;
      for (int a = 0; a < A; ++a) {
        double future = 0.0;
        for (int t = 0; t < S; ++t) future += m.P(s, a, t) * out.V[t];
        double v = (1.0 - m.rho) * m.r(agent, s, a) + m.rho * future;
        if (v > best) {
          best = v;
          arg = a;
        }
      }
      next[s] = best;
      out.greedy[s] = arg;
      diff = std::max(diff, std::abs(next[s] - out.V[s]));
    }
    out.V = next;
    out.sweeps = sweep + 1;
    if (diff <= tol * std::max(1.0 - m.rho, 1e-6)) break;
  }
  return out;
}

namespace {

// Deviation rows of the CE polytope: one per (agent, recommended i,
// deviation j != i), coefficients over joint actions.
struct CeRows {
  std::vector<std::vector<double>> rows;
};

CeRows ce_polytope_rows(const JointActionSpace& space,
                        const std::vector<std::vector<double>>& payoff) {
  CeRows out;
  int A = space.joint_count();
  for (int k = 0; k < space.num_agents(); ++k) {
    int nk = space.count(k);
    for (int i = 0; i < nk; ++i)
      for (int j = 0; j < nk; ++j) {
        if (j == i) continue;
        std::vector<double> row(A, 0.0);
        for (int a = 0; a < A; ++a) {
          if (space.component(a, k) != i) continue;
          row[a] = payoff[k][space.replace(a, k, j)] - payoff[k][a];
        }
        out.rows.push_back(std::move(row));
      }
  }
  return out;
}

// Advances `combo` to the next k-subset of {0..n-1}; false when exhausted.
bool next_combination(std::vector<int>& combo, int n) {
  int k = static_cast<int>(combo.size());
  for (int i = k - 1; i >= 0; --i) {
    if (combo[i] < n - (k - i)) {
      ++combo[i];
      for (int j = i + 1; j < k; ++j) combo[j] = combo[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

std::vector<std::vector<double>> ce_vertex_enumerate(
    const JointActionSpace& space,
    const std::vector<std::vector<double>>& payoff, double tol) {
  int A = space.joint_count();
  if (A > 16)
    throw TooLarge("ce_vertex_enumerate: capped at 16 joint actions");
  if (static_cast<int>(payoff.size()) != space.num_agents())
    throw DimensionMismatch("ce_vertex_enumerate: one payoff row per agent");
  for (const auto& p : payoff)
    if (static_cast<int>(p.size()) != A)
      throw DimensionMismatch("ce_vertex_enumerate: payoff length mismatch");

  CeRows ce = ce_polytope_rows(space, payoff);
  int m = static_cast<int>(ce.rows.size());

  std::vector<std::vector<double>> vertices;
  std::vector<double> full(A, 0.0);

  auto try_basis = [&](const std::vector<int>& support,
                       const std::vector<int>& tight) {
    int p = static_cast<int>(support.size());
    // Square system: tight rows restricted to the support + normalization.
    Eigen::MatrixXd B(p, p);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p);
    for (int t = 0; t < p - 1; ++t)
      for (int c = 0; c < p; ++c) B(t, c) = ce.rows[tight[t]][support[c]];
    for (int c = 0; c < p; ++c) B(p - 1, c) = 1.0;
    rhs(p - 1) = 1.0;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
    if (!lu.isInvertible()) return;
    Eigen::VectorXd x = lu.solve(rhs);
    for (int c = 0; c < p; ++c)
      if (x(c) < -1e-9) return;

    std::fill(full.begin(), full.end(), 0.0);
    for (int c = 0; c < p; ++c) full[support[c]] = std::max(x(c), 0.0);
    for (int r = 0; r < m; ++r) {
      double v = 0.0;
      for (int c = 0; c < p; ++c) v += ce.rows[r][support[c]] * full[support[c]];
      if (v > 1e-9) return;
    }
    for (const auto& seen : vertices) {
      double d = 0.0;
      for (int a = 0; a < A; ++a) d = std::max(d, std::abs(seen[a] - full[a]));
      if (d <= tol) return;
    }
    vertices.push_back(full);
  };

  int max_support = std::min(A, m + 1);
  for (int p = 1; p <= max_support; ++p) {
    std::vector<int> support(p);
    for (int i = 0; i < p; ++i) support[i] = i;
    do {
      // Rows identically zero on this support can never pivot; skip them.
      std::vector<int> active;
      for (int r = 0; r < m; ++r)
        for (int c : support)
          if (ce.rows[r][c] != 0.0) {
            active.push_back(r);
            break;
          }
      if (static_cast<int>(active.size()) < p - 1) continue;
      if (p == 1) {
        try_basis(support, {});
      } else {
        std::vector<int> pick(p - 1);
        for (int i = 0; i < p - 1; ++i) pick[i] = i;
        do {
          std::vector<int> tight(p - 1);
          for (int i = 0; i < p - 1; ++i) tight[i] = active[pick[i]];
          try_basis(support, tight);
        } while (next_combination(pick, static_cast<int>(active.size())));
      }
    } while (next_combination(support, A));
  }
  return vertices;
}

std::vector<double> exact_stationary(const std::vector<double>& T, int n,
                                     double eps) {
  if (static_cast<int>(T.size()) != n * n)
    throw DimensionMismatch("exact_stationary: matrix size mismatch");
  double u = eps / n;
  Eigen::MatrixXd Tt(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      Tt(j, i) = (1.0 - eps) * T[static_cast<std::size_t>(i) * n + j] + u;

  Eigen::MatrixXd Asys = Eigen::MatrixXd::Identity(n, n) - Tt +
                         Eigen::MatrixXd::Ones(n, n);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(Asys);
  if (!lu.isInvertible())
    throw Reducible("exact_stationary: stationary distribution not unique");
  Eigen::VectorXd p = lu.solve(Eigen::VectorXd::Ones(n));
  if ((Tt * p - p).lpNorm<Eigen::Infinity>() > 1e-10)
    throw Reducible("exact_stationary: balance residual too large");
  for (int i = 0; i < n; ++i)
    if (p(i) < -1e-12)
      throw Reducible("exact_stationary: negative stationary mass");
  return std::vector<double>(p.data(), p.data() + n);
}

}  // namespace celearn
