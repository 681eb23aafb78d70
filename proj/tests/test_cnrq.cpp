#include <doctest.h>

#include <cmath>
#include <vector>

#include "celearn/cnrq.hpp"
#include "celearn/common.hpp"
#include "celearn/envs.hpp"

using namespace celearn;

namespace {

// Schedules whose fast exponent is 1 so that gamma(2) = 0.5 exactly; handy
// for worked single-update arithmetic. Never passed through validate().
StepSchedules unit_fast() {
  StepSchedules s;
  s.fast = 1.0;
  return s;
}

}  // namespace

TEST_CASE("empirical update is a convex step toward the played vertex") {
  StepSchedules sched = unit_fast();
  JointPolicy pi(2, 2);
  pi.at(0, 0) = 0.5;
  pi.at(0, 1) = 0.5;
  pi.at(1, 0) = 0.3;
  pi.at(1, 1) = 0.7;
  std::vector<long long> visits = {2, 5};  // gamma(2) = 0.5 with exponent 1

  update_empirical(pi, visits, 0, 0, sched);
  CHECK(pi.at(0, 0) == doctest::Approx(0.75));
  CHECK(pi.at(0, 1) == doctest::Approx(0.25));
  CHECK(visits[0] == 3);
  // Unvisited state is untouched.
  CHECK(pi.at(1, 0) == 0.3);
  CHECK(pi.at(1, 1) == 0.7);
  CHECK(visits[1] == 5);
}

TEST_CASE("first visit lands the all-zero row exactly on a vertex") {
  StepSchedules sched;
  JointPolicy pi(1, 4);
  std::vector<long long> visits = {0};
  update_empirical(pi, visits, 0, 2, sched);
  CHECK(pi.at(0, 0) == 0.0);
  CHECK(pi.at(0, 1) == 0.0);
  CHECK(pi.at(0, 2) == 1.0);
  CHECK(pi.at(0, 3) == 0.0);
}

TEST_CASE("long-term value is the policy-weighted q row") {
  JointPolicy pi(2, 2);
  QTable q(2, 2);
  q.at(0, 0) = 4.0;
  q.at(0, 1) = 8.0;
  q.at(1, 0) = 3.2;
  q.at(1, 1) = -5.0;

  // Unvisited all-zero row contributes 0 by convention.
  CHECK(long_term_lagrangian(pi, q, 0) == 0.0);

  pi.at(0, 0) = 0.25;
  pi.at(0, 1) = 0.75;
  CHECK(long_term_lagrangian(pi, q, 0) == doctest::Approx(7.0));

  pi.at(1, 0) = 1.0;
  CHECK(long_term_lagrangian(pi, q, 1) == doctest::Approx(3.2));
}

TEST_CASE("q update arithmetic") {
  QTable q(1, 2);
  q.at(0, 0) = 2.0;
  q.at(0, 1) = 9.0;
  update_q(q, 0, 0, /*ell=*/4.0, /*next_value=*/6.0, /*alpha=*/0.5,
           /*rho=*/0.5);
  // 2 + 0.5 * (0.5*4 + 0.5*6 - 2) = 3.5
  CHECK(q.at(0, 0) == doctest::Approx(3.5));
  CHECK(q.at(0, 1) == 9.0);  // unvisited pair untouched

  // Full myopic step overwrites with the instantaneous value.
  update_q(q, 0, 1, 1.25, 100.0, 1.0, 0.0);
  CHECK(q.at(0, 1) == doctest::Approx(1.25));
}

TEST_CASE("multiplier ascent is projected onto its box") {
  // Zero slack leaves the multiplier alone.
  CHECK(update_lambda(0.7, 0.5, 0.5, 0.1, 100.0) == doctest::Approx(0.7));
  // Negative slack at the lower bound stays projected at zero.
  CHECK(update_lambda(0.0, 0.2, 0.5, 0.1, 100.0) == 0.0);
  // Worked step: 0.5 + 0.1 * 1 = 0.6.
  CHECK(update_lambda(0.5, 1.5, 0.5, 0.1, 100.0) == doctest::Approx(0.6));
  // Upper projection.
  CHECK(update_lambda(99.95, 2.0, 0.5, 0.1, 100.0) == 100.0);
}

TEST_CASE("regret update moves the played row and decays the rest") {
  JointActionSpace sp({2, 2});
  QTable q(1, 4);
  // Own action 0 vs 1 against opponent action 0: differential 3.
  q.at(0, sp.flatten({0, 0})) = 1.0;
  q.at(0, sp.flatten({1, 0})) = 4.0;

  RegretTable r(1, 2);
  r.at(0, 0, 1) = 1.0;
  r.at(0, 1, 0) = 2.0;
  update_regret(r, sp, /*agent=*/0, q, /*state=*/0,
                /*joint=*/sp.flatten({0, 0}), /*gamma=*/0.5);
  // Played row: 1 + 0.5 * (3 - 1) = 2.
  CHECK(r.at(0, 0, 1) == doctest::Approx(2.0));
  // Unplayed row decays: 2 + 0.5 * (0 - 2) = 1.
  CHECK(r.at(0, 1, 0) == doctest::Approx(1.0));
  CHECK(r.at(0, 0, 0) == 0.0);
  CHECK(r.at(0, 1, 1) == 0.0);

  SUBCASE("full step from zero lands on the differential") {
    RegretTable fresh(1, 2);
    update_regret(fresh, sp, 0, q, 0, sp.flatten({0, 0}), 1.0);
    CHECK(fresh.at(0, 0, 1) == doctest::Approx(3.0));
  }

  SUBCASE("zero differential is pure decay") {
    QTable flat(1, 4);
    for (int a = 0; a < 4; ++a) flat.at(0, a) = 2.5;
    RegretTable rr(1, 2);
    rr.at(0, 0, 1) = 1.6;
    update_regret(rr, sp, 0, flat, 0, sp.flatten({0, 0}), 0.25);
    CHECK(rr.at(0, 0, 1) == doctest::Approx(1.2));
  }
}

TEST_CASE("default inertia follows the declared bound") {
  TabularGame g = fixture_two_agent_stochastic();
  Interval u = g.utility_range();
  Interval c = g.cost_range();
  double bound = g.cost_bound(0);
  double dev = std::max(c.hi - bound, bound - c.lo);
  double expect =
      2.0 * g.actions().count(0) * (u.abs_max() + 100.0 * dev) / (1.0 - 0.5);
  CHECK(default_inertia(g, 0, 100.0, 0.5) == doctest::Approx(expect));
}

TEST_CASE("full runs are deterministic and keep their invariants") {
  TabularGame g = fixture_two_agent_stochastic();
  CnrqParams params;
  params.epsilon = 0.05;

  Rng rng_a(7), rng_b(7);
  CnrqRun a(g, params, rng_a), b(g, params, rng_b);
  for (int t = 0; t < 500; ++t) {
    StepRecord ra = a.step(rng_a), rb = b.step(rng_b);
    CHECK(ra.state == rb.state);
    CHECK(ra.joint == rb.joint);
    CHECK(ra.next_state == rb.next_state);
    REQUIRE(ra.lambda.size() == rb.lambda.size());
    for (std::size_t k = 0; k < ra.lambda.size(); ++k) {
      CHECK(ra.lambda[k] == rb.lambda[k]);
      CHECK(ra.lambda[k] >= 0.0);
      CHECK(ra.lambda[k] <= params.lambda_max);
      CHECK(ra.utility[k] == rb.utility[k]);
    }
  }

  // Visited empirical rows are simplex points; regret diagonals stay 0.
  const JointPolicy& pi = a.empirical();
  for (int s = 0; s < g.num_states(); ++s) {
    double tot = 0.0;
    bool touched = false;
    for (int j = 0; j < g.actions().joint_count(); ++j) {
      CHECK(pi.at(s, j) >= 0.0);
      CHECK(pi.at(s, j) <= 1.0 + 1e-12);
      tot += pi.at(s, j);
      touched = touched || pi.at(s, j) != 0.0;
    }
    if (touched) CHECK(tot == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (int k = 0; k < g.num_agents(); ++k)
    for (int s = 0; s < g.num_states(); ++s)
      for (int i = 0; i < g.actions().count(k); ++i)
        CHECK(a.regrets(k).at(s, i, i) == 0.0);
}

TEST_CASE("degenerate single-action chain converges to the lagrangian") {
  // One agent, one state, one action: the update contracts toward
  // Q = (1-rho) ell + rho Q, whose fixed point is ell itself. With zero cost
  // and positive slack the multiplier stays at 0, so ell = u = 2.
  TabularSpec spec;
  spec.action_counts = {1};
  spec.num_states = 1;
  spec.transition = {1.0};
  spec.utility = {{2.0}};
  spec.cost = {{0.0}};
  spec.cost_bounds = {1.0};
  TabularGame g(std::move(spec));

  CnrqParams params;
  Rng rng(1);
  CnrqRun run(g, params, rng);
  for (int t = 0; t < 4000; ++t) run.step(rng);
  CHECK(run.lambda(0) == 0.0);
  CHECK(run.q(0).at(0, 0) == doctest::Approx(2.0).epsilon(1e-3));
}
