#include <doctest.h>

#include <cmath>
#include <vector>

#include "celearn/common.hpp"
#include "celearn/envs.hpp"
#include "celearn/game.hpp"

using namespace celearn;

TEST_CASE("joint action flattening round-trips and strides are row-major") {
  JointActionSpace sp({2, 3, 2});
  CHECK(sp.num_agents() == 3);
  CHECK(sp.joint_count() == 12);
  CHECK(sp.count(1) == 3);
  // Last agent varies fastest: (a0, a1, a2) -> ((a0*3)+a1)*2 + a2.
  CHECK(sp.flatten({1, 2, 0}) == 10);
  CHECK(sp.unflatten(10) == std::vector<int>{1, 2, 0});
  for (int j = 0; j < sp.joint_count(); ++j) {
    CHECK(sp.flatten(sp.unflatten(j)) == j);
    for (int k = 0; k < sp.num_agents(); ++k) {
      CHECK(sp.component(j, k) == sp.unflatten(j)[k]);
      CHECK(sp.replace(j, k, sp.component(j, k)) == j);
      // compose/opponents_index invert each other around any own action.
      int opp = sp.opponents_index(j, k);
      CHECK(sp.compose(k, sp.component(j, k), opp) == j);
      for (int a = 0; a < sp.count(k); ++a)
        CHECK(sp.opponents_index(sp.compose(k, a, opp), k) == opp);
    }
  }
  CHECK(sp.opponents_count(1) == 4);
}

TEST_CASE("conditional policy under uniform and degenerate distributions") {
  JointActionSpace sp({2, 2});
  JointPolicy pi(1, 4);
  for (int a = 0; a < 4; ++a) pi.at(0, a) = 0.25;
  auto cond = conditional_policy(pi, sp, 0, 0, 0);
  REQUIRE(cond.size() == 2);
  CHECK(cond[0] == doctest::Approx(0.5));
  CHECK(cond[1] == doctest::Approx(0.5));

  JointPolicy point(1, 4);
  point.at(0, sp.flatten({0, 0})) = 1.0;
  auto degen = conditional_policy(point, sp, 0, 0, 0);
  CHECK(degen[0] == doctest::Approx(1.0));
  CHECK(degen[1] == doctest::Approx(0.0));
}

TEST_CASE("conditional policy arithmetic on a non-uniform 2x2 row") {
  JointActionSpace sp({2, 2});
  JointPolicy pi(1, 4);
  pi.at(0, sp.flatten({0, 0})) = 0.2;
  pi.at(0, sp.flatten({0, 1})) = 0.3;
  pi.at(0, sp.flatten({1, 0})) = 0.25;
  pi.at(0, sp.flatten({1, 1})) = 0.25;
  auto cond = conditional_policy(pi, sp, 0, 0, 0);
  CHECK(cond[0] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(cond[1] == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("conditional policy rejects zero-mass recommendations") {
  JointActionSpace sp({2, 2});
  JointPolicy pi(1, 4);
  pi.at(0, sp.flatten({1, 0})) = 0.5;
  pi.at(0, sp.flatten({1, 1})) = 0.5;
  CHECK_THROWS_AS(conditional_policy(pi, sp, 0, 0, 0), ZeroMarginal);
}

namespace {

// Prisoner's dilemma as stage payoffs loaded directly into Q-tables
// (action 0 cooperate, action 1 defect; temptation 5, reward 3, punishment 1,
// sucker 0).
std::vector<QTable> pd_q(const JointActionSpace& sp) {
  std::vector<QTable> q(2, QTable(1, 4));
  auto set = [&](int a0, int a1, double u0, double u1) {
    q[0].at(0, sp.flatten({a0, a1})) = u0;
    q[1].at(0, sp.flatten({a0, a1})) = u1;
  };
  set(0, 0, 3, 3);
  set(0, 1, 0, 5);
  set(1, 0, 5, 0);
  set(1, 1, 1, 1);
  return q;
}

}  // namespace

TEST_CASE("mutual defection is a correlated equilibrium of the dilemma") {
  JointActionSpace sp({2, 2});
  JointPolicy pi(1, 4);
  pi.at(0, sp.flatten({1, 1})) = 1.0;
  auto res = ce_residuals(pi, sp, 1, pd_q(sp));
  CHECK(res.max_positive() == 0.0);
  // Deviating from defect to cooperate against a defector loses exactly 1.
  CHECK(res.at(0, 0, 1, 0) == doctest::Approx(-1.0));
  // Zero-marginal recommendation (cooperate) contributes nothing.
  CHECK(res.at(0, 0, 0, 1) == 0.0);
}

TEST_CASE("mutual cooperation exposes a profitable defection") {
  JointActionSpace sp({2, 2});
  JointPolicy pi(1, 4);
  pi.at(0, sp.flatten({0, 0})) = 1.0;
  auto res = ce_residuals(pi, sp, 1, pd_q(sp));
  CHECK(res.at(0, 0, 0, 1) == doctest::Approx(2.0));  // 5 - 3
  CHECK(res.max_positive() == doctest::Approx(2.0));
  CHECK(max_positive_regret(res) == doctest::Approx(2.0));
}

TEST_CASE("single-action games have no deviations at all") {
  JointActionSpace sp({1, 1});
  JointPolicy pi(1, 1);
  pi.at(0, 0) = 1.0;
  std::vector<QTable> q(2, QTable(1, 1));
  q[0].at(0, 0) = 7.0;
  auto res = ce_residuals(pi, sp, 1, q);
  CHECK(res.max_positive() == 0.0);
}

TEST_CASE("residuals are linear in the q tables and zero on diagonals") {
  Rng rng(42);
  for (int trial = 0; trial < 25; ++trial) {
    JointActionSpace sp({2, 3});
    JointPolicy pi(2, 6);
    for (int s = 0; s < 2; ++s) {
      double tot = 0.0;
      for (int a = 0; a < 6; ++a) {
        pi.at(s, a) = rng.uniform();
        tot += pi.at(s, a);
      }
      for (int a = 0; a < 6; ++a) pi.at(s, a) /= tot;
    }
    std::vector<QTable> q(2, QTable(2, 6));
    for (auto& t : q)
      for (int s = 0; s < 2; ++s)
        for (int a = 0; a < 6; ++a) t.at(s, a) = rng.uniform() * 4 - 2;

    auto res = ce_residuals(pi, sp, 2, q);
    std::vector<QTable> scaled = q;
    for (auto& t : scaled)
      for (int s = 0; s < 2; ++s)
        for (int a = 0; a < 6; ++a) t.at(s, a) *= 3.0;
    auto res3 = ce_residuals(pi, sp, 2, scaled);

    for (int k = 0; k < 2; ++k)
      for (int s = 0; s < 2; ++s)
        for (int i = 0; i < sp.count(k); ++i)
          for (int j = 0; j < sp.count(k); ++j) {
            if (i == j) CHECK(res.at(k, s, i, j) == 0.0);
            CHECK(res3.at(k, s, i, j) ==
                  doctest::Approx(3.0 * res.at(k, s, i, j)).epsilon(1e-12));
          }
  }
}

TEST_CASE("q table shape mismatches are rejected") {
  JointActionSpace sp({2, 2});
  JointPolicy pi(1, 4);
  pi.at(0, 0) = 1.0;
  std::vector<QTable> q(2, QTable(1, 3));
  CHECK_THROWS_AS(ce_residuals(pi, sp, 1, q), DimensionMismatch);
}

TEST_CASE("instantaneous lagrangian arithmetic") {
  TabularSpec spec;
  spec.action_counts = {2};
  spec.num_states = 1;
  spec.transition = {1.0, 1.0};
  spec.utility = {{2.0, 2.0}};
  spec.cost = {{1.5, 0.75}};
  spec.cost_bounds = {0.75};
  TabularGame g(std::move(spec));

  // lambda = 0 leaves the utility untouched.
  CHECK(instantaneous_lagrangian(g, 0, 0.0, 0, 0) == doctest::Approx(2.0));
  // Zero slack: any multiplier is inert.
  CHECK(instantaneous_lagrangian(g, 0, 17.0, 0, 1) == doctest::Approx(2.0));
  // u=2, c=1.5, bound=0.75, lambda=0.5 -> 2 - 0.5*(0.75) = 1.625.
  CHECK(instantaneous_lagrangian(g, 0, 0.5, 0, 0) == doctest::Approx(1.625));
}
