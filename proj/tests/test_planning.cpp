#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "ocemdp/harness.hpp"
#include "ocemdp/instances.hpp"
#include "ocemdp/planning.hpp"
#include "oracles.hpp"

using namespace ocemdp;

namespace {

TabularMdp self_loop(double reward, double gamma) {
  TabularMdp m;
  m.num_states = 1;
  m.num_actions = 1;
  m.gamma = gamma;
  m.rewards = {{reward}};
  m.transitions = {{{1.0}}};
  return m;
}

// Three states (start, good, bad), two actions at every state: action 0 jumps
// from the start to good with probability p, action 1 reaches good surely.
TabularMdp risky_vs_sure(double gamma, double p) {
  TabularMdp m;
  m.num_states = 3;
  m.num_actions = 2;
  m.gamma = gamma;
  m.rewards = {{0.0, 0.0}, {1.0, 1.0}, {0.0, 0.0}};
  m.transitions = {{{0.0, p, 1.0 - p}, {0.0, 1.0, 0.0}},
                   {{0.0, 1.0, 0.0}, {0.0, 1.0, 0.0}},
                   {{0.0, 0.0, 1.0}, {0.0, 0.0, 1.0}}};
  return m;
}

std::vector<UtilitySpec> variants() {
  return {UtilitySpec::expectation(), UtilitySpec::entropic(1.0), UtilitySpec::cvar(0.5),
          UtilitySpec::mean_variance(), UtilitySpec::piecewise_linear(0.5, 2.0)};
}

}  // namespace

TEST_CASE("optimal backup on a self-loop") {
  const TabularMdp m = self_loop(1.0, 0.5);
  for (const UtilitySpec& u : variants()) {
    CAPTURE(u.name());
    CHECK(bellman_optimal_apply(m, u, {{0.0}})[0][0] == doctest::Approx(1.0).epsilon(1e-12));
    // the fixed point 1/(1-gamma) maps to itself
    CHECK(bellman_optimal_apply(m, u, {{2.0}})[0][0] == doctest::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("optimal backup fixed point on the deterministic anchor chain") {
  const TabularMdp m = build_impossibility_mdp(0.9, 1.0);
  for (const UtilitySpec& u : variants()) {
    CAPTURE(u.name());
    const QTable q = exact_q_star(m, u, 1e-9);
    CHECK(q[0][0] == doctest::Approx(9.0).epsilon(1e-8));
    CHECK(q[1][0] == doctest::Approx(10.0).epsilon(1e-8));
    CHECK(q[2][0] == doctest::Approx(0.0).epsilon(1e-8));
  }
}

TEST_CASE("policy backup basics") {
  // two-state forward chain: 0 -> 1 -> 1
  TabularMdp m;
  m.num_states = 2;
  m.num_actions = 1;
  m.gamma = 0.5;
  m.rewards = {{0.25}, {1.0}};
  m.transitions = {{{0.0, 1.0}}, {{0.0, 1.0}}};
  const Policy pi{0, 0};
  const VTable zero{0.0, 0.0};
  CHECK(bellman_policy_apply(m, UtilitySpec::cvar(0.5), pi, zero) == VTable{0.25, 1.0});
  // point-mass transitions reduce to R + gamma * v(next)
  const VTable v{0.5, 2.0};
  const VTable out = bellman_policy_apply(m, UtilitySpec::entropic(1.0), pi, v);
  CHECK(out[0] == doctest::Approx(0.25 + 0.5 * 2.0).epsilon(1e-12));
  CHECK(out[1] == doctest::Approx(1.0 + 0.5 * 2.0).epsilon(1e-12));
}

TEST_CASE("policy backup with expectation matches the classical step") {
  std::mt19937_64 eng(5);
  for (int k = 0; k < 20; ++k) {
    const TabularMdp m = random_mdp(eng(), 3, 3, 3, {0.9});
    const Policy pi = random_policy(eng(), m.num_states, m.num_actions);
    const VTable v = random_vtable(eng(), m.num_states, 0.0, 5.0);
    const VTable ours = bellman_policy_apply(m, UtilitySpec::expectation(), pi, v);
    for (int s = 0; s < m.num_states; ++s) {
      double ev = 0.0;
      for (int t = 0; t < m.num_states; ++t) ev += m.transitions[s][pi[s]][t] * v[t];
      CHECK(ours[s] == doctest::Approx(m.rewards[s][pi[s]] + m.gamma * ev).epsilon(1e-12));
    }
  }
}

TEST_CASE("value_iteration on a self-loop reaches the fixed point") {
  const TabularMdp m = self_loop(1.0, 0.5);
  const PlanningResult r = value_iteration(m, UtilitySpec::entropic(0.7), 1e-6);
  CHECK(r.q[0][0] == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(r.iterations >= 1);
  CHECK(r.final_residual >= 0.0);
  // iteration count follows the contraction schedule
  const int expected =
      static_cast<int>(std::ceil(std::log(1.0 / (2.0 * 1e-6 * 0.5)) / std::log(2.0)));
  CHECK(r.iterations == expected);
  CHECK_THROWS_AS(value_iteration(m, UtilitySpec::expectation(), 0.0),
                  std::invalid_argument);
}

TEST_CASE("value_iteration with expectation matches classical VI") {
  std::mt19937_64 eng(9);
  for (int k = 0; k < 10; ++k) {
    const TabularMdp m = random_mdp(eng(), 4, 4, 3, {0.9});
    const PlanningResult r = value_iteration(m, UtilitySpec::expectation(), 1e-7);
    const QTable oracle = oracles::classical_vi(m, r.iterations, 0.5 * m.horizon());
    CHECK(sup_norm_diff(r.q, oracle) <= 1e-8);
  }
}

TEST_CASE("exact_q_star certified values") {
  CHECK(exact_q_star(self_loop(1.0, 0.9), UtilitySpec::cvar(0.25), 1e-10)[0][0] ==
        doctest::Approx(10.0).epsilon(1e-9));
  // below certainty the worst-case recursion collapses to zero
  const TabularMdp risky = build_impossibility_mdp(0.9, 0.999);
  CHECK(exact_q_star(risky, UtilitySpec::essential_infimum(), 1e-10)[0][0] ==
        doctest::Approx(0.0).epsilon(1e-9));
  // two-anchor block: gamma * CVaR{10 w.p. 0.75, 0 w.p. 0.25} = 0.9 * 5
  const TabularMdp block = build_impossibility_mdp(0.9, 0.75);
  CHECK(exact_q_star(block, UtilitySpec::cvar(0.5), 1e-10)[0][0] ==
        doctest::Approx(4.5).epsilon(1e-9));
}

TEST_CASE("policy_value agrees with the optimal fixed point under the greedy policy") {
  std::mt19937_64 eng(13);
  for (int k = 0; k < 10; ++k) {
    const TabularMdp m = random_mdp(eng(), 2, 5, 3, {0.5, 0.9});
    for (const UtilitySpec& u : variants()) {
      CAPTURE(u.name());
      const QTable q = exact_q_star(m, u, 1e-10);
      const VTable direct = policy_value(m, u, greedy_from_q(q), 1e-10);
      CHECK(sup_norm_diff(v_from_q(q), direct) <= 2e-10);
    }
  }
}

TEST_CASE("suboptimal action values strictly below the optimum") {
  const TabularMdp m = risky_vs_sure(0.9, 0.9);
  for (const UtilitySpec& u : variants()) {
    CAPTURE(u.name());
    const VTable v_star = v_from_q(exact_q_star(m, u, 1e-10));
    const VTable v_risky = policy_value(m, u, Policy{0, 0, 0}, 1e-10);
    CHECK(v_star[0] == doctest::Approx(9.0).epsilon(1e-9));
    CHECK(v_risky[0] < v_star[0] - 1e-6);
  }
}

TEST_CASE("policy value of a deterministic cycle is the geometric reward sum") {
  TabularMdp m;
  m.num_states = 2;
  m.num_actions = 1;
  m.gamma = 0.8;
  m.rewards = {{0.3}, {0.9}};
  m.transitions = {{{0.0, 1.0}}, {{1.0, 0.0}}};
  const VTable v = policy_value(m, UtilitySpec::mean_variance(), {0, 0}, 1e-11);
  const double expected0 = (0.3 + 0.8 * 0.9) / (1.0 - 0.64);
  CHECK(v[0] == doctest::Approx(expected0).epsilon(1e-9));
}

TEST_CASE("contraction of the optimal backup") {
  std::mt19937_64 eng(21);
  for (int k = 0; k < 25; ++k) {
    const TabularMdp m = random_mdp(eng(), 2, 6, 4, {0.5, 0.9, 0.95});
    const double h = m.horizon();
    const QTable qa = random_qtable(eng(), m.num_states, m.num_actions, 0.0, h);
    const QTable qb = random_qtable(eng(), m.num_states, m.num_actions, 0.0, h);
    for (const UtilitySpec& u : utility_panel(eng())) {
      CAPTURE(u.name());
      const double lhs =
          sup_norm_diff(bellman_optimal_apply(m, u, qa), bellman_optimal_apply(m, u, qb));
      CHECK(lhs <= m.gamma * sup_norm_diff(qa, qb) + 1e-9);
    }
  }
}

TEST_CASE("geometric convergence of the iterates") {
  std::mt19937_64 eng(27);
  for (int k = 0; k < 5; ++k) {
    const TabularMdp m = random_mdp(eng(), 2, 5, 3, {0.5, 0.9});
    for (const UtilitySpec& u : variants()) {
      CAPTURE(u.name());
      const QTable q_star = exact_q_star(m, u, 1e-12);
      QTable q(m.num_states, std::vector<double>(m.num_actions, 0.5 * m.horizon()));
      const double initial_gap = sup_norm_diff(q, q_star);
      double decay = 1.0;
      for (int it = 1; it <= 2000; ++it) {
        QTable next = bellman_optimal_apply(m, u, q);
        const double residual = sup_norm_diff(next, q);
        q = std::move(next);
        decay *= m.gamma;
        CHECK(sup_norm_diff(q, q_star) <= decay * initial_gap + 1e-9);
        if (residual <= 1e-10) break;
      }
    }
  }
}

TEST_CASE("risk ordering of fixed points across utilities") {
  std::mt19937_64 eng(33);
  for (int k = 0; k < 10; ++k) {
    const TabularMdp m = random_mdp(eng(), 2, 5, 3, {0.5, 0.9});
    const QTable q_ess = exact_q_star(m, UtilitySpec::essential_infimum(), 1e-10);
    const QTable q_exp = exact_q_star(m, UtilitySpec::expectation(), 1e-10);
    for (const UtilitySpec& u : variants()) {
      CAPTURE(u.name());
      const QTable q = exact_q_star(m, u, 1e-10);
      for (int s = 0; s < m.num_states; ++s) {
        for (int a = 0; a < m.num_actions; ++a) {
          CHECK(q_ess[s][a] <= q[s][a] + 1e-9);
          CHECK(q[s][a] <= q_exp[s][a] + 1e-9);
        }
      }
    }
  }
}

TEST_CASE("simulation bound check") {
  const TabularMdp m = random_mdp(77, 3, 5, 3, {0.9});
  const Policy pi = random_policy(78, m.num_states, m.num_actions);
  SUBCASE("identical MDPs give a zero-zero bound") {
    const SimulationBoundCheck c =
        simulation_bound_check(m, m, UtilitySpec::cvar(0.5), pi, 1e-8);
    CHECK(c.lhs == 0.0);
    CHECK(c.rhs == 0.0);
    CHECK(c.holds);
  }
  SUBCASE("expectation case reduces to the classical bound") {
    const TabularMdp m2 = perturb_transitions(m, 79, 2);
    const SimulationBoundCheck c =
        simulation_bound_check(m, m2, UtilitySpec::expectation(), pi, 1e-8);
    const VTable v1 = policy_value(m, UtilitySpec::expectation(), pi, 1e-11);
    double classical = 0.0;
    for (int s = 0; s < m.num_states; ++s) {
      for (int a = 0; a < m.num_actions; ++a) {
        double dot = 0.0;
        for (int t = 0; t < m.num_states; ++t)
          dot += (m.transitions[s][a][t] - m2.transitions[s][a][t]) * v1[t];
        classical = std::max(classical, std::abs(dot));
      }
    }
    classical *= m.gamma / (1.0 - m.gamma);
    CHECK(c.rhs == doctest::Approx(classical).epsilon(1e-9));
    CHECK(c.holds);
    CHECK(c.grid_points == 10001);
  }
  SUBCASE("random perturbed pairs satisfy the bound across the panel") {
    std::mt19937_64 eng(41);
    for (int k = 0; k < 25; ++k) {
      const TabularMdp base = random_mdp(eng(), 2, 5, 3, {0.5, 0.9});
      const TabularMdp other = perturb_transitions(base, eng(), 3);
      const Policy p = random_policy(eng(), base.num_states, base.num_actions);
      for (const UtilitySpec& u : utility_panel(eng())) {
        CAPTURE(u.name());
        CHECK(simulation_bound_check(base, other, u, p, 1e-8).holds);
      }
    }
  }
  SUBCASE("shape mismatch is rejected") {
    const TabularMdp other = random_mdp(80, 6, 6, 4, {0.9});
    CHECK_THROWS_WITH_AS(simulation_bound_check(m, other, UtilitySpec::expectation(), pi, 1e-8),
                         doctest::Contains("mismatched-mdps"), std::invalid_argument);
  }
}

TEST_CASE("greedy deterioration check") {
  const TabularMdp m = random_mdp(91, 3, 5, 3, {0.9});
  const UtilitySpec u = UtilitySpec::entropic(1.0);
  const VTable v_star = v_from_q(exact_q_star(m, u, 1e-11));
  SUBCASE("exact value function gives a zero gap") {
    const GreedyBoundCheck c = greedy_bound_check(m, u, v_star, 1e-8);
    CHECK(c.gap <= 1e-9);
    CHECK(c.holds);
  }
  SUBCASE("constant shifts leave the greedy policy unchanged") {
    VTable shifted = v_star;
    for (double& x : shifted) x += 0.37;
    const GreedyBoundCheck c = greedy_bound_check(m, u, shifted, 1e-8);
    CHECK(c.gap <= 1e-9);
    CHECK(c.vbar_error == doctest::Approx(0.37).epsilon(1e-6));
    CHECK(c.holds);
  }
  SUBCASE("random perturbations satisfy the bound across the panel") {
    std::mt19937_64 eng(101);
    for (int k = 0; k < 25; ++k) {
      const TabularMdp base = random_mdp(eng(), 2, 5, 3, {0.5, 0.9});
      for (const UtilitySpec& uu : utility_panel(eng())) {
        CAPTURE(uu.name());
        VTable vbar = v_from_q(exact_q_star(base, uu, 1e-11));
        const VTable noise = random_vtable(eng(), base.num_states, -1.0, 1.0);
        for (int s = 0; s < base.num_states; ++s) vbar[s] += noise[s];
        CHECK(greedy_bound_check(base, uu, vbar, 1e-8).holds);
      }
    }
  }
}
