#pragma once

// Test-only reference implementations, kept independent of the solver paths
// they are used to check.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ocemdp/mdp.hpp"
#include "ocemdp/risk.hpp"

namespace oracles {

// Dense grid search for sup_eta (eta + sum_i p_i u(v_i - eta)).
inline ocemdp::OceResult oce_grid(const ocemdp::UtilitySpec& u,
                                  const ocemdp::FiniteDistribution& d, int points) {
  const double lo = *std::min_element(d.values.begin(), d.values.end());
  const double hi = *std::max_element(d.values.begin(), d.values.end());
  ocemdp::OceResult best{-1e300, lo};
  for (int k = 0; k < points; ++k) {
    const double eta = points == 1 ? lo : lo + (hi - lo) * k / (points - 1);
    double g = eta;
    for (std::size_t i = 0; i < d.values.size(); ++i) {
      if (d.probs[i] > 0.0) g += d.probs[i] * ocemdp::utility_eval(u, d.values[i] - eta);
    }
    if (g >= best.value) best = {g, eta};
  }
  return best;
}

// Average of the worst tau-fraction of outcomes via quantile averaging.
inline double cvar_quantile(double tau, const ocemdp::FiniteDistribution& d) {
  std::vector<std::size_t> order(d.values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return d.values[a] < d.values[b]; });
  double remaining = tau;
  double acc = 0.0;
  for (std::size_t i : order) {
    const double take = std::min(d.probs[i], remaining);
    acc += take * d.values[i];
    remaining -= take;
    if (remaining <= 0.0) break;
  }
  return acc / tau;
}

// Naive entropic closed form, no log-sum-exp shift.
inline double entropic_closed_form(double beta, const ocemdp::FiniteDistribution& d) {
  double mgf = 0.0;
  for (std::size_t i = 0; i < d.values.size(); ++i)
    mgf += d.probs[i] * std::exp(-beta * d.values[i]);
  return -std::log(mgf) / beta;
}

// Classical risk-neutral value iteration: k backups from a constant table.
inline ocemdp::QTable classical_vi(const ocemdp::TabularMdp& m, int k, double init) {
  ocemdp::QTable q(m.num_states, std::vector<double>(m.num_actions, init));
  for (int j = 0; j < k; ++j) {
    ocemdp::VTable v = ocemdp::v_from_q(q);
    ocemdp::QTable next(m.num_states, std::vector<double>(m.num_actions, 0.0));
    for (int s = 0; s < m.num_states; ++s) {
      for (int a = 0; a < m.num_actions; ++a) {
        double ev = 0.0;
        for (int t = 0; t < m.num_states; ++t) ev += m.transitions[s][a][t] * v[t];
        next[s][a] = m.rewards[s][a] + m.gamma * ev;
      }
    }
    q = std::move(next);
  }
  return q;
}

// Classical risk-neutral policy evaluation to a tight fixed point.
inline ocemdp::VTable classical_policy_eval(const ocemdp::TabularMdp& m,
                                            const ocemdp::Policy& pi, int iters) {
  ocemdp::VTable v(m.num_states, 0.0);
  for (int j = 0; j < iters; ++j) {
    ocemdp::VTable next(m.num_states, 0.0);
    for (int s = 0; s < m.num_states; ++s) {
      double ev = 0.0;
      for (int t = 0; t < m.num_states; ++t) ev += m.transitions[s][pi[s]][t] * v[t];
      next[s] = m.rewards[s][pi[s]] + m.gamma * ev;
    }
    v = std::move(next);
  }
  return v;
}

}  // namespace oracles
