#include "ocemdp/planning.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ocemdp {

namespace {

constexpr int kMaxFixedPointIterations = 1000000;

double risk_of_row(const TabularMdp& m, const UtilitySpec& u, int s, int a,
                   const VTable& v) {
  FiniteDistribution d{v, m.transitions[s][a]};
  return oce_eval(u, d).value;
}

}  // namespace

QTable bellman_optimal_apply(const TabularMdp& m, const UtilitySpec& u, const QTable& q) {
  const VTable v = v_from_q(q);
  QTable out(m.num_states, std::vector<double>(m.num_actions, 0.0));
  for (int s = 0; s < m.num_states; ++s) {
    for (int a = 0; a < m.num_actions; ++a) {
      out[s][a] = m.rewards[s][a] + m.gamma * risk_of_row(m, u, s, a, v);
    }
  }
  return out;
}

VTable bellman_policy_apply(const TabularMdp& m, const UtilitySpec& u,
                            const Policy& pi, const VTable& v) {
  VTable out(m.num_states, 0.0);
  for (int s = 0; s < m.num_states; ++s) {
    const int a = pi[s];
    out[s] = m.rewards[s][a] + m.gamma * risk_of_row(m, u, s, a, v);
  }
  return out;
}

PlanningResult value_iteration(const TabularMdp& m, const UtilitySpec& u, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("value_iteration: epsilon must be positive");
  const double raw =
      std::log(1.0 / (2.0 * epsilon * (1.0 - m.gamma))) / std::log(1.0 / m.gamma);
  const int k = std::max(1, static_cast<int>(std::ceil(raw)));

  QTable q(m.num_states, std::vector<double>(m.num_actions, 0.5 * m.horizon()));
  double residual = 0.0;
  for (int j = 0; j < k; ++j) {
    QTable next = bellman_optimal_apply(m, u, q);
    residual = sup_norm_diff(next, q);
    q = std::move(next);
  }
  PlanningResult out;
  out.policy = greedy_from_q(q);
  out.q = std::move(q);
  out.iterations = k;
  out.final_residual = residual;
  return out;
}

QTable exact_q_star(const TabularMdp& m, const UtilitySpec& u, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("exact_q_star: tol must be positive");
  const double stop = tol * (1.0 - m.gamma) / m.gamma;
  QTable q(m.num_states, std::vector<double>(m.num_actions, 0.5 * m.horizon()));
  for (int j = 0; j < kMaxFixedPointIterations; ++j) {
    QTable next = bellman_optimal_apply(m, u, q);
    const double residual = sup_norm_diff(next, q);
    q = std::move(next);
    if (residual <= stop) return q;
  }
  throw std::runtime_error("exact_q_star: fixed-point iteration did not converge");
}

VTable policy_value(const TabularMdp& m, const UtilitySpec& u, const Policy& pi, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("policy_value: tol must be positive");
  const double stop = tol * (1.0 - m.gamma) / m.gamma;
  VTable v(m.num_states, 0.5 * m.horizon());
  for (int j = 0; j < kMaxFixedPointIterations; ++j) {
    VTable next = bellman_policy_apply(m, u, pi, v);
    const double residual = sup_norm_diff(next, v);
    v = std::move(next);
    if (residual <= stop) return v;
  }
  throw std::runtime_error("policy_value: fixed-point iteration did not converge");
}

Policy greedy_from_v(const TabularMdp& m, const UtilitySpec& u, const VTable& v) {
  QTable q(m.num_states, std::vector<double>(m.num_actions, 0.0));
  for (int s = 0; s < m.num_states; ++s)
    for (int a = 0; a < m.num_actions; ++a)
      q[s][a] = m.rewards[s][a] + m.gamma * risk_of_row(m, u, s, a, v);
  return greedy_from_q(q);
}

namespace {

// sup over eta in [0, H] of |sum_s' d(s') u(v(s') - eta)| for a signed row
// difference d. The integrand is a difference of concave functions, so a
// dense grid locates both signed maxima and golden-section polishes each.
double sup_abs_signed_row(const UtilitySpec& u, const std::vector<double>& d,
                          const VTable& v, double h_gamma, int grid_points) {
  auto f = [&](double eta) {
    double acc = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (d[i] != 0.0) acc += d[i] * utility_eval(u, v[i] - eta);
    }
    return acc;
  };
  const double step = h_gamma / (grid_points - 1);
  double best_pos = f(0.0), best_neg = -best_pos;
  double at_pos = 0.0, at_neg = 0.0;
  for (int i = 1; i < grid_points; ++i) {
    const double eta = i * step;
    const double y = f(eta);
    if (y > best_pos) { best_pos = y; at_pos = eta; }
    if (-y > best_neg) { best_neg = -y; at_neg = eta; }
  }
  auto refine = [&](double center, double sign) {
    double a = std::max(0.0, center - step);
    double b = std::min(h_gamma, center + step);
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a), e = a + invphi * (b - a);
    double fc = sign * f(c), fe = sign * f(e);
    while (b - a > 1e-12 * (1.0 + h_gamma)) {
      if (fc >= fe) { b = e; e = c; fe = fc; c = b - invphi * (b - a); fc = sign * f(c); }
      else { a = c; c = e; fc = fe; e = a + invphi * (b - a); fe = sign * f(e); }
    }
    return sign * f(0.5 * (a + b));
  };
  best_pos = std::max(best_pos, refine(at_pos, 1.0));
  best_neg = std::max(best_neg, -refine(at_neg, -1.0));
  return std::max(best_pos, best_neg);
}

}  // namespace

SimulationBoundCheck simulation_bound_check(const TabularMdp& m1, const TabularMdp& m2,
                                            const UtilitySpec& u, const Policy& pi,
                                            double tol) {
  if (m1.num_states != m2.num_states || m1.num_actions != m2.num_actions ||
      m1.gamma != m2.gamma || m1.rewards != m2.rewards)
    throw std::invalid_argument("mismatched-mdps: need equal S, A, R and gamma");

  const double inner_tol = std::max(1e-13, tol / 100.0);
  const VTable v1 = policy_value(m1, u, pi, inner_tol);
  const VTable v2 = policy_value(m2, u, pi, inner_tol);

  SimulationBoundCheck out;
  out.grid_points = 10001;
  QTable q1(m1.num_states, std::vector<double>(m1.num_actions, 0.0));
  QTable q2 = q1;
  for (int s = 0; s < m1.num_states; ++s) {
    for (int a = 0; a < m1.num_actions; ++a) {
      q1[s][a] = m1.rewards[s][a] + m1.gamma * risk_of_row(m1, u, s, a, v1);
      q2[s][a] = m2.rewards[s][a] + m2.gamma * risk_of_row(m2, u, s, a, v2);
    }
  }
  out.lhs = sup_norm_diff(q1, q2);

  double worst = 0.0;
  std::vector<double> diff(m1.num_states, 0.0);
  for (int s = 0; s < m1.num_states; ++s) {
    for (int a = 0; a < m1.num_actions; ++a) {
      bool nonzero = false;
      for (int t = 0; t < m1.num_states; ++t) {
        diff[t] = m1.transitions[s][a][t] - m2.transitions[s][a][t];
        nonzero = nonzero || diff[t] != 0.0;
      }
      if (!nonzero) continue;
      worst = std::max(worst, sup_abs_signed_row(u, diff, v1, m1.horizon(),
                                                 out.grid_points));
    }
  }
  out.rhs = m1.gamma / (1.0 - m1.gamma) * worst;
  out.holds = out.lhs <= out.rhs + tol;
  return out;
}

GreedyBoundCheck greedy_bound_check(const TabularMdp& m, const UtilitySpec& u,
                                    const VTable& vbar, double tol) {
  const double inner_tol = std::max(1e-13, tol / 100.0);
  const VTable v_star = v_from_q(exact_q_star(m, u, inner_tol));
  GreedyBoundCheck out;
  out.vbar_error = sup_norm_diff(v_star, vbar);
  const Policy greedy = greedy_from_v(m, u, vbar);
  const VTable v_greedy = policy_value(m, u, greedy, inner_tol);
  out.gap = sup_norm_diff(v_star, v_greedy);
  out.bound = 2.0 * m.gamma / (1.0 - m.gamma) * out.vbar_error;
  out.holds = out.gap <= out.bound + tol;
  return out;
}

}  // namespace ocemdp
