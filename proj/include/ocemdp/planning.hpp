#pragma once

#include "ocemdp/mdp.hpp"
#include "ocemdp/risk.hpp"

namespace ocemdp {

struct PlanningResult {
  QTable q;
  Policy policy;
  int iterations = 0;
  double final_residual = 0.0;
};

// One application of the optimal backup:
// out(s,a) = R(s,a) + gamma * rho_{s,a}(max_a' q(s',a')).
QTable bellman_optimal_apply(const TabularMdp& m, const UtilitySpec& u, const QTable& q);

// One application of the policy backup:
// out(s) = R(s, pi(s)) + gamma * rho_{s,pi(s)}(v).
VTable bellman_policy_apply(const TabularMdp& m, const UtilitySpec& u,
                            const Policy& pi, const VTable& v);

// Runs exactly ceil(log(1/(2 eps (1-gamma))) / log(1/gamma)) backups (at least
// one) from the constant table 1/(2(1-gamma)); the iterate is then within eps
// of the fixed point in sup norm.
PlanningResult value_iteration(const TabularMdp& m, const UtilitySpec& u, double epsilon);

// Iterates the optimal backup until the contraction stopping rule
// residual * gamma / (1-gamma) <= tol certifies sup-norm accuracy tol.
QTable exact_q_star(const TabularMdp& m, const UtilitySpec& u, double tol);

// Fixed point of the policy backup, certified within tol in sup norm.
VTable policy_value(const TabularMdp& m, const UtilitySpec& u, const Policy& pi, double tol);

// Greedy policy under the risk-sensitive backup on a given state-value table.
Policy greedy_from_v(const TabularMdp& m, const UtilitySpec& u, const VTable& v);

struct SimulationBoundCheck {
  double lhs = 0.0;  // ||Q^pi_m1 - Q^pi_m2||_inf
  double rhs = 0.0;  // (gamma/(1-gamma)) * worst utility-transformed row gap
  bool holds = false;
  int grid_points = 0;  // density used for the inner sup over eta
};

// Checks the transition-perturbation continuity bound between two MDPs that
// share states, actions, rewards and gamma. tol is the slack for `holds`.
SimulationBoundCheck simulation_bound_check(const TabularMdp& m1, const TabularMdp& m2,
                                            const UtilitySpec& u, const Policy& pi,
                                            double tol);

struct GreedyBoundCheck {
  double gap = 0.0;         // ||V* - V^{pi_G}||_inf
  double bound = 0.0;       // 2 gamma eps / (1-gamma)
  double vbar_error = 0.0;  // eps = ||V* - vbar||_inf
  bool holds = false;
};

// Checks the greedy-deterioration bound for the policy greedy w.r.t. vbar.
GreedyBoundCheck greedy_bound_check(const TabularMdp& m, const UtilitySpec& u,
                                    const VTable& vbar, double tol);

}  // namespace ocemdp
