#include "ocemdp/instances.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ocemdp/planning.hpp"

namespace ocemdp {

namespace {

// Skeleton with the two absorbing anchors; transient rows are filled by the
// callers via set_jump.
TabularMdp anchored_skeleton(int s_count, int a_count, double gamma) {
  TabularMdp m;
  m.num_states = s_count + 2;
  m.num_actions = a_count;
  m.gamma = gamma;
  m.rewards.assign(m.num_states, std::vector<double>(a_count, 0.0));
  m.transitions.assign(m.num_states,
                       std::vector<std::vector<double>>(
                           a_count, std::vector<double>(m.num_states, 0.0)));
  const int good = s_count;
  const int bad = s_count + 1;
  for (int a = 0; a < a_count; ++a) {
    m.rewards[good][a] = 1.0;
    m.transitions[good][a][good] = 1.0;
    m.transitions[bad][a][bad] = 1.0;
  }
  return m;
}

void set_jump(TabularMdp& m, int s, int a, double q) {
  const int good = m.num_states - 2;
  const int bad = m.num_states - 1;
  m.transitions[s][a][good] = q;
  m.transitions[s][a][bad] = 1.0 - q;
}

}  // namespace

MdpPair build_value_lb_pair(int s_count, int a_count, double gamma, double p,
                            double alpha, int i) {
  if (s_count < 1 || a_count < 1)
    throw std::invalid_argument("invalid-parameters: need at least one state and action");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("invalid-parameters: gamma out of range");
  if (!(p > 0.5 && p < 1.0))
    throw std::invalid_argument("invalid-parameters: p must lie in (1/2,1)");
  if (!(alpha >= 0.0 && alpha < (1.0 - p) / 5.0))
    throw std::invalid_argument("invalid-parameters: alpha must lie in [0,(1-p)/5)");
  if (i < 0 || i >= s_count * a_count)
    throw std::invalid_argument("invalid-parameters: pair index out of range");

  MdpPair pair;
  pair.m0 = anchored_skeleton(s_count, a_count, gamma);
  for (int s = 0; s < s_count; ++s)
    for (int a = 0; a < a_count; ++a) set_jump(pair.m0, s, a, p);
  pair.m1 = pair.m0;
  set_jump(pair.m1, i / a_count, i % a_count, p + alpha);
  return pair;
}

TabularMdp build_policy_lb_family(int s_count, int a_count, double gamma, double p,
                                  double alpha, int i, int l) {
  if (s_count < 1 || a_count < 1)
    throw std::invalid_argument("invalid-parameters: need at least one state and action");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("invalid-parameters: gamma out of range");
  if (!(p > 0.5 && p < 1.0))
    throw std::invalid_argument("invalid-parameters: p must lie in (1/2,1)");
  if (!(alpha >= 0.0 && alpha < (1.0 - p) / 10.0))
    throw std::invalid_argument("invalid-parameters: alpha must lie in [0,(1-p)/10)");
  if (!(p + 2.0 * alpha < 1.0))
    throw std::invalid_argument("invalid-parameters: p + 2*alpha must stay below 1");
  if (i < 0 || i >= s_count)
    throw std::invalid_argument("invalid-parameters: state index out of range");
  if (l < 0 || l > a_count)
    throw std::invalid_argument("invalid-parameters: hypothesis action out of range");

  TabularMdp m = anchored_skeleton(s_count, a_count + 1, gamma);
  for (int s = 0; s < s_count; ++s) {
    set_jump(m, s, 0, p + alpha);
    for (int a = 1; a <= a_count; ++a) set_jump(m, s, a, p);
  }
  if (l != 0) set_jump(m, i, l, p + 2.0 * alpha);
  return m;
}

TabularMdp build_impossibility_mdp(double gamma, double p) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("invalid-parameters: gamma out of range");
  if (!(p > 0.0 && p <= 1.0))
    throw std::invalid_argument("invalid-parameters: p must lie in (0,1]");
  TabularMdp m = anchored_skeleton(1, 1, gamma);
  set_jump(m, 0, 0, p);
  return m;
}

double eta_star_threshold(const UtilitySpec& u, double x) {
  if (!(x > 0.0)) throw std::invalid_argument("eta_star_threshold: x must be positive");
  if (!u.has_full_domain())
    throw std::domain_error("hypothesis-violated: utility must have full domain");
  const double right_at_zero = utility_right_derivative(u, 0.0);
  const double left_at_zero = utility_left_derivative(u, 0.0);
  if (!(right_at_zero < 1.0 && left_at_zero > 1.0))
    throw std::domain_error("hypothesis-violated: need u'_+(0) < 1 < u'_-(0)");
  const double right_at_minus_x = utility_right_derivative(u, -x);
  return 1.0 - (1.0 - right_at_zero) / (right_at_minus_x - right_at_zero);
}

double risk_averse_pbar(const UtilitySpec& u, double x) {
  if (!(x > 0.0)) throw std::invalid_argument("risk_averse_pbar: x must be positive");
  if (!u.has_full_domain())
    throw std::domain_error("outside-domain: essinf is undefined below 0");
  const double u_at_minus_x = utility_eval(u, -x);
  if (u_at_minus_x >= -x - 1e-15 * (1.0 + x)) return 0.0;  // identity on [-x,0]
  // Above 1 - r the flat-on-positives objective cannot peak at eta = 0; the
  // midpoint of [r, 1] alone undershoots that cutoff once -u(-x) > 3x, so take
  // whichever of the two exceeds it.
  const double r = x / (-u_at_minus_x);
  return std::max(0.5 * (1.0 + r), 1.0 - 0.5 * r);
}

GapCheck gap_check(const UtilitySpec& u, double gamma, double p, double alpha) {
  const MdpPair pair = build_value_lb_pair(1, 1, gamma, p, alpha, 0);
  const QTable q0 = exact_q_star(pair.m0, u, 1e-10);
  const QTable q1 = exact_q_star(pair.m1, u, 1e-10);
  GapCheck out;
  out.gap = q1[0][0] - q0[0][0];
  const double h = 1.0 / (1.0 - gamma);
  const OceResult base = oce_eval(u, FiniteDistribution{{h, 0.0}, {p, 1.0 - p}});
  out.eta0 = base.eta_star;
  out.delta_factor = utility_eval(u, h - out.eta0) - utility_eval(u, -out.eta0);
  out.certified_lb = gamma * alpha * out.delta_factor;
  out.holds = out.gap >= out.certified_lb - 1e-8;
  return out;
}

double distinguishing_sample_bound(double p, double delta) {
  if (!(p > 0.0 && p <= 1.0))
    throw std::invalid_argument("distinguishing_sample_bound: p must lie in (0,1]");
  if (!(delta > 0.0 && delta < 0.5))
    throw std::invalid_argument("distinguishing_sample_bound: delta must lie in (0,1/2)");
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  return std::log(1.0 / (2.0 * delta)) / std::log(1.0 / p);
}

}  // namespace ocemdp
