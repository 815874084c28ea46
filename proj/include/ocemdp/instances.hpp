#pragma once

#include "ocemdp/mdp.hpp"
#include "ocemdp/risk.hpp"

namespace ocemdp {

// Hard-instance families built from two absorbing anchor states: transient
// states occupy indices 0..S-1, the rewarding absorbing state sits at index S
// and the zero-reward absorbing state at index S+1. Every transient pair jumps
// directly to one of the two anchors.

struct MdpPair {
  TabularMdp m0;
  TabularMdp m1;
};

// Value-learning family: every pair (s,a) reaches the good anchor with
// probability p; the pair indexed i (row-major over states then actions) gets
// p + alpha in m1. Requires p in (1/2,1) and alpha in [0, (1-p)/5).
MdpPair build_value_lb_pair(int s_count, int a_count, double gamma, double p,
                            double alpha, int i);

// Policy-learning family with a_count+1 actions: action 0 reaches the good
// anchor with probability p + alpha everywhere, the other actions with p,
// except that in state i action l (when l != 0) gets p + 2*alpha. Requires
// p in (1/2,1), alpha in [0, (1-p)/10) and l in {0,...,a_count}.
TabularMdp build_policy_lb_family(int s_count, int a_count, double gamma, double p,
                                  double alpha, int i, int l);

// Single-action three-state chain: the start state reaches the good anchor
// with probability p and the bad anchor otherwise. Requires p in (0,1].
TabularMdp build_impossibility_mdp(double gamma, double p);

// Success probability above which eta = x maximizes
// eta + p u(x - eta) + (1-p) u(-eta); defined when u'_+(0) < 1 < u'_-(0).
// Throws std::domain_error ("hypothesis-violated") otherwise.
double eta_star_threshold(const UtilitySpec& u, double x);

// A p-bar in (1/2,1) such that for p > p-bar the two-point gap factor
// u(x - eta*) - u(-eta*) is strictly positive; 0 when u is the identity on
// [-x, 0] (any p works). Throws std::domain_error ("outside-domain") for the
// essential infimum.
double risk_averse_pbar(const UtilitySpec& u, double x);

struct GapCheck {
  double gap = 0.0;           // Q*_1(z) - Q*_0(z) on the two-anchor block
  double certified_lb = 0.0;  // gamma * alpha * delta_factor
  double delta_factor = 0.0;  // u(H - eta0) - u(-eta0)
  double eta0 = 0.0;          // largest maximizer for the q = p block
  bool holds = false;
};

// Certifies the value gap between the alpha-perturbed block and its base.
GapCheck gap_check(const UtilitySpec& u, double gamma, double p, double alpha);

// log(1/(2 delta)) / log(1/p): samples below which the p-block and the
// deterministic block cannot be told apart; +inf at p = 1.
double distinguishing_sample_bound(double p, double delta);

}  // namespace ocemdp
