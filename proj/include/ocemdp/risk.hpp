#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace ocemdp {

// Utility functions u: closed, proper concave, nondecreasing, with u(0) = 0 and
// 1 contained in the superdifferential at 0. Everything except the essential
// infimum has full domain (finite everywhere).
enum class UtilityKind {
  Expectation,
  Entropic,
  Cvar,
  MeanVariance,
  PiecewiseLinear,
  EssentialInfimum,
};

class UtilitySpec {
 public:
  static UtilitySpec expectation();
  static UtilitySpec entropic(double beta);
  static UtilitySpec cvar(double tau);
  static UtilitySpec mean_variance();
  static UtilitySpec piecewise_linear(double lambda1, double lambda2);
  static UtilitySpec essential_infimum();

  UtilityKind kind() const { return kind_; }
  double beta() const { return a_; }
  double tau() const { return a_; }
  double lambda1() const { return a_; }
  double lambda2() const { return b_; }

  // False only for the essential infimum, whose domain is [0, inf).
  bool has_full_domain() const { return kind_ != UtilityKind::EssentialInfimum; }

  std::string name() const;

 private:
  UtilitySpec(UtilityKind k, double a, double b) : kind_(k), a_(a), b_(b) {}

  UtilityKind kind_;
  double a_ = 0.0;
  double b_ = 0.0;
};

// Discrete distribution: values v_i carried with probabilities p_i.
struct FiniteDistribution {
  std::vector<double> values;
  std::vector<double> probs;

  // Throws std::invalid_argument ("invalid-distribution: ...") on violation.
  void validate() const;

  double mean() const;
};

struct OceResult {
  double value = 0.0;
  double eta_star = 0.0;
};

// u(t); -inf when t lies outside dom(u). Total on the extended reals.
double utility_eval(const UtilitySpec& u, double t);

// Analytic right derivative u'_+(t). Throws std::domain_error
// ("outside-domain") below the domain of a non-full-domain utility.
double utility_right_derivative(const UtilitySpec& u, double t);

// Analytic left derivative u'_-(t); +inf at the lower domain endpoint.
double utility_left_derivative(const UtilitySpec& u, double t);

// sup_eta (eta + sum_i p_i u(v_i - eta)) with exact per-variant solvers; the
// search interval [min v, max v] always contains a maximizer because the
// objective is concave and its slope is signed outside the support range.
// When several eta attain the maximum, the largest one is reported.
OceResult oce_eval(const UtilitySpec& u, const FiniteDistribution& d);

// Golden-section search over the same interval; independent of the per-variant
// solvers above. Requires a full-domain utility and tol > 0.
OceResult oce_eval_generic(const UtilitySpec& u, const FiniteDistribution& d,
                           double tol);

struct DomainBoundCheck {
  double u_at_minus_h = 0.0;
  double rderiv_bound = 0.0;
  bool holds = false;
};

// Evaluates u(-H) and u'_+(-(H-1)) and whether -u(-H) >= u'_+(-(H-1)).
// Requires H >= 1 and a full-domain utility.
DomainBoundCheck check_domain_bound(const UtilitySpec& u, double h);

// JSON form used by configs and the CLI, e.g. {"kind":"cvar","tau":0.25}.
UtilitySpec risk_from_json(const nlohmann::json& j);
nlohmann::json risk_to_json(const UtilitySpec& u);
UtilitySpec parse_risk(const std::string& text);

}  // namespace ocemdp
