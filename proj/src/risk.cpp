#include "ocemdp/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ocemdp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kPosInf = std::numeric_limits<double>::infinity();

}  // namespace

UtilitySpec UtilitySpec::expectation() {
  return UtilitySpec(UtilityKind::Expectation, 0.0, 0.0);
}

UtilitySpec UtilitySpec::entropic(double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("entropic: beta must be positive");
  return UtilitySpec(UtilityKind::Entropic, beta, 0.0);
}

UtilitySpec UtilitySpec::cvar(double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("cvar: tau must lie in (0,1)");
  return UtilitySpec(UtilityKind::Cvar, tau, 0.0);
}

UtilitySpec UtilitySpec::mean_variance() {
  return UtilitySpec(UtilityKind::MeanVariance, 0.0, 0.0);
}

UtilitySpec UtilitySpec::piecewise_linear(double lambda1, double lambda2) {
  if (!(lambda1 >= 0.0 && lambda1 < 1.0))
    throw std::invalid_argument("piecewise_linear: lambda1 must lie in [0,1)");
  if (!(lambda2 > 1.0))
    throw std::invalid_argument("piecewise_linear: lambda2 must exceed 1");
  return UtilitySpec(UtilityKind::PiecewiseLinear, lambda1, lambda2);
}

UtilitySpec UtilitySpec::essential_infimum() {
  return UtilitySpec(UtilityKind::EssentialInfimum, 0.0, 0.0);
}

std::string UtilitySpec::name() const {
  switch (kind_) {
    case UtilityKind::Expectation: return "expectation";
    case UtilityKind::Entropic: return "entropic(beta=" + std::to_string(a_) + ")";
    case UtilityKind::Cvar: return "cvar(tau=" + std::to_string(a_) + ")";
    case UtilityKind::MeanVariance: return "mean_variance";
    case UtilityKind::PiecewiseLinear:
      return "piecewise_linear(" + std::to_string(a_) + "," + std::to_string(b_) + ")";
    case UtilityKind::EssentialInfimum: return "essinf";
  }
  return "?";
}

void FiniteDistribution::validate() const {
  if (values.empty())
    throw std::invalid_argument("invalid-distribution: empty support");
  if (values.size() != probs.size())
    throw std::invalid_argument("invalid-distribution: values/probs length mismatch");
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0))
      throw std::invalid_argument("invalid-distribution: negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("invalid-distribution: probabilities do not sum to 1");
  for (double v : values) {
    if (!std::isfinite(v))
      throw std::invalid_argument("invalid-distribution: non-finite value");
  }
}

double FiniteDistribution::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) m += probs[i] * values[i];
  return m;
}

double utility_eval(const UtilitySpec& u, double t) {
  switch (u.kind()) {
    case UtilityKind::Expectation:
      return t;
    case UtilityKind::Entropic:
      return (1.0 - std::exp(-u.beta() * t)) / u.beta();
    case UtilityKind::Cvar:
      return t < 0.0 ? t / u.tau() : 0.0;
    case UtilityKind::MeanVariance:
      return t <= 1.0 ? t - 0.5 * t * t : 0.5;
    case UtilityKind::PiecewiseLinear:
      return t >= 0.0 ? u.lambda1() * t : u.lambda2() * t;
    case UtilityKind::EssentialInfimum:
      return t >= 0.0 ? 0.0 : kNegInf;
  }
  return kNegInf;
}

double utility_right_derivative(const UtilitySpec& u, double t) {
  switch (u.kind()) {
    case UtilityKind::Expectation:
      return 1.0;
    case UtilityKind::Entropic:
      return std::exp(-u.beta() * t);
    case UtilityKind::Cvar:
      return t < 0.0 ? 1.0 / u.tau() : 0.0;
    case UtilityKind::MeanVariance:
      return t < 1.0 ? 1.0 - t : 0.0;
    case UtilityKind::PiecewiseLinear:
      return t < 0.0 ? u.lambda2() : u.lambda1();
    case UtilityKind::EssentialInfimum:
      if (t >= 0.0) return 0.0;
      throw std::domain_error("outside-domain: essinf right derivative below 0");
  }
  return 0.0;
}

double utility_left_derivative(const UtilitySpec& u, double t) {
  switch (u.kind()) {
    case UtilityKind::Expectation:
      return 1.0;
    case UtilityKind::Entropic:
      return std::exp(-u.beta() * t);
    case UtilityKind::Cvar:
      return t <= 0.0 ? 1.0 / u.tau() : 0.0;
    case UtilityKind::MeanVariance:
      return t <= 1.0 ? 1.0 - t : 0.0;
    case UtilityKind::PiecewiseLinear:
      return t <= 0.0 ? u.lambda2() : u.lambda1();
    case UtilityKind::EssentialInfimum:
      if (t > 0.0) return 0.0;
      if (t == 0.0) return kPosInf;
      throw std::domain_error("outside-domain: essinf left derivative below 0");
  }
  return 0.0;
}

namespace {

// eta + sum_i p_i u(v_i - eta), skipping zero-probability atoms so that the
// extended-real convention 0 * (-inf) = 0 holds.
double objective(const UtilitySpec& u, const FiniteDistribution& d, double eta) {
  double acc = eta;
  for (std::size_t i = 0; i < d.values.size(); ++i) {
    if (d.probs[i] == 0.0) continue;
    double ut = utility_eval(u, d.values[i] - eta);
    if (ut == kNegInf) return kNegInf;
    acc += d.probs[i] * ut;
  }
  return acc;
}

// Evaluates the objective on a finite candidate set and picks the maximum; on
// a tie (within floating noise) the largest eta wins.
OceResult best_candidate(const UtilitySpec& u, const FiniteDistribution& d,
                         std::vector<double> candidates) {
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  double best = kNegInf;
  for (double eta : candidates) best = std::max(best, objective(u, d, eta));
  const double tie = 1e-12 * (1.0 + std::abs(best));
  double eta_star = candidates.front();
  for (double eta : candidates) {
    if (objective(u, d, eta) >= best - tie) eta_star = eta;
  }
  return {best, eta_star};
}

OceResult oce_entropic(const UtilitySpec& u, const FiniteDistribution& d) {
  // -(1/beta) log E[exp(-beta X)], evaluated with a max-shifted log-sum-exp.
  const double beta = u.beta();
  double shift = kNegInf;
  for (std::size_t i = 0; i < d.values.size(); ++i) {
    if (d.probs[i] > 0.0) shift = std::max(shift, -beta * d.values[i]);
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < d.values.size(); ++i) {
    if (d.probs[i] > 0.0) acc += d.probs[i] * std::exp(-beta * d.values[i] - shift);
  }
  const double value = -(shift + std::log(acc)) / beta;
  // The optimality condition sum_i p_i exp(-beta(v_i - eta)) = 1 is solved
  // exactly by eta equal to the risk value itself.
  return {value, value};
}

OceResult oce_essinf(const FiniteDistribution& d) {
  double lo = kPosInf;
  for (std::size_t i = 0; i < d.values.size(); ++i) {
    if (d.probs[i] > 0.0) lo = std::min(lo, d.values[i]);
  }
  return {lo, lo};
}

OceResult oce_mean_variance(const UtilitySpec& u, const FiniteDistribution& d) {
  const double lo = *std::min_element(d.values.begin(), d.values.end());
  const double hi = *std::max_element(d.values.begin(), d.values.end());
  std::vector<double> cands{lo, hi};
  for (double v : d.values) {
    cands.push_back(v);
    const double knee = v - 1.0;  // where v - eta crosses the quadratic cap
    if (knee > lo && knee < hi) cands.push_back(knee);
  }
  // Interior vertex of each quadratic piece.
  std::vector<double> knots = cands;
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  for (std::size_t j = 0; j + 1 < knots.size(); ++j) {
    const double mid = 0.5 * (knots[j] + knots[j + 1]);
    double mass = 0.0, first = 0.0;
    for (std::size_t i = 0; i < d.values.size(); ++i) {
      if (d.values[i] - mid <= 1.0) {
        mass += d.probs[i];
        first += d.probs[i] * d.values[i];
      }
    }
    if (mass > 0.0) {
      const double vertex = (1.0 - mass + first) / mass;
      if (vertex > knots[j] && vertex < knots[j + 1]) cands.push_back(vertex);
    }
  }
  return best_candidate(u, d, std::move(cands));
}

}  // namespace

OceResult oce_eval(const UtilitySpec& u, const FiniteDistribution& d) {
  d.validate();
  switch (u.kind()) {
    case UtilityKind::Expectation: {
      // The objective is identically the mean; report the largest eta in range.
      const double hi = *std::max_element(d.values.begin(), d.values.end());
      return {d.mean(), hi};
    }
    case UtilityKind::Entropic:
      return oce_entropic(u, d);
    case UtilityKind::EssentialInfimum:
      return oce_essinf(d);
    case UtilityKind::Cvar:
    case UtilityKind::PiecewiseLinear:
      // Piecewise-linear concave objective: a support value attains the sup.
      return best_candidate(u, d, d.values);
    case UtilityKind::MeanVariance:
      return oce_mean_variance(u, d);
  }
  throw std::logic_error("unreachable utility kind");
}

OceResult oce_eval_generic(const UtilitySpec& u, const FiniteDistribution& d,
                           double tol) {
  d.validate();
  if (!(tol > 0.0)) throw std::invalid_argument("oce_eval_generic: tol must be positive");
  if (!u.has_full_domain())
    throw std::domain_error("outside-domain: generic solver requires a full-domain utility");

  double a = *std::min_element(d.values.begin(), d.values.end());
  double b = *std::max_element(d.values.begin(), d.values.end());
  if (b - a <= tol) {
    const double mid = 0.5 * (a + b);
    return {objective(u, d, mid), mid};
  }
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double e = a + invphi * (b - a);
  double fc = objective(u, d, c);
  double fe = objective(u, d, e);
  while (b - a > tol) {
    if (fc >= fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - invphi * (b - a);
      fc = objective(u, d, c);
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + invphi * (b - a);
      fe = objective(u, d, e);
    }
  }
  const double mid = 0.5 * (a + b);
  return {objective(u, d, mid), mid};
}

DomainBoundCheck check_domain_bound(const UtilitySpec& u, double h) {
  if (!(h >= 1.0)) throw std::invalid_argument("check_domain_bound: H must be >= 1");
  if (!u.has_full_domain())
    throw std::domain_error("outside-domain: essinf has no finite u(-H)");
  DomainBoundCheck out;
  out.u_at_minus_h = utility_eval(u, -h);
  out.rderiv_bound = utility_right_derivative(u, -(h - 1.0));
  out.holds = -out.u_at_minus_h >= out.rderiv_bound;
  return out;
}

UtilitySpec risk_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw std::invalid_argument("risk: expected an object with a \"kind\" field");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "expectation") return UtilitySpec::expectation();
  if (kind == "entropic") return UtilitySpec::entropic(j.at("beta").get<double>());
  if (kind == "cvar") return UtilitySpec::cvar(j.at("tau").get<double>());
  if (kind == "mean_variance") return UtilitySpec::mean_variance();
  if (kind == "piecewise_linear")
    return UtilitySpec::piecewise_linear(j.at("lambda1").get<double>(),
                                         j.at("lambda2").get<double>());
  if (kind == "essinf") return UtilitySpec::essential_infimum();
  throw std::invalid_argument("risk: unknown kind \"" + kind + "\"");
}

nlohmann::json risk_to_json(const UtilitySpec& u) {
  nlohmann::json j;
  switch (u.kind()) {
    case UtilityKind::Expectation: j["kind"] = "expectation"; break;
    case UtilityKind::Entropic: j["kind"] = "entropic"; j["beta"] = u.beta(); break;
    case UtilityKind::Cvar: j["kind"] = "cvar"; j["tau"] = u.tau(); break;
    case UtilityKind::MeanVariance: j["kind"] = "mean_variance"; break;
    case UtilityKind::PiecewiseLinear:
      j["kind"] = "piecewise_linear";
      j["lambda1"] = u.lambda1();
      j["lambda2"] = u.lambda2();
      break;
    case UtilityKind::EssentialInfimum: j["kind"] = "essinf"; break;
  }
  return j;
}

UtilitySpec parse_risk(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("risk: malformed JSON: ") + e.what());
  }
  return risk_from_json(j);
}

}  // namespace ocemdp
