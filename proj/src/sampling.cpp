#include "ocemdp/sampling.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ocemdp {

std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t pair_stream_seed(std::uint64_t base_seed, int s, int a) {
  std::uint64_t state = base_seed;
  std::uint64_t h = splitmix64_next(state);
  state = h ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(s) + 1));
  h = splitmix64_next(state);
  state = h ^ (0xC2B2AE3D27D4EB4FULL * (static_cast<std::uint64_t>(a) + 1));
  return splitmix64_next(state);
}

double uniform01(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

GenerativeModel::GenerativeModel(TabularMdp mdp, std::uint64_t base_seed)
    : mdp_(std::move(mdp)), base_seed_(base_seed) {
  validate(mdp_);
  engines_.reserve(static_cast<std::size_t>(mdp_.num_states) * mdp_.num_actions);
  row_cdfs_.reserve(engines_.capacity());
  for (int s = 0; s < mdp_.num_states; ++s) {
    for (int a = 0; a < mdp_.num_actions; ++a) {
      engines_.emplace_back(pair_stream_seed(base_seed_, s, a));
      std::vector<double> cdf(mdp_.num_states, 0.0);
      double acc = 0.0;
      for (int t = 0; t < mdp_.num_states; ++t) {
        acc += mdp_.transitions[s][a][t];
        cdf[t] = acc;
      }
      cdf.back() = 1.0;  // close the row against floating-point shortfall
      row_cdfs_.push_back(std::move(cdf));
    }
  }
}

int GenerativeModel::draw(int s, int a) {
  const std::size_t idx = static_cast<std::size_t>(s) * mdp_.num_actions + a;
  const double x = uniform01(engines_[idx]);
  const auto& cdf = row_cdfs_[idx];
  ++samples_;
  for (int t = 0; t < mdp_.num_states; ++t) {
    if (x < cdf[t]) return t;
  }
  return mdp_.num_states - 1;
}

EmpiricalModel estimate_model(GenerativeModel& g, std::int64_t n_per_pair) {
  if (n_per_pair < 1)
    throw std::invalid_argument("estimate_model: n_per_pair must be at least 1");
  const TabularMdp& m = g.mdp();
  EmpiricalModel out;
  out.n_per_pair = n_per_pair;
  out.counts.assign(m.num_states,
                    std::vector<std::vector<std::int64_t>>(
                        m.num_actions, std::vector<std::int64_t>(m.num_states, 0)));
  out.mdp = m;
  for (int s = 0; s < m.num_states; ++s) {
    for (int a = 0; a < m.num_actions; ++a) {
      auto& row = out.counts[s][a];
      for (std::int64_t i = 0; i < n_per_pair; ++i) ++row[g.draw(s, a)];
      for (int t = 0; t < m.num_states; ++t) {
        out.mdp.transitions[s][a][t] =
            static_cast<double>(row[t]) / static_cast<double>(n_per_pair);
      }
    }
  }
  return out;
}

namespace {

std::int64_t checked_ceil(double x) {
  if (x <= 0.0) return 0;
  const double c = std::ceil(x);
  if (c >= 9.0e18) return std::numeric_limits<std::int64_t>::max();
  return static_cast<std::int64_t>(c);
}

SampleBudget budget_from_total(double total_raw, int s_count, int a_count) {
  SampleBudget b;
  b.total = checked_ceil(total_raw);
  const std::int64_t pairs = static_cast<std::int64_t>(s_count) * a_count;
  b.n_per_pair = std::max<std::int64_t>(1, (b.total + pairs - 1) / pairs);
  return b;
}

void check_budget_inputs(const UtilitySpec& u, double gamma, int s_count, int a_count,
                         double epsilon, double delta) {
  if (!u.has_full_domain())
    throw std::domain_error("not-learnable: essential infimum admits no finite budget");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("sample_count: gamma out of range");
  if (s_count < 1 || a_count < 1)
    throw std::invalid_argument("sample_count: state and action counts must be positive");
  if (!(epsilon > 0.0) || !(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("sample_count: epsilon must be positive and delta in (0,1)");
}

}  // namespace

SampleBudget sample_count_value(const UtilitySpec& u, double gamma, int s_count,
                                int a_count, double epsilon, double delta,
                                bool as_printed) {
  check_budget_inputs(u, gamma, s_count, a_count, epsilon, delta);
  const double h = 1.0 / (1.0 - gamma);
  const double sa = static_cast<double>(s_count) * a_count;
  const double u_h = utility_eval(u, -h);
  const double du_h = utility_right_derivative(u, -h);
  double log_arg = 8.0 * gamma * sa * du_h / (epsilon * (1.0 - gamma) * (1.0 - gamma));
  if (!as_printed) log_arg /= delta;
  const double total = 32.0 * gamma * gamma * sa * u_h * u_h /
                       (epsilon * epsilon * (1.0 - gamma) * (1.0 - gamma)) *
                       std::log(log_arg);
  return budget_from_total(total, s_count, a_count);
}

SampleBudget sample_count_policy(const UtilitySpec& u, double gamma, int s_count,
                                 int a_count, double epsilon, double delta,
                                 bool as_printed) {
  check_budget_inputs(u, gamma, s_count, a_count, epsilon, delta);
  const double h = 1.0 / (1.0 - gamma);
  const double sa = static_cast<double>(s_count) * a_count;
  const double u_h = utility_eval(u, -h);
  const double du_h = utility_right_derivative(u, -h);
  const double one_minus = 1.0 - gamma;
  double log_arg = 16.0 * gamma * gamma * sa * du_h /
                   (epsilon * one_minus * one_minus * one_minus);
  if (!as_printed) log_arg /= delta;
  const double total = 128.0 * std::pow(gamma, 4) * sa * u_h * u_h /
                       (epsilon * epsilon * std::pow(one_minus, 4)) *
                       std::log(log_arg);
  return budget_from_total(total, s_count, a_count);
}

}  // namespace ocemdp
