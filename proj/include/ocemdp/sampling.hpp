#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ocemdp/mdp.hpp"
#include "ocemdp/risk.hpp"

namespace ocemdp {

// Stream identifier recorded in experiment outputs. Per-pair substreams are
// seeded by splitmix64 folds of (base_seed, s, a); each substream drives an
// mt19937_64 whose top 53 bits map to a uniform in [0,1), converted to a next
// state by inverse CDF over the transition row. No library distribution
// adapters are used, so the stream is reproducible across platforms.
inline constexpr const char* kRngStreamId = "splitmix64/mt19937_64/53bit-invcdf-v1";

std::uint64_t splitmix64_next(std::uint64_t& state);
std::uint64_t pair_stream_seed(std::uint64_t base_seed, int s, int a);
double uniform01(std::mt19937_64& engine);

// Simulator over a tabular MDP: one independent substream per (s,a), so the
// i-th draw from a pair does not depend on how calls interleave across pairs.
class GenerativeModel {
 public:
  GenerativeModel(TabularMdp mdp, std::uint64_t base_seed);

  // Next state sampled from P(.|s,a); advances the pair's substream.
  int draw(int s, int a);

  const TabularMdp& mdp() const { return mdp_; }
  std::uint64_t base_seed() const { return base_seed_; }
  std::uint64_t samples_drawn() const { return samples_; }

 private:
  TabularMdp mdp_;
  std::uint64_t base_seed_ = 0;
  std::uint64_t samples_ = 0;
  std::vector<std::mt19937_64> engines_;        // one per (s,a)
  std::vector<std::vector<double>> row_cdfs_;   // one per (s,a)
};

// Plug-in transition estimate from exactly n_per_pair draws per (s,a).
struct EmpiricalModel {
  std::vector<std::vector<std::vector<std::int64_t>>> counts;  // [s][a][s']
  std::int64_t n_per_pair = 0;
  TabularMdp mdp;  // counts/N transitions, true rewards and gamma
};

EmpiricalModel estimate_model(GenerativeModel& g, std::int64_t n_per_pair);

struct SampleBudget {
  std::int64_t total = 0;       // total generative-model calls T
  std::int64_t n_per_pair = 0;  // ceil(T / (S*A)), at least 1
};

// Worst-case generative-model budgets. By default the logarithm's argument is
// scaled by 1/delta so the budget responds to the confidence level; with
// as_printed the verbatim delta-free expression is evaluated instead.
// Throws std::domain_error ("not-learnable") for the essential infimum.
SampleBudget sample_count_value(const UtilitySpec& u, double gamma, int s_count,
                                int a_count, double epsilon, double delta,
                                bool as_printed = false);
SampleBudget sample_count_policy(const UtilitySpec& u, double gamma, int s_count,
                                 int a_count, double epsilon, double delta,
                                 bool as_printed = false);

}  // namespace ocemdp
