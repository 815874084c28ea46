#pragma once

#include <cstdint>
#include <optional>

#include "ocemdp/planning.hpp"
#include "ocemdp/sampling.hpp"

namespace ocemdp {

enum class LearnMode { Value, Policy };

struct LearnOutcome {
  QTable q_hat;
  Policy pi_hat;
  std::int64_t samples_used = 0;
  std::int64_t n_per_pair = 0;
  int vi_iterations = 0;
  std::uint64_t seed = 0;
};

// Model-based pipeline: estimate transitions with n_per_pair draws per pair
// (the worst-case budget for the requested mode unless budget_override is
// given), then run value iteration on the empirical MDP at accuracy eps/2 so
// estimation and optimization split the error budget evenly.
// Throws std::domain_error ("not-learnable") for the essential infimum.
LearnOutcome mb_oce_vi(GenerativeModel& g, const UtilitySpec& u, double epsilon,
                       double delta, LearnMode mode,
                       std::optional<std::int64_t> budget_override = std::nullopt,
                       bool as_printed = false);

}  // namespace ocemdp
