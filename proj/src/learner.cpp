#include "ocemdp/learner.hpp"

#include <stdexcept>

namespace ocemdp {

LearnOutcome mb_oce_vi(GenerativeModel& g, const UtilitySpec& u, double epsilon,
                       double delta, LearnMode mode,
                       std::optional<std::int64_t> budget_override, bool as_printed) {
  if (!u.has_full_domain())
    throw std::domain_error("not-learnable: essential infimum is not PAC-learnable");
  if (!(epsilon > 0.0) || !(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("mb_oce_vi: epsilon must be positive and delta in (0,1)");

  const TabularMdp& m = g.mdp();
  std::int64_t n_per_pair;
  if (budget_override.has_value()) {
    n_per_pair = *budget_override;
    if (n_per_pair < 1)
      throw std::invalid_argument("mb_oce_vi: budget_override must be at least 1");
  } else {
    const SampleBudget budget =
        mode == LearnMode::Value
            ? sample_count_value(u, m.gamma, m.num_states, m.num_actions, epsilon,
                                 delta, as_printed)
            : sample_count_policy(u, m.gamma, m.num_states, m.num_actions, epsilon,
                                  delta, as_printed);
    n_per_pair = budget.n_per_pair;
  }

  const EmpiricalModel model = estimate_model(g, n_per_pair);
  PlanningResult plan = value_iteration(model.mdp, u, epsilon / 2.0);

  LearnOutcome out;
  out.q_hat = std::move(plan.q);
  out.pi_hat = std::move(plan.policy);
  out.n_per_pair = n_per_pair;
  out.samples_used = n_per_pair * m.num_states * m.num_actions;
  out.vi_iterations = plan.iterations;
  out.seed = g.base_seed();
  return out;
}

}  // namespace ocemdp
