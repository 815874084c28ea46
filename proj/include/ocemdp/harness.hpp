#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "ocemdp/learner.hpp"

namespace ocemdp {

// Shortest decimal form that parses back to the same double.
std::string format_double(double x);

struct WilsonInterval {
  double lo = 0.0;
  double hi = 0.0;
};

// 95% Wilson score interval for a binomial proportion.
WilsonInterval wilson95(int failures, int trials);

// Deterministic generators used by the bound suite and the tests.
TabularMdp random_mdp(std::uint64_t seed, int min_states, int max_states,
                      int max_actions, const std::vector<double>& gammas);
QTable random_qtable(std::uint64_t seed, int s_count, int a_count, double lo, double hi);
Policy random_policy(std::uint64_t seed, int s_count, int a_count);
VTable random_vtable(std::uint64_t seed, int s_count, double lo, double hi);
// Copy of m with up to max_rows transition rows blended toward fresh
// probability vectors.
TabularMdp perturb_transitions(const TabularMdp& m, std::uint64_t seed, int max_rows);
// The five full-domain utility variants with parameters drawn from seed.
std::vector<UtilitySpec> utility_panel(std::uint64_t seed);

struct ExperimentConfig {
  std::string mdp_file;       // one of mdp_file / instance is set
  nlohmann::json instance;    // named hard-instance parameters
  UtilitySpec risk = UtilitySpec::expectation();
  double epsilon = 0.0;
  double delta = 0.0;
  LearnMode mode = LearnMode::Value;
  std::vector<std::int64_t> n_grid;
  int trials = 0;
  std::uint64_t base_seed = 0;
  std::string output_path;  // prefix for <prefix>_trials.csv etc.
};

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::string& path);
TabularMdp resolve_mdp_source(const ExperimentConfig& cfg);

struct TrialRecord {
  std::int64_t n_per_pair = 0;
  int trial_index = 0;
  std::uint64_t seed = 0;
  double error_sup_norm = 0.0;
  bool failed = false;  // exactly error_sup_norm > epsilon
};

struct SummaryRow {
  std::int64_t n_per_pair = 0;
  int trials = 0;
  int failures = 0;
  double fail_rate = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
  double mean_err = 0.0;
  double max_err = 0.0;
  double wall_ms = 0.0;  // excluded from the determinism contract
};

// Monte Carlo sweep over n_grid: `trials` independent learner runs per cell
// against a tight ground truth; per-trial and summary CSVs are written under
// cfg.output_path (suffixes _trials.csv, _summary.csv, _meta.json).
// Trial seed = base_seed + 1000003 * trial_index + n.
std::vector<SummaryRow> run_pac_experiment(const ExperimentConfig& cfg);

struct ImpossibilityRow {
  double p = 0.0;
  double gap = 0.0;           // Q* difference at the start state under essinf
  double sample_bound = 0.0;  // distinguishing-sample bound (inf at p = 1)
};

std::vector<ImpossibilityRow> run_impossibility_demo(double gamma,
                                                     const std::vector<double>& p_grid,
                                                     double delta);

struct BoundSuiteReport {
  int instances = 0;
  int contraction_checks = 0, contraction_failures = 0;
  int simulation_checks = 0, simulation_failures = 0;
  int greedy_checks = 0, greedy_failures = 0;
  double worst_contraction_ratio = 0.0;  // lhs / rhs, should stay <= 1
  double worst_simulation_ratio = 0.0;
  double worst_greedy_ratio = 0.0;
  bool all_pass() const {
    return contraction_failures == 0 && simulation_failures == 0 && greedy_failures == 0;
  }
};

// Contraction, transition-perturbation and greedy-deterioration checks on
// `count` random MDPs across the full utility panel.
BoundSuiteReport run_bound_suite(int count, std::uint64_t seed);

}  // namespace ocemdp
