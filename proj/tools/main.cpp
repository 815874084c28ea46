#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ocemdp/harness.hpp"
#include "ocemdp/instances.hpp"
#include "ocemdp/learner.hpp"
#include "ocemdp/planning.hpp"

namespace {

using nlohmann::json;
using namespace ocemdp;

void emit(const json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << j.dump(2) << "\n";
  }
}

int run_solve(const std::string& mdp_path, const std::string& risk_text, double tol) {
  const TabularMdp m = load_mdp(mdp_path);
  const UtilitySpec u = parse_risk(risk_text);
  const QTable q = exact_q_star(m, u, tol);
  json out;
  out["q_star"] = q;
  out["v_star"] = v_from_q(q);
  out["policy"] = greedy_from_q(q);
  std::cout << out.dump(2) << "\n";
  return 0;
}

int run_learn(const std::string& mdp_path, const std::string& risk_text, double eps,
              double delta, const std::string& mode_text,
              std::optional<std::int64_t> n_override, std::uint64_t seed,
              bool as_printed) {
  const TabularMdp m = load_mdp(mdp_path);
  const UtilitySpec u = parse_risk(risk_text);
  const LearnMode mode = mode_text == "policy" ? LearnMode::Policy : LearnMode::Value;
  GenerativeModel g(m, seed);
  const LearnOutcome out = mb_oce_vi(g, u, eps, delta, mode, n_override, as_printed);
  json j;
  j["q_hat"] = out.q_hat;
  j["pi_hat"] = out.pi_hat;
  j["samples_used"] = out.samples_used;
  j["n_per_pair"] = out.n_per_pair;
  j["vi_iterations"] = out.vi_iterations;
  j["seed"] = out.seed;
  j["rng_stream"] = kRngStreamId;
  std::cout << j.dump(2) << "\n";
  return 0;
}

int run_experiment(const std::string& config_path) {
  const ExperimentConfig cfg = load_experiment_config(config_path);
  std::cout << "rng_stream: " << kRngStreamId << "\n";
  const std::vector<SummaryRow> rows = run_pac_experiment(cfg);
  std::cout << "n_per_pair,trials,failures,fail_rate,wilson_lo,wilson_hi\n";
  for (const SummaryRow& r : rows) {
    std::cout << r.n_per_pair << ',' << r.trials << ',' << r.failures << ','
              << format_double(r.fail_rate) << ',' << format_double(r.wilson_lo) << ','
              << format_double(r.wilson_hi) << "\n";
  }
  std::cout << "wrote " << cfg.output_path << "_trials.csv and _summary.csv\n";
  return 0;
}

int run_instance(const std::string& kind, double gamma, double p, double alpha,
                 int s_count, int a_count, int i, int l, const std::string& out_path) {
  if (kind == "impossibility") {
    emit(mdp_to_json(build_impossibility_mdp(gamma, p)), out_path);
  } else if (kind == "value-lb") {
    const MdpPair pair = build_value_lb_pair(s_count, a_count, gamma, p, alpha, i);
    json j;
    j["m0"] = mdp_to_json(pair.m0);
    j["m1"] = mdp_to_json(pair.m1);
    emit(j, out_path);
  } else {
    const TabularMdp m = build_policy_lb_family(s_count, a_count, gamma, p, alpha, i, l);
    json j = mdp_to_json(m);
    j["effective_actions"] = a_count + 1;
    emit(j, out_path);
  }
  return 0;
}

int run_demo(double gamma, double delta, const std::vector<double>& p_grid) {
  const auto rows = run_impossibility_demo(gamma, p_grid, delta);
  std::cout << "p,gap,sample_bound\n";
  for (const auto& r : rows) {
    std::cout << format_double(r.p) << ',' << format_double(r.gap) << ','
              << format_double(r.sample_bound) << "\n";
  }
  return 0;
}

int run_check(int count, std::uint64_t seed) {
  const BoundSuiteReport rep = run_bound_suite(count, seed);
  std::cout << "instances: " << rep.instances << "\n"
            << "contraction: " << rep.contraction_checks - rep.contraction_failures
            << "/" << rep.contraction_checks
            << " pass, worst ratio " << format_double(rep.worst_contraction_ratio) << "\n"
            << "simulation:  " << rep.simulation_checks - rep.simulation_failures
            << "/" << rep.simulation_checks
            << " pass, worst ratio " << format_double(rep.worst_simulation_ratio) << "\n"
            << "greedy:      " << rep.greedy_checks - rep.greedy_failures
            << "/" << rep.greedy_checks
            << " pass, worst ratio " << format_double(rep.worst_greedy_ratio) << "\n";
  if (!rep.all_pass()) {
    std::cout << "FAIL\n";
    return 1;
  }
  std::cout << "OK\n";
  return 0;
}

int run_budget(const std::string& risk_text, double gamma, int s_count, int a_count,
               double eps, double delta, const std::string& mode_text, bool as_printed) {
  const UtilitySpec u = parse_risk(risk_text);
  const SampleBudget b =
      mode_text == "policy"
          ? sample_count_policy(u, gamma, s_count, a_count, eps, delta, as_printed)
          : sample_count_value(u, gamma, s_count, a_count, eps, delta, as_printed);
  json j;
  j["total"] = b.total;
  j["n_per_pair"] = b.n_per_pair;
  j["mode"] = mode_text;
  j["as_printed"] = as_printed;
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk-sensitive planning and learning on tabular discounted MDPs"};
  app.require_subcommand(1);

  std::string mdp_path, risk_text, mode_text = "value", config_path, kind, out_path;
  double tol = 1e-9, eps = 0.1, delta = 0.1, gamma = 0.9, p = 0.9, alpha = 0.0;
  int s_count = 1, a_count = 1, pair_i = 0, hyp_l = 0, count = 100;
  std::uint64_t seed = 1;
  std::int64_t n_override = -1;
  bool as_printed = false;
  std::vector<double> p_grid;

  auto* solve = app.add_subcommand("solve", "Exact planning: Q*, V* and a greedy policy");
  solve->add_option("--mdp", mdp_path, "MDP JSON file")->required();
  solve->add_option("--risk", risk_text, "risk JSON, e.g. {\"kind\":\"cvar\",\"tau\":0.5}")->required();
  solve->add_option("--tol", tol, "sup-norm accuracy of the fixed point");

  auto* learn = app.add_subcommand("learn", "Model-based learning from a seeded simulator");
  learn->add_option("--mdp", mdp_path)->required();
  learn->add_option("--risk", risk_text)->required();
  learn->add_option("--epsilon", eps)->required();
  learn->add_option("--delta", delta)->required();
  learn->add_option("--mode", mode_text)->check(CLI::IsMember({"value", "policy"}));
  learn->add_option("--n", n_override, "per-pair sample override");
  learn->add_option("--seed", seed);
  learn->add_flag("--as-printed", as_printed, "verbatim delta-free budget");

  auto* experiment = app.add_subcommand("experiment", "Monte Carlo PAC sweep from a config file");
  experiment->add_option("--config", config_path)->required();

  auto* instance = app.add_subcommand("instance", "Emit a hard-instance MDP as JSON");
  instance->add_option("--kind", kind)
      ->check(CLI::IsMember({"value-lb", "policy-lb", "impossibility"}))
      ->required();
  instance->add_option("--gamma", gamma)->required();
  instance->add_option("--p", p)->required();
  instance->add_option("--alpha", alpha);
  instance->add_option("--S", s_count);
  instance->add_option("--A", a_count);
  instance->add_option("--i", pair_i);
  instance->add_option("--l", hyp_l);
  instance->add_option("--out", out_path);

  auto* demo = app.add_subcommand("demo-impossibility",
                                  "Value gaps vs. distinguishing-sample bounds");
  demo->add_option("--gamma", gamma)->required();
  demo->add_option("--delta", delta)->required();
  demo->add_option("--p-grid", p_grid)->delimiter(',')->required();

  auto* check = app.add_subcommand("check", "Random-instance bound suite");
  check->add_option("--count", count);
  check->add_option("--seed", seed);

  auto* budget = app.add_subcommand("budget", "Worst-case generative-model budgets");
  budget->add_option("--risk", risk_text)->required();
  budget->add_option("--gamma", gamma)->required();
  budget->add_option("--S", s_count)->required();
  budget->add_option("--A", a_count)->required();
  budget->add_option("--epsilon", eps)->required();
  budget->add_option("--delta", delta)->required();
  budget->add_option("--mode", mode_text)->check(CLI::IsMember({"value", "policy"}));
  budget->add_flag("--as-printed", as_printed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (solve->parsed()) return run_solve(mdp_path, risk_text, tol);
    if (learn->parsed()) {
      std::optional<std::int64_t> n;
      if (n_override >= 0) n = n_override;
      return run_learn(mdp_path, risk_text, eps, delta, mode_text, n, seed, as_printed);
    }
    if (experiment->parsed()) return run_experiment(config_path);
    if (instance->parsed())
      return run_instance(kind, gamma, p, alpha, s_count, a_count, pair_i, hyp_l, out_path);
    if (demo->parsed()) return run_demo(gamma, delta, p_grid);
    if (check->parsed()) return run_check(count, seed);
    if (budget->parsed())
      return run_budget(risk_text, gamma, s_count, a_count, eps, delta, mode_text, as_printed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
