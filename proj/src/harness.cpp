#include "ocemdp/harness.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <thread>

#include "ocemdp/instances.hpp"
#include "ocemdp/planning.hpp"

namespace ocemdp {

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

WilsonInterval wilson95(int failures, int trials) {
  const double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double ph = failures / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (ph + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(ph * (1.0 - ph) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

namespace {

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  double u01() { return uniform01(eng); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }
  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(eng() % static_cast<std::uint64_t>(hi - lo + 1));
  }
};

std::vector<double> random_simplex(Rng& rng, int n) {
  std::vector<double> row(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    row[i] = -std::log(1.0 - rng.u01());
    total += row[i];
  }
  for (int i = 0; i < n; ++i) row[i] /= total;
  return row;
}

void run_indexed(int n, const std::function<void(int)>& fn) {
  const unsigned hw = std::thread::hardware_concurrency();
  const int workers = static_cast<int>(std::min<unsigned>(hw == 0 ? 1 : hw, 16));
  if (n < 2 || workers < 2) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

TabularMdp random_mdp(std::uint64_t seed, int min_states, int max_states,
                      int max_actions, const std::vector<double>& gammas) {
  Rng rng(seed);
  TabularMdp m;
  m.num_states = rng.uniform_int(min_states, max_states);
  m.num_actions = rng.uniform_int(1, max_actions);
  m.gamma = gammas[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(gammas.size()) - 1))];
  m.rewards.assign(m.num_states, std::vector<double>(m.num_actions, 0.0));
  m.transitions.assign(m.num_states,
                       std::vector<std::vector<double>>(m.num_actions));
  for (int s = 0; s < m.num_states; ++s) {
    for (int a = 0; a < m.num_actions; ++a) {
      m.rewards[s][a] = rng.u01();
      m.transitions[s][a] = random_simplex(rng, m.num_states);
    }
  }
  return m;
}

QTable random_qtable(std::uint64_t seed, int s_count, int a_count, double lo, double hi) {
  Rng rng(seed);
  QTable q(s_count, std::vector<double>(a_count, 0.0));
  for (auto& row : q)
    for (auto& x : row) x = rng.uniform(lo, hi);
  return q;
}

Policy random_policy(std::uint64_t seed, int s_count, int a_count) {
  Rng rng(seed);
  Policy pi(s_count);
  for (auto& a : pi) a = rng.uniform_int(0, a_count - 1);
  return pi;
}

VTable random_vtable(std::uint64_t seed, int s_count, double lo, double hi) {
  Rng rng(seed);
  VTable v(s_count);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

TabularMdp perturb_transitions(const TabularMdp& m, std::uint64_t seed, int max_rows) {
  Rng rng(seed);
  TabularMdp out = m;
  const int rows = std::max(1, std::min(max_rows, m.num_states * m.num_actions));
  for (int r = 0; r < rows; ++r) {
    const int s = rng.uniform_int(0, m.num_states - 1);
    const int a = rng.uniform_int(0, m.num_actions - 1);
    const double w = rng.uniform(0.05, 0.5);
    const std::vector<double> fresh = random_simplex(rng, m.num_states);
    double total = 0.0;
    for (int t = 0; t < m.num_states; ++t) {
      out.transitions[s][a][t] = (1.0 - w) * m.transitions[s][a][t] + w * fresh[t];
      total += out.transitions[s][a][t];
    }
    for (int t = 0; t < m.num_states; ++t) out.transitions[s][a][t] /= total;
  }
  return out;
}

std::vector<UtilitySpec> utility_panel(std::uint64_t seed) {
  Rng rng(seed);
  return {
      UtilitySpec::expectation(),
      UtilitySpec::entropic(rng.uniform(0.25, 2.0)),
      UtilitySpec::cvar(rng.uniform(0.15, 0.85)),
      UtilitySpec::mean_variance(),
      UtilitySpec::piecewise_linear(rng.uniform(0.0, 0.8), rng.uniform(1.2, 4.0)),
  };
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  const auto& src = j.at("mdp");
  if (src.contains("file")) {
    cfg.mdp_file = src.at("file").get<std::string>();
  } else if (src.contains("instance")) {
    cfg.instance = src.at("instance");
  } else {
    throw std::invalid_argument("experiment config: mdp needs a file or an instance");
  }
  cfg.risk = risk_from_json(j.at("risk"));
  cfg.epsilon = j.at("epsilon").get<double>();
  cfg.delta = j.at("delta").get<double>();
  const std::string mode = j.at("mode").get<std::string>();
  if (mode == "value") cfg.mode = LearnMode::Value;
  else if (mode == "policy") cfg.mode = LearnMode::Policy;
  else throw std::invalid_argument("experiment config: mode must be value or policy");
  cfg.n_grid = j.at("n_grid").get<std::vector<std::int64_t>>();
  cfg.trials = j.at("trials").get<int>();
  cfg.base_seed = j.at("base_seed").get<std::uint64_t>();
  cfg.output_path = j.at("output_path").get<std::string>();

  if (cfg.trials < 1)
    throw std::invalid_argument("experiment config: trials must be at least 1");
  if (cfg.n_grid.empty())
    throw std::invalid_argument("experiment config: n_grid must be nonempty");
  for (std::size_t i = 0; i + 1 < cfg.n_grid.size(); ++i) {
    if (cfg.n_grid[i] >= cfg.n_grid[i + 1])
      throw std::invalid_argument("experiment config: n_grid must be strictly increasing");
  }
  if (cfg.n_grid.front() < 1)
    throw std::invalid_argument("experiment config: n_grid entries must be positive");
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  in >> j;
  return experiment_config_from_json(j);
}

TabularMdp resolve_mdp_source(const ExperimentConfig& cfg) {
  if (!cfg.mdp_file.empty()) return load_mdp(cfg.mdp_file);
  const auto& inst = cfg.instance;
  const std::string kind = inst.at("kind").get<std::string>();
  if (kind == "impossibility") {
    return build_impossibility_mdp(inst.at("gamma").get<double>(), inst.at("p").get<double>());
  }
  if (kind == "value-lb") {
    MdpPair pair = build_value_lb_pair(
        inst.value("S", 1), inst.value("A", 1), inst.at("gamma").get<double>(),
        inst.at("p").get<double>(), inst.at("alpha").get<double>(), inst.value("i", 0));
    const std::string member = inst.value("member", "m0");
    if (member == "m0") return pair.m0;
    if (member == "m1") return pair.m1;
    throw std::invalid_argument("experiment config: value-lb member must be m0 or m1");
  }
  if (kind == "policy-lb") {
    return build_policy_lb_family(
        inst.value("S", 1), inst.value("A", 1), inst.at("gamma").get<double>(),
        inst.at("p").get<double>(), inst.at("alpha").get<double>(), inst.value("i", 0),
        inst.value("l", 0));
  }
  throw std::invalid_argument("experiment config: unknown instance kind \"" + kind + "\"");
}

namespace {

void ensure_parent_dir(const std::string& path) {
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

}  // namespace

std::vector<SummaryRow> run_pac_experiment(const ExperimentConfig& cfg) {
  if (!cfg.risk.has_full_domain())
    throw std::domain_error("not-learnable: experiments require a full-domain utility");
  const TabularMdp mdp = resolve_mdp_source(cfg);
  validate(mdp);

  const double truth_tol = cfg.epsilon / 100.0;
  const QTable q_star = exact_q_star(mdp, cfg.risk, truth_tol);
  const VTable v_star = v_from_q(q_star);

  ensure_parent_dir(cfg.output_path);
  std::ofstream trials_csv(cfg.output_path + "_trials.csv");
  std::ofstream summary_csv(cfg.output_path + "_summary.csv");
  if (!trials_csv || !summary_csv)
    throw std::runtime_error("cannot write experiment output under " + cfg.output_path);
  trials_csv << "n_per_pair,trial_index,seed,error_sup_norm,failed\n";
  summary_csv << "n_per_pair,trials,failures,fail_rate,wilson_lo,wilson_hi,"
                 "mean_err,max_err,wall_ms\n";

  std::vector<SummaryRow> rows;
  for (const std::int64_t n : cfg.n_grid) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<TrialRecord> records(cfg.trials);
    run_indexed(cfg.trials, [&](int trial) {
      const std::uint64_t seed =
          cfg.base_seed + 1000003ULL * static_cast<std::uint64_t>(trial) +
          static_cast<std::uint64_t>(n);
      GenerativeModel g(mdp, seed);
      const LearnOutcome out =
          mb_oce_vi(g, cfg.risk, cfg.epsilon, cfg.delta, cfg.mode, n);
      double err;
      if (cfg.mode == LearnMode::Value) {
        err = sup_norm_diff(q_star, out.q_hat);
      } else {
        const VTable v_pi = policy_value(mdp, cfg.risk, out.pi_hat, truth_tol);
        err = sup_norm_diff(v_star, v_pi);
      }
      records[trial] = {n, trial, seed, err, err > cfg.epsilon};
    });
    const auto t1 = std::chrono::steady_clock::now();

    SummaryRow row;
    row.n_per_pair = n;
    row.trials = cfg.trials;
    double err_sum = 0.0;
    for (const TrialRecord& r : records) {
      trials_csv << r.n_per_pair << ',' << r.trial_index << ',' << r.seed << ','
                 << format_double(r.error_sup_norm) << ',' << (r.failed ? 1 : 0) << '\n';
      row.failures += r.failed ? 1 : 0;
      err_sum += r.error_sup_norm;
      row.max_err = std::max(row.max_err, r.error_sup_norm);
    }
    row.fail_rate = static_cast<double>(row.failures) / cfg.trials;
    const WilsonInterval wi = wilson95(row.failures, cfg.trials);
    row.wilson_lo = wi.lo;
    row.wilson_hi = wi.hi;
    row.mean_err = err_sum / cfg.trials;
    row.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    summary_csv << row.n_per_pair << ',' << row.trials << ',' << row.failures << ','
                << format_double(row.fail_rate) << ',' << format_double(row.wilson_lo)
                << ',' << format_double(row.wilson_hi) << ','
                << format_double(row.mean_err) << ',' << format_double(row.max_err)
                << ',' << format_double(row.wall_ms) << '\n';
    rows.push_back(row);
  }

  nlohmann::json meta;
  meta["rng_stream"] = kRngStreamId;
  meta["risk"] = risk_to_json(cfg.risk);
  meta["epsilon"] = cfg.epsilon;
  meta["delta"] = cfg.delta;
  meta["mode"] = cfg.mode == LearnMode::Value ? "value" : "policy";
  meta["n_grid"] = cfg.n_grid;
  meta["trials"] = cfg.trials;
  meta["base_seed"] = cfg.base_seed;
  std::ofstream meta_out(cfg.output_path + "_meta.json");
  meta_out << meta.dump(2) << "\n";
  return rows;
}

std::vector<ImpossibilityRow> run_impossibility_demo(double gamma,
                                                     const std::vector<double>& p_grid,
                                                     double delta) {
  const UtilitySpec essinf = UtilitySpec::essential_infimum();
  const TabularMdp sure = build_impossibility_mdp(gamma, 1.0);
  const double q_sure = exact_q_star(sure, essinf, 1e-10)[0][0];
  std::vector<ImpossibilityRow> rows;
  rows.reserve(p_grid.size());
  for (const double p : p_grid) {
    const TabularMdp risky = build_impossibility_mdp(gamma, p);
    ImpossibilityRow row;
    row.p = p;
    row.gap = q_sure - exact_q_star(risky, essinf, 1e-10)[0][0];
    row.sample_bound = std::ceil(distinguishing_sample_bound(p, delta));
    rows.push_back(row);
  }
  return rows;
}

BoundSuiteReport run_bound_suite(int count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("run_bound_suite: count must be at least 1");
  BoundSuiteReport report;
  report.instances = count;
  std::uint64_t chain = seed;
  for (int i = 0; i < count; ++i) {
    const std::uint64_t s0 = splitmix64_next(chain);
    const std::uint64_t s1 = splitmix64_next(chain);
    const std::uint64_t s2 = splitmix64_next(chain);
    const std::uint64_t s3 = splitmix64_next(chain);
    const std::uint64_t s4 = splitmix64_next(chain);
    const std::uint64_t s5 = splitmix64_next(chain);

    const TabularMdp m = random_mdp(s0, 2, 6, 4, {0.5, 0.9, 0.95});
    const double h = m.horizon();
    const QTable qa = random_qtable(s1, m.num_states, m.num_actions, 0.0, h);
    const QTable qb = random_qtable(s2, m.num_states, m.num_actions, 0.0, h);
    const TabularMdp perturbed = perturb_transitions(m, s3, 3);
    const Policy pi = random_policy(s4, m.num_states, m.num_actions);

    for (const UtilitySpec& u : utility_panel(s5)) {
      {
        const double lhs =
            sup_norm_diff(bellman_optimal_apply(m, u, qa), bellman_optimal_apply(m, u, qb));
        const double rhs = m.gamma * sup_norm_diff(qa, qb);
        ++report.contraction_checks;
        if (lhs > rhs + 1e-9) ++report.contraction_failures;
        if (rhs > 0.0)
          report.worst_contraction_ratio =
              std::max(report.worst_contraction_ratio, lhs / rhs);
      }
      {
        const SimulationBoundCheck c = simulation_bound_check(m, perturbed, u, pi, 1e-8);
        ++report.simulation_checks;
        if (!c.holds) ++report.simulation_failures;
        if (c.rhs > 0.0)
          report.worst_simulation_ratio =
              std::max(report.worst_simulation_ratio, c.lhs / c.rhs);
      }
      {
        VTable vbar = v_from_q(exact_q_star(m, u, 1e-11));
        const VTable noise = random_vtable(s5 ^ 0x5bd1e995, m.num_states, -0.5, 0.5);
        for (int s = 0; s < m.num_states; ++s) vbar[s] += noise[s];
        const GreedyBoundCheck c = greedy_bound_check(m, u, vbar, 1e-8);
        ++report.greedy_checks;
        if (!c.holds) ++report.greedy_failures;
        if (c.bound > 0.0)
          report.worst_greedy_ratio = std::max(report.worst_greedy_ratio, c.gap / c.bound);
      }
    }
  }
  return report;
}

}  // namespace ocemdp
