#include "ocemdp/mdp.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace ocemdp {

void validate(const TabularMdp& m) {
  if (m.num_states <= 0 || m.num_actions <= 0)
    throw std::invalid_argument("invalid-mdp: state and action counts must be positive");
  if (!(m.gamma > 0.0 && m.gamma < 1.0))
    throw std::invalid_argument("invalid-mdp: gamma out of range");
  const std::size_t s_count = static_cast<std::size_t>(m.num_states);
  const std::size_t a_count = static_cast<std::size_t>(m.num_actions);
  if (m.rewards.size() != s_count || m.transitions.size() != s_count)
    throw std::invalid_argument("invalid-mdp: table shape mismatch");
  for (std::size_t s = 0; s < s_count; ++s) {
    if (m.rewards[s].size() != a_count || m.transitions[s].size() != a_count)
      throw std::invalid_argument("invalid-mdp: table shape mismatch");
    for (std::size_t a = 0; a < a_count; ++a) {
      const double r = m.rewards[s][a];
      if (!(r >= 0.0 && r <= 1.0))
        throw std::invalid_argument("invalid-mdp: reward out of range");
      const auto& row = m.transitions[s][a];
      if (row.size() != s_count)
        throw std::invalid_argument("invalid-mdp: table shape mismatch");
      double total = 0.0;
      for (double p : row) {
        if (!(p >= 0.0))
          throw std::invalid_argument("invalid-mdp: negative transition probability");
        total += p;
      }
      if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("invalid-mdp: row not stochastic");
    }
  }
}

VTable v_from_q(const QTable& q) {
  VTable v(q.size());
  for (std::size_t s = 0; s < q.size(); ++s) {
    double best = q[s][0];
    for (double x : q[s]) best = std::max(best, x);
    v[s] = best;
  }
  return v;
}

Policy greedy_from_q(const QTable& q) {
  Policy pi(q.size());
  for (std::size_t s = 0; s < q.size(); ++s) {
    int best = 0;
    for (std::size_t a = 1; a < q[s].size(); ++a) {
      if (q[s][a] > q[s][best]) best = static_cast<int>(a);
    }
    pi[s] = best;
  }
  return pi;
}

double sup_norm_diff(const QTable& a, const QTable& b) {
  double m = 0.0;
  for (std::size_t s = 0; s < a.size(); ++s)
    for (std::size_t i = 0; i < a[s].size(); ++i)
      m = std::max(m, std::abs(a[s][i] - b[s][i]));
  return m;
}

double sup_norm_diff(const VTable& a, const VTable& b) {
  double m = 0.0;
  for (std::size_t s = 0; s < a.size(); ++s) m = std::max(m, std::abs(a[s] - b[s]));
  return m;
}

nlohmann::json mdp_to_json(const TabularMdp& m) {
  nlohmann::json j;
  j["gamma"] = m.gamma;
  j["num_states"] = m.num_states;
  j["num_actions"] = m.num_actions;
  j["rewards"] = m.rewards;
  j["transitions"] = m.transitions;
  return j;
}

TabularMdp mdp_from_json(const nlohmann::json& j) {
  TabularMdp m;
  m.gamma = j.at("gamma").get<double>();
  m.num_states = j.at("num_states").get<int>();
  m.num_actions = j.at("num_actions").get<int>();
  m.rewards = j.at("rewards").get<std::vector<std::vector<double>>>();
  m.transitions = j.at("transitions").get<std::vector<std::vector<std::vector<double>>>>();
  validate(m);
  return m;
}

TabularMdp load_mdp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open MDP file: " + path);
  nlohmann::json j;
  in >> j;
  return mdp_from_json(j);
}

void save_mdp(const TabularMdp& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write MDP file: " + path);
  out << mdp_to_json(m).dump(2) << "\n";
}

}  // namespace ocemdp
