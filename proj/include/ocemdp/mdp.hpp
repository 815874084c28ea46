#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace ocemdp {

// Dense tabular discounted MDP. Rewards are deterministic, state-action
// dependent and lie in [0,1]; transitions are indexed [s][a][s'].
struct TabularMdp {
  int num_states = 0;
  int num_actions = 0;
  double gamma = 0.0;
  std::vector<std::vector<double>> rewards;                   // [s][a]
  std::vector<std::vector<std::vector<double>>> transitions;  // [s][a][s']

  double horizon() const { return 1.0 / (1.0 - gamma); }
};

using VTable = std::vector<double>;
using QTable = std::vector<std::vector<double>>;  // [s][a]
using Policy = std::vector<int>;                  // action index per state

// Throws std::invalid_argument ("invalid-mdp: ...") naming the first violated
// invariant: shape mismatch, gamma out of range, reward out of range, or a
// transition row that is not a probability vector.
void validate(const TabularMdp& m);

// V(s) = max_a Q(s,a).
VTable v_from_q(const QTable& q);

// Row argmax with the lowest action index on ties.
Policy greedy_from_q(const QTable& q);

double sup_norm_diff(const QTable& a, const QTable& b);
double sup_norm_diff(const VTable& a, const VTable& b);

nlohmann::json mdp_to_json(const TabularMdp& m);
TabularMdp mdp_from_json(const nlohmann::json& j);
TabularMdp load_mdp(const std::string& path);
void save_mdp(const TabularMdp& m, const std::string& path);

}  // namespace ocemdp
