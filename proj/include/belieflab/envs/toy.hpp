#pragma once

#include <string>
#include <vector>

#include "belieflab/belief.hpp"
#include "belieflab/pomdp.hpp"
#include "belieflab/rng.hpp"

namespace belieflab {

// Small memoryless environment defined by explicit tables; handy for
// exhaustive solves and for constructing counterexamples.
class TabularEnv : public Environment {
 public:
  struct Tables {
    std::string id = "toy";
    int horizon = 2;
    Belief prior = Belief::uniform(2);
    // likelihood[action][event][type] = P(event | action, type)
    std::vector<std::vector<std::vector<double>>> likelihood;
    // reward[action][type], paid at every turn unless final_only.
    std::vector<std::vector<double>> reward;
    bool final_reward_only = false;
  };

  explicit TabularEnv(Tables t) : t_(std::move(t)) {}

  std::string id() const override { return t_.id; }
  int num_actions() const override { return static_cast<int>(t_.likelihood.size()); }
  int num_user_types() const override { return t_.prior.size(); }
  int horizon() const override { return t_.horizon; }

  AgentAction action(int id) const override {
    return {id, ActionKind::Act, "action-" + std::to_string(id)};
  }
  UserType user_type(int id) const override {
    return {id, "type-" + std::to_string(id)};
  }
  Belief prior_belief() const override { return t_.prior; }

  std::vector<int> legal_actions(const Observation&) const override {
    std::vector<int> legal(num_actions());
    for (int a = 0; a < num_actions(); ++a) legal[a] = a;
    return legal;
  }

  ResponseModel response_model(const Observation&, int action) const override {
    const auto& rows = t_.likelihood[action];
    ResponseModel cases(rows.size());
    for (std::size_t e = 0; e < rows.size(); ++e) cases[e] = {static_cast<int>(e), rows[e]};
    return cases;
  }

  double step_reward(const Observation& obs, int action, int user_type) const override {
    if (t_.final_reward_only && obs.turn != t_.horizon - 1) return 0.0;
    return t_.reward[action][user_type];
  }

 private:
  Tables t_;
};

// Randomly generated two-type instance with dense per-turn rewards.
inline TabularEnv random_two_type_env(std::uint64_t seed, int num_actions = 3,
                                      int num_events = 3, int horizon = 3) {
  Rng rng(derive_seed(seed, {0x70f}));
  TabularEnv::Tables t;
  t.id = "toy-" + std::to_string(seed);
  t.horizon = horizon;
  const double p0 = 0.2 + 0.6 * rng.uniform();
  t.prior = Belief({p0, 1.0 - p0});
  t.likelihood.resize(num_actions);
  t.reward.resize(num_actions);
  for (int a = 0; a < num_actions; ++a) {
    t.likelihood[a].assign(num_events, std::vector<double>(2, 0.0));
    for (int u = 0; u < 2; ++u) {
      std::vector<double> w(num_events);
      double sum = 0.0;
      for (int e = 0; e < num_events; ++e) {
        w[e] = 0.05 + rng.uniform();
        sum += w[e];
      }
      for (int e = 0; e < num_events; ++e) t.likelihood[a][e][u] = w[e] / sum;
    }
    t.reward[a] = {rng.uniform(), rng.uniform()};
  }
  return TabularEnv(std::move(t));
}

}  // namespace belieflab
