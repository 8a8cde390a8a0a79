#pragma once

#include <functional>
#include <string>
#include <vector>

#include "belieflab/belief.hpp"
#include "belieflab/errors.hpp"
#include "belieflab/pomdp.hpp"

namespace belieflab {

// Teaching environment with two contrasting learner styles. The extrinsic
// reward is a function of the agent's actions alone (not user-conditioned);
// adapting to the learner only shows up in the personalization score.
struct StyleEnvConfig {
  int horizon = 10;
  double spontaneous_reveal_prob = 0.3;
  double merge_action_bonus = 0.0;
  double per_teach_quality = 1.0;
  bool variable_length = false;
};

class StyleEnv : public Environment {
 public:
  static constexpr int kAskPreference = 0;
  static constexpr int kTeachStory = 1;
  static constexpr int kTeachHandsOn = 2;
  static constexpr int kTeachMerge = 3;
  static constexpr int kSmalltalk = 4;
  static constexpr int kEndSession = 5;

  static constexpr int kDiscloseStory = 0;
  static constexpr int kDiscloseHandsOn = 1;
  static constexpr int kNeutralAck = 2;
  static constexpr int kBye = 3;

  static constexpr int kTypeStory = 0;
  static constexpr int kTypeHandsOn = 1;

  explicit StyleEnv(StyleEnvConfig cfg) : cfg_(cfg) {
    if (cfg_.horizon < 2) throw ConfigError("style horizon must be >= 2");
  }

  const StyleEnvConfig& config() const { return cfg_; }

  std::string id() const override { return "style"; }
  int num_actions() const override { return cfg_.variable_length ? 6 : 5; }
  int num_user_types() const override { return 2; }
  int horizon() const override { return cfg_.horizon; }

  AgentAction action(int id) const override {
    static const char* kLabels[] = {"ask-preference", "teach-story", "teach-hands-on",
                                    "teach-merge", "smalltalk", "end-session"};
    return {id, id == kAskPreference ? ActionKind::Ask : ActionKind::Act, kLabels[id]};
  }

  UserType user_type(int id) const override {
    return {id, id == kTypeStory ? "story-telling" : "hands-on"};
  }

  Belief prior_belief() const override { return Belief::uniform(2); }

  bool is_teach(int action) const {
    return action == kTeachStory || action == kTeachHandsOn || action == kTeachMerge;
  }

  int matching_teach(int user_type) const {
    return user_type == kTypeStory ? kTeachStory : kTeachHandsOn;
  }

  std::vector<int> legal_actions(const Observation&) const override {
    std::vector<int> legal = {kAskPreference, kTeachStory, kTeachHandsOn,
                              kTeachMerge, kSmalltalk};
    if (cfg_.variable_length) legal.push_back(kEndSession);
    return legal;
  }

  bool ends_episode(const Observation& obs, int action) const override {
    return action == kEndSession || obs.turn + 1 >= cfg_.horizon;
  }

  ResponseModel response_model(const Observation&, int action) const override {
    const int n = num_user_types();
    if (action == kAskPreference) {
      ResponseModel cases(2);
      cases[0] = {kDiscloseStory, {1.0, 0.0}};
      cases[1] = {kDiscloseHandsOn, {0.0, 1.0}};
      return cases;
    }
    if (action == kEndSession) {
      return {ResponseCase{kBye, std::vector<double>(n, 1.0)}};
    }
    const double s = cfg_.spontaneous_reveal_prob;
    ResponseModel cases(3);
    cases[0] = {kDiscloseStory, {s, 0.0}};
    cases[1] = {kDiscloseHandsOn, {0.0, s}};
    cases[2] = {kNeutralAck, {1.0 - s, 1.0 - s}};
    return cases;
  }

  double step_reward(const Observation&, int action, int) const override {
    double r = 0.0;
    if (is_teach(action)) r += cfg_.per_teach_quality;
    if (action == kTeachMerge) r += cfg_.merge_action_bonus;
    return r;
  }

 private:
  StyleEnvConfig cfg_;
};

// Steps one teaching exchange with the latent learner type.
inline std::pair<int, Observation> style_step(const StyleEnv& env,
                                              const Observation& obs, int action,
                                              int user_type, Rng& rng) {
  env.validate_action(obs, action);
  TypeUser user(env, user_type);
  const int response = user.respond(obs, action, rng);
  return {response, advance(obs, action, response)};
}

// Σ over turns of teach quality plus merge bonus; a function of the agent's
// actions only, so swapping the user type cannot change it.
inline double style_extrinsic_reward(const StyleEnv& env, const Trajectory& trajectory) {
  double total = 0.0;
  for (const TurnRecord& t : trajectory.turns)
    total += env.step_reward(t.obs_before, t.action, 0);
  return total;
}

// Fraction of teach actions matching the learner's true style; teach-merge
// never matches. 0 when the agent never teaches.
inline double personalization_score(const StyleEnv& env, const Trajectory& trajectory,
                                    int user_type) {
  int teach = 0, matched = 0;
  for (const TurnRecord& t : trajectory.turns) {
    if (!env.is_teach(t.action)) continue;
    ++teach;
    if (t.action == env.matching_teach(user_type)) ++matched;
  }
  if (teach == 0) return 0.0;
  return static_cast<double>(matched) / static_cast<double>(teach);
}

// Initial-policy prior for the teaching task: once the learner's style has
// been disclosed, the matching teach action gets a logit head start. Stands
// in for a supervised-finetuned starting point that already knows how to
// adapt but not when to elicit.
inline std::function<std::vector<double>(const Observation&)> style_adaptive_prior(
    const StyleEnv& env, double logit_bonus) {
  const int n = env.num_actions();
  return [n, logit_bonus](const Observation& obs) {
    std::vector<double> logits(n, 0.0);
    for (const Event& e : obs.events) {
      if (e.actor != Actor::User) continue;
      if (e.id == StyleEnv::kDiscloseStory) {
        logits[StyleEnv::kTeachStory] = logit_bonus;
        return logits;
      }
      if (e.id == StyleEnv::kDiscloseHandsOn) {
        logits[StyleEnv::kTeachHandsOn] = logit_bonus;
        return logits;
      }
    }
    return logits;
  };
}

}  // namespace belieflab
