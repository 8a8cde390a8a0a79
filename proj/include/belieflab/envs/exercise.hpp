#pragma once

#include <algorithm>
#include <cassert>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "belieflab/belief.hpp"
#include "belieflab/errors.hpp"
#include "belieflab/pomdp.hpp"
#include "belieflab/rng.hpp"
#include "belieflab/user_model.hpp"

namespace belieflab {

enum class Ses { Low, Medium, High };

// The latent user. The five relevant traits determine the correct strategy;
// age and the distractor ids are superficial variation.
struct UserProfile {
  int age = 30;
  Ses ses = Ses::Medium;
  bool injury = false;
  bool extroverted = false;       // otherwise introverted
  bool highly_motivated = true;   // otherwise struggling with motivation
  bool outdoorsy = false;         // otherwise indoorsy
  std::vector<int> distractor_ids;
};

struct StrategyId {
  int value = 1;  // 1..8
  bool operator==(const StrategyId&) const = default;
};

// Decision tree mapping the relevant traits to the ideal strategy:
//   1 walking in parks        injury, outdoorsy
//   2 yoga/tai chi at home    injury, indoorsy
//   3 jogging or hiking       no injury, outdoorsy, introverted
//   4 team sport              no injury, outdoorsy, extroverted
//   5 gym membership discount no injury, indoorsy, low SES
//   6 home gym equipment      no injury, indoorsy, not low SES, introverted, motivated
//   7 personal trainer        no injury, indoorsy, not low SES, introverted, struggling
//   8 group class at the gym  no injury, indoorsy, not low SES, extroverted
inline StrategyId ground_truth_strategy(const UserProfile& p) {
  if (p.injury) return {p.outdoorsy ? 1 : 2};
  if (p.outdoorsy) return {p.extroverted ? 4 : 3};
  if (p.ses == Ses::Low) return {5};
  if (p.extroverted) return {8};
  return {p.highly_motivated ? 6 : 7};
}

// Samples a profile from the population distribution: age uniform on 15..64,
// SES (0.2, 0.6, 0.2), injury forced when age >= 55 else Bernoulli(0.1),
// introverted 0.6, motivated 0.5, outdoorsy 0.4.
inline UserProfile sample_profile(Rng& rng, int num_distractors = 15,
                                  int distractor_values = 3) {
  UserProfile p;
  p.ses = static_cast<Ses>(rng.choice({0.2, 0.6, 0.2}));
  p.age = 15 + rng.uniform_int(50);
  p.injury = (p.age >= 55) ? true : rng.bernoulli(0.1);
  p.extroverted = !rng.bernoulli(0.6);
  p.highly_motivated = rng.bernoulli(0.5);
  p.outdoorsy = rng.bernoulli(0.4);
  p.distractor_ids.resize(num_distractors);
  for (int& d : p.distractor_ids) d = rng.uniform_int(distractor_values);
  return p;
}

struct ExerciseEnvConfig {
  int horizon = 6;
  int num_distractors = 15;
  double response_noise = 0.0;  // probability a readout lands on a wrong category
  bool variable_length = false; // allow recommending before the final turn
};

namespace detail {

struct AttributeDef {
  std::string name;
  std::vector<double> prior;  // over categories; category 0 is the "True" answer
};

struct ExerciseSchema {
  std::string env_id;
  std::vector<AttributeDef> attributes;
  // allowed[strategy][attribute] -> categories consistent with the strategy.
  std::vector<std::vector<std::vector<int>>> allowed;
  std::vector<std::string> strategy_labels;
};

inline ExerciseSchema full_exercise_schema(const AttributePriors& pr) {
  ExerciseSchema s;
  s.env_id = "exercise";
  const double not_low = 1.0 - pr.low_ses;
  s.attributes = {
      {"injury", {pr.injury, 1.0 - pr.injury}},
      {"outdoor", {pr.outdoor, 1.0 - pr.outdoor}},
      {"extroverted", {pr.extroverted, 1.0 - pr.extroverted}},
      {"ses", {pr.low_ses, not_low * 0.75, not_low * 0.25}},
      {"motivation", {pr.motivation, 1.0 - pr.motivation}},
  };
  const std::vector<int> any2 = {0, 1};
  const std::vector<int> any3 = {0, 1, 2};
  const std::vector<int> yes = {0}, no = {1};
  const std::vector<int> low = {0}, not_low_set = {1, 2};
  s.allowed = {
      {yes, yes, any2, any3, any2},        // 1 walking in parks
      {yes, no, any2, any3, any2},         // 2 yoga/tai chi at home
      {no, yes, no, any3, any2},           // 3 jogging or hiking
      {no, yes, yes, any3, any2},          // 4 team sport
      {no, no, any2, low, any2},           // 5 gym membership discount
      {no, no, no, not_low_set, yes},      // 6 home gym equipment
      {no, no, no, not_low_set, no},       // 7 personal trainer
      {no, no, yes, not_low_set, any2},    // 8 group class at the gym
  };
  s.strategy_labels = {"walking-in-parks", "yoga-at-home", "jogging-or-hiking",
                       "team-sport",       "gym-discount", "home-gym-equipment",
                       "personal-trainer", "group-class"};
  return s;
}

// Smaller instance used for exhaustive belief-MDP verification: three binary
// attributes and the six strategies their rule tree induces.
inline ExerciseSchema reduced_exercise_schema() {
  ExerciseSchema s;
  s.env_id = "exercise-reduced";
  s.attributes = {
      {"injury", {0.25, 0.75}},
      {"outdoor", {0.4, 0.6}},
      {"extroverted", {0.4, 0.6}},
  };
  const std::vector<int> any2 = {0, 1};
  const std::vector<int> yes = {0}, no = {1};
  s.allowed = {
      {yes, yes, any2}, {yes, no, any2},  {no, yes, no},
      {no, yes, yes},   {no, no, no},     {no, no, yes},
  };
  s.strategy_labels = {"r1", "r2", "r3", "r4", "r5", "r6"};
  return s;
}

}  // namespace detail

// Conversation environment for the recommendation task. Actions are
// structured asks (relevant and distractor questions) plus a final
// recommendation; user responses are category readouts through a symmetric
// noise channel. Response likelihoods condition on the full disclosure
// history, so a repeated noiseless question is deterministic and carries no
// information.
class ExerciseEnv : public Environment {
 public:
  static constexpr int kDistractorValues = 3;

  ExerciseEnv(detail::ExerciseSchema schema, ExerciseEnvConfig cfg)
      : schema_(std::move(schema)), cfg_(cfg) {
    if (cfg_.horizon < 2) throw ConfigError("exercise horizon must be >= 2");
    event_offset_.resize(schema_.attributes.size() + 1);
    int off = 0;
    for (std::size_t a = 0; a < schema_.attributes.size(); ++a) {
      event_offset_[a] = off;
      off += static_cast<int>(schema_.attributes[a].prior.size());
    }
    event_offset_.back() = off;
  }

  const ExerciseEnvConfig& config() const { return cfg_; }

  std::string id() const override { return schema_.env_id; }
  int num_user_types() const override { return static_cast<int>(schema_.allowed.size()); }
  int horizon() const override { return cfg_.horizon; }

  int num_relevant() const { return static_cast<int>(schema_.attributes.size()); }
  int num_asks() const { return num_relevant() + cfg_.num_distractors; }
  int num_actions() const override { return num_asks() + num_user_types(); }

  int ask_action(int attribute) const { return attribute; }
  int distractor_action(int j) const { return num_relevant() + j; }
  int recommend_action(StrategyId k) const { return num_asks() + k.value - 1; }
  bool is_ask(int action) const { return action >= 0 && action < num_asks(); }
  bool is_relevant_ask(int action) const { return action >= 0 && action < num_relevant(); }
  bool is_recommend(int action) const {
    return action >= num_asks() && action < num_actions();
  }
  StrategyId recommended_strategy(int action) const {
    return {action - num_asks() + 1};
  }

  AgentAction action(int id) const override {
    if (is_relevant_ask(id))
      return {id, ActionKind::Ask, "ask-" + schema_.attributes[id].name};
    if (is_ask(id))
      return {id, ActionKind::Ask, "ask-distractor-" + std::to_string(id - num_relevant())};
    return {id, ActionKind::Recommend,
            "recommend-" + std::to_string(recommended_strategy(id).value)};
  }

  UserType user_type(int id) const override { return {id, schema_.strategy_labels[id]}; }

  Belief prior_belief() const override {
    std::vector<double> probs(num_user_types());
    for (int u = 0; u < num_user_types(); ++u) {
      double mass = 1.0;
      for (int a = 0; a < num_relevant(); ++a) {
        double sum = 0.0;
        for (int c : schema_.allowed[u][a]) sum += schema_.attributes[a].prior[c];
        mass *= sum;
      }
      probs[u] = mass;
    }
    return Belief::normalized(probs);
  }

  int ack_event() const { return event_offset_.back() + kDistractorValues * cfg_.num_distractors; }
  int readout_event(int attribute, int category) const {
    return event_offset_[attribute] + category;
  }
  int distractor_event(int j, int value) const {
    return event_offset_.back() + kDistractorValues * j + value;
  }

  std::vector<int> legal_actions(const Observation& obs) const override {
    std::vector<int> legal;
    const bool final_turn = obs.turn == cfg_.horizon - 1;
    if (!final_turn)
      for (int a = 0; a < num_asks(); ++a) legal.push_back(a);
    if (final_turn || cfg_.variable_length)
      for (int a = num_asks(); a < num_actions(); ++a) legal.push_back(a);
    return legal;
  }

  void validate_action(const Observation& obs, int action) const override {
    Environment::validate_action(obs, action);
    const bool final_turn = obs.turn == cfg_.horizon - 1;
    if (is_recommend(action) && !final_turn && !cfg_.variable_length)
      throw RecommendBeforeFinalTurn("recommend at turn " + std::to_string(obs.turn) +
                                     " of horizon " + std::to_string(cfg_.horizon));
    if (is_ask(action) && final_turn)
      throw PolicyActionOutOfRange("ask at the final turn");
  }

  bool ends_episode(const Observation& obs, int action) const override {
    return is_recommend(action) || obs.turn + 1 >= cfg_.horizon;
  }

  ResponseModel response_model(const Observation& obs, int action) const override {
    if (is_recommend(action)) {
      return {ResponseCase{ack_event(), std::vector<double>(num_user_types(), 1.0)}};
    }
    if (is_relevant_ask(action)) {
      const int attr = action;
      const int n = num_categories(attr);
      const std::vector<int> readouts = past_readouts(obs, attr);
      ResponseModel cases(n);
      for (int r = 0; r < n; ++r) {
        cases[r].event = readout_event(attr, r);
        cases[r].prob_per_type.resize(num_user_types());
      }
      for (int u = 0; u < num_user_types(); ++u) {
        const std::vector<double> w = category_posterior(attr, schema_.allowed[u][attr], readouts);
        for (int r = 0; r < n; ++r) {
          double p = 0.0;
          for (int c = 0; c < n; ++c) p += w[c] * channel(attr, r, c);
          cases[r].prob_per_type[u] = p;
        }
      }
      return cases;
    }
    // Distractor: same machinery with a uniform prior and no constraints, so
    // the likelihood column is identical for every type.
    const int j = action - num_relevant();
    const std::vector<int> readouts = past_distractor_readouts(obs, j);
    std::vector<double> w(kDistractorValues, 1.0 / kDistractorValues);
    if (!readouts.empty()) {
      for (int c = 0; c < kDistractorValues; ++c)
        for (int r : readouts) w[c] *= distractor_channel(r, c);
      double sum = w[0] + w[1] + w[2];
      if (sum <= 0.0) {
        w.assign(kDistractorValues, 1.0 / kDistractorValues);
      } else {
        for (double& x : w) x /= sum;
      }
    }
    ResponseModel cases(kDistractorValues);
    for (int v = 0; v < kDistractorValues; ++v) {
      double p = 0.0;
      for (int c = 0; c < kDistractorValues; ++c) p += w[c] * distractor_channel(v, c);
      cases[v].event = distractor_event(j, v);
      cases[v].prob_per_type.assign(num_user_types(), p);
    }
    return cases;
  }

  double step_reward(const Observation&, int action, int user_type) const override {
    if (!is_recommend(action)) return 0.0;
    return recommended_strategy(action).value == user_type + 1 ? 1.0 : 0.0;
  }

  // Samples the user's response given the fixed latent profile.
  int respond_as_profile(const Observation&, int action, const UserProfile& p,
                         Rng& rng) const {
    if (is_recommend(action)) return ack_event();
    if (is_relevant_ask(action)) {
      const int attr = action;
      return readout_event(attr, noisy_readout(attr, profile_category(p, attr), rng));
    }
    const int j = action - num_relevant();
    const int value = p.distractor_ids.at(j);
    int readout = value;
    if (cfg_.response_noise > 0.0 && rng.bernoulli(cfg_.response_noise)) {
      const int shift = 1 + rng.uniform_int(kDistractorValues - 1);
      readout = (value + shift) % kDistractorValues;
    }
    return distractor_event(j, readout);
  }

  int profile_category(const UserProfile& p, int attribute) const {
    switch (attribute) {
      case kAttrInjury: return p.injury ? 0 : 1;
      case kAttrOutdoor: return p.outdoorsy ? 0 : 1;
      case kAttrExtroverted: return p.extroverted ? 0 : 1;
      case kAttrLowSes:
        return p.ses == Ses::Low ? 0 : (p.ses == Ses::Medium ? 1 : 2);
      case kAttrMotivation: return p.highly_motivated ? 0 : 1;
    }
    throw Error("profile_category: bad attribute");
  }

  int num_categories(int attribute) const {
    return static_cast<int>(schema_.attributes[attribute].prior.size());
  }

 private:
  double channel(int attribute, int readout, int category) const {
    const double rho = cfg_.response_noise;
    if (rho <= 0.0) return readout == category ? 1.0 : 0.0;
    const int n = num_categories(attribute);
    return readout == category ? 1.0 - rho : rho / (n - 1);
  }

  double distractor_channel(int readout, int category) const {
    const double rho = cfg_.response_noise;
    if (rho <= 0.0) return readout == category ? 1.0 : 0.0;
    return readout == category ? 1.0 - rho : rho / (kDistractorValues - 1);
  }

  int noisy_readout(int attribute, int category, Rng& rng) const {
    if (cfg_.response_noise <= 0.0 || !rng.bernoulli(cfg_.response_noise))
      return category;
    const int n = num_categories(attribute);
    const int shift = 1 + rng.uniform_int(n - 1);
    return (category + shift) % n;
  }

  // Posterior over the attribute's category given the allowed set and past
  // noisy readouts. Returns uniform when the history is impossible under the
  // constraint; callers with exact beliefs have already zeroed such types.
  std::vector<double> category_posterior(int attribute, const std::vector<int>& allowed,
                                         const std::vector<int>& readouts) const {
    const int n = num_categories(attribute);
    std::vector<double> w(n, 0.0);
    for (int c : allowed) w[c] = schema_.attributes[attribute].prior[c];
    for (int r : readouts)
      for (int c = 0; c < n; ++c) w[c] *= channel(attribute, r, c);
    double sum = 0.0;
    for (double x : w) sum += x;
    if (sum <= 0.0) {
      w.assign(n, 1.0 / n);
    } else {
      for (double& x : w) x /= sum;
    }
    return w;
  }

  std::vector<int> past_readouts(const Observation& obs, int attribute) const {
    std::vector<int> readouts;
    for (std::size_t i = 0; i + 1 < obs.events.size(); i += 2) {
      if (obs.events[i].id == ask_action(attribute)) {
        const int e = obs.events[i + 1].id;
        readouts.push_back(e - event_offset_[attribute]);
      }
    }
    return readouts;
  }

  std::vector<int> past_distractor_readouts(const Observation& obs, int j) const {
    std::vector<int> readouts;
    for (std::size_t i = 0; i + 1 < obs.events.size(); i += 2) {
      if (obs.events[i].id == distractor_action(j)) {
        const int e = obs.events[i + 1].id;
        readouts.push_back(e - event_offset_.back() - kDistractorValues * j);
      }
    }
    return readouts;
  }

  detail::ExerciseSchema schema_;
  ExerciseEnvConfig cfg_;
  std::vector<int> event_offset_;
};

inline ExerciseEnv make_exercise_env(ExerciseEnvConfig cfg = {},
                                     const AttributePriors& priors = {}) {
  return ExerciseEnv(detail::full_exercise_schema(priors), cfg);
}

inline ExerciseEnv make_reduced_exercise_env(int num_distractors = 1,
                                             int horizon = 4) {
  ExerciseEnvConfig cfg;
  cfg.horizon = horizon;
  cfg.num_distractors = num_distractors;
  return ExerciseEnv(detail::reduced_exercise_schema(), cfg);
}

// Steps the conversation one exchange: validates the action, samples the
// user's response from the profile, and appends both events.
inline std::pair<int, Observation> exercise_step(const ExerciseEnv& env,
                                                 const Observation& obs, int action,
                                                 const UserProfile& profile, Rng& rng) {
  env.validate_action(obs, action);
  const int response = env.respond_as_profile(obs, action, profile, rng);
  return {response, advance(obs, action, response)};
}

// 1.0 iff the trajectory's final action recommends the profile's ground
// truth strategy; extrinsic reward is zero at every other turn.
inline double exercise_extrinsic_reward(const ExerciseEnv& env,
                                        const Trajectory& trajectory,
                                        const UserProfile& profile) {
  if (trajectory.turns.empty()) return 0.0;
  const int last_action = trajectory.turns.back().action;
  if (!env.is_recommend(last_action)) return 0.0;
  return env.recommended_strategy(last_action) == ground_truth_strategy(profile)
             ? 1.0
             : 0.0;
}

class ProfileUser : public UserSim {
 public:
  ProfileUser(const ExerciseEnv& env, UserProfile profile)
      : env_(env), profile_(std::move(profile)) {}

  const UserProfile& profile() const { return profile_; }
  int type() const override { return ground_truth_strategy(profile_).value - 1; }

  int respond(const Observation& obs, int action, Rng& rng) override {
    return env_.respond_as_profile(obs, action, profile_, rng);
  }

 private:
  const ExerciseEnv& env_;
  UserProfile profile_;
};

// Reads the structured disclosures out of an exercise trajectory. An
// attribute is True/False iff the matching question was asked and answered;
// the latest answer wins, so repeats are idempotent when noiseless.
inline AnswerSheet extract_answers(const Trajectory& trajectory) {
  if (trajectory.env_id != "exercise")
    throw WrongEnvironment("extract_answers: trajectory from '" +
                           trajectory.env_id + "'");
  AnswerSheet sheet = all_unknown_sheet();
  for (const TurnRecord& turn : trajectory.turns) {
    if (turn.action < 0 || turn.action >= kNumRelevantAttributes) continue;
    const int attr = turn.action;
    // Event ids for relevant readouts: attribute offsets {0,2,4,6,9}.
    static constexpr int kOffsets[kNumRelevantAttributes] = {0, 2, 4, 6, 9};
    const int category = turn.user_response - kOffsets[attr];
    const int n = attr == kAttrLowSes ? 3 : 2;
    if (category < 0 || category >= n)
      throw WrongEnvironment("extract_answers: response outside attribute range");
    const bool truthy = category == 0;  // low SES maps low -> True, else False
    sheet[attr] = truthy ? AttributeAnswer::True : AttributeAnswer::False;
  }
  return sheet;
}

// The task's oracle user model: reads disclosures from the conversation and
// applies the strategy product formulas, optionally tempered.
class OracleClassifierEngine : public BeliefEngine {
 public:
  explicit OracleClassifierEngine(AttributePriors priors = {}, double tau = 1.0)
      : priors_(priors), tau_(tau) {}

  Belief prior() const override {
    return temper(strategy_distribution(all_unknown_sheet(), priors_), tau_);
  }

  Belief predict(const Trajectory& trajectory) const override {
    return temper(strategy_distribution(extract_answers(trajectory), priors_), tau_);
  }

 private:
  AttributePriors priors_;
  double tau_;
};

}  // namespace belieflab
