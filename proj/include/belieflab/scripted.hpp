#pragma once

#include <optional>

#include "belieflab/envs/exercise.hpp"
#include "belieflab/pomdp.hpp"
#include "belieflab/user_model.hpp"

namespace belieflab {

// Decision-tree questioner that attains the task's upper bound: ask injury,
// ask outdoor, then branch; injured users are resolved after two questions,
// the rest after at most five. Runs on variable-length environments (it
// recommends as soon as the branch resolves).
struct ScriptedAgentState {
  int counter = 0;
  int last_asked = -1;
  std::optional<bool> injury;
  std::optional<bool> outdoorsy;
  std::optional<bool> extroverted;
  std::optional<bool> low_ses;
  std::optional<bool> motivated;
};

inline AgentAction scripted_next_action(const ExerciseEnv& env, ScriptedAgentState& state,
                                        std::optional<int> last_response) {
  if (state.last_asked >= 0 && last_response.has_value()) {
    // Relevant readout events sit at per-attribute offsets; category 0 is yes.
    static constexpr int kOffsets[kNumRelevantAttributes] = {0, 2, 4, 6, 9};
    const int category = *last_response - kOffsets[state.last_asked];
    const bool truthy = category == 0;
    switch (state.last_asked) {
      case kAttrInjury: state.injury = truthy; break;
      case kAttrOutdoor: state.outdoorsy = truthy; break;
      case kAttrExtroverted: state.extroverted = truthy; break;
      case kAttrLowSes: state.low_ses = truthy; break;
      case kAttrMotivation: state.motivated = truthy; break;
    }
  }

  const auto ask = [&](int attribute) {
    state.last_asked = attribute;
    ++state.counter;
    return env.action(env.ask_action(attribute));
  };
  const auto recommend = [&](int strategy) {
    state.last_asked = -1;
    ++state.counter;
    return env.action(env.recommend_action({strategy}));
  };

  switch (state.counter) {
    case 0:
      return ask(kAttrInjury);
    case 1:
      return ask(kAttrOutdoor);
    case 2:
      if (*state.injury) return recommend(*state.outdoorsy ? 1 : 2);
      if (*state.outdoorsy) return ask(kAttrExtroverted);
      return ask(kAttrLowSes);
    case 3:
      if (*state.outdoorsy) return recommend(*state.extroverted ? 4 : 3);
      if (*state.low_ses) return recommend(5);
      return ask(kAttrExtroverted);
    case 4:
      if (*state.extroverted) return recommend(8);
      return ask(kAttrMotivation);
    default:
      return recommend(*state.motivated ? 6 : 7);
  }
}

class ScriptedAgent : public Agent {
 public:
  explicit ScriptedAgent(const ExerciseEnv& env) : env_(env) {}

  void reset() override {
    state_ = ScriptedAgentState{};
    last_response_.reset();
  }

  int act(const Observation& obs, const std::vector<int>&, Rng&) override {
    last_response_.reset();
    if (!obs.events.empty() && obs.events.back().actor == Actor::User)
      last_response_ = obs.events.back().id;
    return scripted_next_action(env_, state_, last_response_).id;
  }

 private:
  const ExerciseEnv& env_;
  ScriptedAgentState state_;
  std::optional<int> last_response_;
};

}  // namespace belieflab
