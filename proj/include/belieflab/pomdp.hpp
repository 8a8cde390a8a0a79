#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "belieflab/belief.hpp"
#include "belieflab/errors.hpp"
#include "belieflab/rng.hpp"

namespace belieflab {

enum class Actor { Agent, User };

struct Event {
  Actor actor;
  int id;
  bool operator==(const Event&) const = default;
};

// The observable conversation state: the full event history plus the number
// of completed agent–user exchanges. Append-only.
struct Observation {
  std::vector<Event> events;
  int turn = 0;

  bool operator==(const Observation&) const = default;
};

inline std::string obs_key(const Observation& obs) {
  std::string key = "t";
  key += std::to_string(obs.turn);
  key += ':';
  for (const Event& e : obs.events) {
    key += (e.actor == Actor::Agent) ? 'a' : 'u';
    key += std::to_string(e.id);
    key += ';';
  }
  return key;
}

// Appends one agent action and the user's response, completing an exchange.
inline Observation advance(const Observation& obs, int action, int response) {
  Observation next = obs;
  next.events.push_back({Actor::Agent, action});
  next.events.push_back({Actor::User, response});
  next.turn = obs.turn + 1;
  return next;
}

enum class ActionKind { Ask, Act, Recommend };

struct AgentAction {
  int id = 0;
  ActionKind kind = ActionKind::Act;
  std::string label;
};

struct UserType {
  int id = 0;
  std::string label;
};

struct ExtendedState {
  Observation obs;
  UserType user;
};

// One possible user response to a (observation, action) pair, with its
// probability under each user type. The per-type probabilities across all
// cases of a response model sum to 1.
struct ResponseCase {
  int event = 0;
  std::vector<double> prob_per_type;
};

using ResponseModel = std::vector<ResponseCase>;

// Type-conditioned environment specification. The response model doubles as
// the likelihood rule (exact Bayes reads one case's column) and as the
// transition rule (stepping samples from one type's row).
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string id() const = 0;
  virtual int num_actions() const = 0;
  virtual int num_user_types() const = 0;
  virtual int horizon() const = 0;

  virtual AgentAction action(int id) const = 0;
  virtual UserType user_type(int id) const = 0;
  virtual Belief prior_belief() const = 0;

  virtual std::vector<int> legal_actions(const Observation& obs) const = 0;
  virtual ResponseModel response_model(const Observation& obs, int action) const = 0;

  // Per-turn reward conditioned on the user type; sparse environments return
  // 0 everywhere except the final action.
  virtual double step_reward(const Observation& obs, int action, int user_type) const = 0;

  // Whether taking `action` from `obs` ends the episode (counting the
  // horizon cap).
  virtual bool ends_episode(const Observation& obs, int /*action*/) const {
    return obs.turn + 1 >= horizon();
  }

  // Throws EpisodeOver / RecommendBeforeFinalTurn / PolicyActionOutOfRange.
  virtual void validate_action(const Observation& obs, int action) const {
    if (obs.turn >= horizon()) throw EpisodeOver("episode already at horizon");
    if (action < 0 || action >= num_actions())
      throw PolicyActionOutOfRange("action " + std::to_string(action) +
                                   " outside alphabet of size " +
                                   std::to_string(num_actions()));
  }
};

// The latent conversation partner. Responses must be distributed per the
// environment's response model conditioned on the instance's type.
class UserSim {
 public:
  virtual ~UserSim() = default;
  virtual int type() const = 0;
  virtual int respond(const Observation& obs, int action, Rng& rng) = 0;
  virtual void reset() {}
};

// Generic user driven directly by the environment's type-conditioned model.
class TypeUser : public UserSim {
 public:
  TypeUser(const Environment& env, int type) : env_(env), type_(type) {}

  int type() const override { return type_; }

  int respond(const Observation& obs, int action, Rng& rng) override {
    const ResponseModel cases = env_.response_model(obs, action);
    std::vector<double> weights(cases.size());
    for (std::size_t i = 0; i < cases.size(); ++i)
      weights[i] = cases[i].prob_per_type[type_];
    return cases[rng.choice(weights)].event;
  }

 private:
  const Environment& env_;
  int type_;
};

class Agent {
 public:
  virtual ~Agent() = default;
  virtual int act(const Observation& obs, const std::vector<int>& legal, Rng& rng) = 0;
  virtual void reset() {}
};

class UniformRandomAgent : public Agent {
 public:
  int act(const Observation&, const std::vector<int>& legal, Rng& rng) override {
    return legal[rng.uniform_int(static_cast<int>(legal.size()))];
  }
};

struct TurnRecord {
  Observation obs_before;
  int action = 0;
  int user_response = 0;
  Observation obs_after;
  Belief belief_before;
  Belief belief_after;
  double r_ext = 0.0;
  double r_int = 0.0;
};

struct Trajectory {
  std::string env_id;
  std::vector<TurnRecord> turns;
  UserType user;
  std::uint64_t seed = 0;

  Observation final_observation() const {
    return turns.empty() ? Observation{} : turns.back().obs_after;
  }
};

// Produces a belief from a trajectory prefix.
class BeliefEngine {
 public:
  virtual ~BeliefEngine() = default;
  virtual Belief prior() const = 0;
  virtual Belief predict(const Trajectory& trajectory) const = 0;
};

// Runs one episode. Pure function of (env, agent state, engine, user, seed):
// the policy and environment consume independent derived streams so that a
// recorded trajectory can be re-executed from its actions alone.
inline Trajectory rollout(const Environment& env, Agent& agent,
                          const BeliefEngine& engine, UserSim& user,
                          std::uint64_t seed) {
  Rng rng_policy(derive_seed(seed, {0}));
  Rng rng_env(derive_seed(seed, {1}));
  agent.reset();
  user.reset();

  Trajectory traj;
  traj.env_id = env.id();
  traj.user = env.user_type(user.type());
  traj.seed = seed;

  Observation obs;
  Belief belief = engine.prior();
  while (obs.turn < env.horizon()) {
    const std::vector<int> legal = env.legal_actions(obs);
    const int action = agent.act(obs, legal, rng_policy);
    env.validate_action(obs, action);

    const double r_ext = env.step_reward(obs, action, user.type());
    const int response = user.respond(obs, action, rng_env);
    const Observation next = advance(obs, action, response);

    traj.turns.push_back(TurnRecord{obs, action, response, next, belief, belief,
                                    r_ext, 0.0});
    const Belief after = engine.predict(traj);
    traj.turns.back().belief_after = after;

    const bool done = env.ends_episode(obs, action);
    belief = after;
    obs = next;
    if (done) break;
  }
  return traj;
}

}  // namespace belieflab
