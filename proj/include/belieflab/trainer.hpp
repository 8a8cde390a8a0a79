#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "belieflab/belief.hpp"
#include "belieflab/errors.hpp"
#include "belieflab/pomdp.hpp"
#include "belieflab/rng.hpp"
#include "belieflab/shaping.hpp"

namespace belieflab {

inline std::vector<double> softmax(const std::vector<double>& logits) {
  double max_logit = logits[0];
  for (double z : logits) max_logit = std::max(max_logit, z);
  std::vector<double> probs(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    probs[i] = std::exp(logits[i] - max_logit);
    sum += probs[i];
  }
  for (double& p : probs) p /= sum;
  return probs;
}

// Tabular softmax policy keyed by the full observation history. Fresh keys
// start from the default-logit rule (uniform unless a warm start is set).
class PolicyTable {
 public:
  using DefaultLogitFn = std::function<std::vector<double>(const Observation&)>;

  PolicyTable(int num_actions, DefaultLogitFn default_fn = nullptr)
      : num_actions_(num_actions), default_fn_(std::move(default_fn)) {}

  int num_actions() const { return num_actions_; }

  std::vector<double> logits_for(const Observation& obs) const {
    const auto it = table_.find(obs_key(obs));
    if (it != table_.end()) return it->second;
    if (default_fn_) return default_fn_(obs);
    return std::vector<double>(num_actions_, 0.0);
  }

  // Materializes (and returns a reference to) the entry for this observation.
  std::vector<double>& touch(const Observation& obs) {
    auto [it, inserted] = table_.try_emplace(obs_key(obs));
    if (inserted) it->second = default_fn_ ? default_fn_(obs)
                                           : std::vector<double>(num_actions_, 0.0);
    return it->second;
  }

  std::vector<double>* find(const std::string& key) {
    auto it = table_.find(key);
    return it == table_.end() ? nullptr : &it->second;
  }

  // Action distribution restricted to the legal set (softmax over its logits).
  std::vector<double> distribution(const Observation& obs,
                                   const std::vector<int>& legal) const {
    const std::vector<double> logits = logits_for(obs);
    std::vector<double> sub(legal.size());
    for (std::size_t i = 0; i < legal.size(); ++i) sub[i] = logits[legal[i]];
    return softmax(sub);
  }

  int sample(const Observation& obs, const std::vector<int>& legal, Rng& rng) const {
    return legal[rng.choice(distribution(obs, legal))];
  }

  const std::unordered_map<std::string, std::vector<double>>& entries() const {
    return table_;
  }
  std::unordered_map<std::string, std::vector<double>>& entries() { return table_; }
  const DefaultLogitFn& default_fn() const { return default_fn_; }

 private:
  int num_actions_;
  DefaultLogitFn default_fn_;
  std::unordered_map<std::string, std::vector<double>> table_;
};

class PolicyAgent : public Agent {
 public:
  explicit PolicyAgent(const PolicyTable& policy) : policy_(policy) {}
  int act(const Observation& obs, const std::vector<int>& legal, Rng& rng) override {
    return policy_.sample(obs, legal, rng);
  }

 private:
  const PolicyTable& policy_;
};

// State-value estimates keyed like the policy; unseen keys value 0 and the
// post-terminal state is pinned to 0.
class ValueTable {
 public:
  double value(const std::string& key) const {
    const auto it = table_.find(key);
    return it == table_.end() ? 0.0 : it->second;
  }
  double& touch(const std::string& key) { return table_[key]; }
  const std::unordered_map<std::string, double>& entries() const { return table_; }
  std::unordered_map<std::string, double>& entries() { return table_; }

 private:
  std::unordered_map<std::string, double> table_;
};

struct WarmStartSpec {
  std::string kind;  // "" (uniform) or "style-adaptive"
  double logit_bonus = 0.0;
};

struct TrainerConfig {
  double lr_policy = 0.2;
  double lr_value = 0.2;
  int batch_size = 16;
  double kl_coef = 0.0;       // β
  double gae_lambda = 0.95;   // λ
  double turn_discount = 0.95;  // γ
  int horizon = 6;
  double alpha_ext = 1.0;
  double alpha_int = 0.0;
  ShapingKind shaping = ShapingKind::DiffAcc;
  double tau = 1.0;
  std::int64_t total_steps = 50000;  // episode budget
  std::int64_t eval_every = 1000;    // episodes between metric emissions
  int eval_episodes = 200;
  double prob_floor = 1e-6;
  std::uint64_t seed = 0;
  WarmStartSpec warm_start;
};

// r_t = α_ext·R^ext + α_int·R^int − β·KL.
inline double total_reward(double r_ext, double r_int, double kl,
                           const TrainerConfig& cfg) {
  return cfg.alpha_ext * r_ext + cfg.alpha_int * r_int - cfg.kl_coef * kl;
}

// D_KL(π ‖ π_ref) over one action distribution; both must be strictly
// positive on the same alphabet.
inline double kl_penalty(const std::vector<double>& policy_dist,
                         const std::vector<double>& ref_dist) {
  if (policy_dist.size() != ref_dist.size())
    throw LengthMismatch("kl_penalty: size mismatch");
  double d = 0.0;
  for (std::size_t a = 0; a < policy_dist.size(); ++a)
    d += policy_dist[a] * std::log(policy_dist[a] / ref_dist[a]);
  return std::max(d, 0.0);
}

// Backward recursion for the propagated per-turn signal:
//   r̂_t = r_t + γ(1−λ)·V(s_{t+1}) + γλ·r̂_{t+1},
// equal to Σ_{t'=t}^{T} (γλ)^{t'-t} [r_{t'} + γ(1−λ)V(s_{t'+1})] with
// V(s_{T+1}) = 0. values[0] is never read; values must end in the terminal 0.
inline std::vector<double> gae_propagate(const std::vector<double>& rewards,
                                         const std::vector<double>& values,
                                         double gamma, double lambda) {
  const std::size_t n = rewards.size();
  if (values.size() != n + 1)
    throw LengthMismatch("gae_propagate: need values of length rewards+1");
  if (values.back() != 0.0)
    throw LengthMismatch("gae_propagate: terminal value must be 0");
  std::vector<double> rhat(n, 0.0);
  double next = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    rhat[i] = rewards[i] + gamma * (1.0 - lambda) * values[i + 1] +
              gamma * lambda * next;
    next = rhat[i];
  }
  return rhat;
}

// One visited turn, flattened for the update rules.
struct TurnSample {
  std::string key;
  std::vector<int> legal;
  int action = 0;  // index into the full alphabet
  double rhat = 0.0;
};

// Single REINFORCE step on the batch objective (1/B)·Σ log π(a_t|s_t)·r̂_t.
// Softmax gradient at each visited key: r̂_t · (one-hot(a_t) − π(·|s_t)),
// computed against the pre-update policy.
inline void reinforce_update(PolicyTable& policy, const std::vector<TurnSample>& batch,
                             double lr, int num_episodes = 0) {
  const double scale = num_episodes > 0 ? 1.0 / num_episodes : 1.0;
  struct PendingGrad {
    std::vector<double>* logits;
    std::vector<int> legal;
    std::vector<double> grad;  // over legal indices
  };
  std::vector<PendingGrad> pending;
  std::unordered_map<std::string, std::size_t> index;
  for (const TurnSample& s : batch) {
    if (s.rhat == 0.0) continue;
    auto [it, inserted] = index.try_emplace(s.key, pending.size());
    if (inserted) {
      std::vector<double>* logits = policy.find(s.key);
      if (logits == nullptr)
        throw Error("reinforce_update: key not materialized: " + s.key);
      pending.push_back({logits, s.legal, std::vector<double>(s.legal.size(), 0.0)});
    }
    PendingGrad& pg = pending[it->second];
    std::vector<double> sub(pg.legal.size());
    for (std::size_t i = 0; i < pg.legal.size(); ++i) sub[i] = (*pg.logits)[pg.legal[i]];
    const std::vector<double> pi = softmax(sub);
    for (std::size_t i = 0; i < pg.legal.size(); ++i) {
      const double onehot = pg.legal[i] == s.action ? 1.0 : 0.0;
      pg.grad[i] += scale * s.rhat * (onehot - pi[i]);
    }
  }
  for (PendingGrad& pg : pending)
    for (std::size_t i = 0; i < pg.legal.size(); ++i)
      (*pg.logits)[pg.legal[i]] += lr * pg.grad[i];
}

struct EpisodeKeysRewards {
  std::vector<std::string> keys;   // obs-before key per turn
  std::vector<double> rewards;     // total reward per turn
};

// Moves each visited key toward the batch-mean empirical discounted
// return-to-go by step lr (exact regression step at lr = 1).
inline void value_update(ValueTable& values, const std::vector<EpisodeKeysRewards>& batch,
                         double gamma, double lr) {
  if (lr == 0.0) return;
  std::map<std::string, std::pair<double, int>> targets;
  for (const EpisodeKeysRewards& ep : batch) {
    if (ep.keys.size() != ep.rewards.size())
      throw LengthMismatch("value_update: keys/rewards length mismatch");
    double g = 0.0;
    std::vector<double> returns(ep.rewards.size());
    for (std::size_t i = ep.rewards.size(); i-- > 0;) {
      g = ep.rewards[i] + gamma * g;
      returns[i] = g;
    }
    for (std::size_t i = 0; i < ep.keys.size(); ++i) {
      auto& [sum, count] = targets[ep.keys[i]];
      sum += returns[i];
      ++count;
    }
  }
  for (const auto& [key, acc] : targets) {
    const double mean = acc.first / acc.second;
    double& v = values.touch(key);
    v += lr * (mean - v);
  }
}

struct IterationMetrics {
  std::int64_t step = 0;  // episodes consumed so far
  double mean_extrinsic = 0.0;
  double mean_intrinsic = 0.0;
  double mean_kl = 0.0;
  double success_rate = 0.0;
  double third_turn_calibrated_accuracy = 0.0;
  double mean_episode_length = 0.0;
  std::vector<std::int64_t> question_histogram;
};

// Everything train() needs beyond the config: the environment, a source of
// training users, the fixed evaluation roster, and the belief engine.
struct TrainTask {
  const Environment* env = nullptr;
  const BeliefEngine* engine = nullptr;
  std::function<std::unique_ptr<UserSim>(Rng&)> sample_train_user;
  std::vector<std::function<std::unique_ptr<UserSim>()>> eval_users;
  // Episode-level success in [0,1]; defaults to final extrinsic reward.
  std::function<double(const Trajectory&)> success;
  // Resolved warm start (the initial-policy logit rule); null means uniform.
  PolicyTable::DefaultLogitFn initial_policy_fn;
};

// Fills in per-turn intrinsic rewards from the recorded belief snapshots.
inline void apply_shaping(Trajectory& traj, ShapingKind kind, const ShapingConfig& cfg) {
  for (TurnRecord& t : traj.turns)
    t.r_int = intrinsic_reward(kind, t.belief_before, t.belief_after, traj.user.id, cfg);
}

namespace detail {

struct EvalOutcome {
  IterationMetrics metrics;
};

inline IterationMetrics run_eval(const TrainTask& task, const TrainerConfig& cfg,
                                 const PolicyTable& policy, const PolicyTable& reference,
                                 std::int64_t step, std::uint64_t eval_seed) {
  const Environment& env = *task.env;
  IterationMetrics m;
  m.step = step;
  m.question_histogram.assign(env.num_actions(), 0);
  ShapingConfig shaping_cfg{cfg.turn_discount, cfg.prob_floor, env.num_user_types()};

  PolicyAgent agent(policy);
  double kl_sum = 0.0;
  std::int64_t kl_turns = 0;
  const int episodes = cfg.eval_episodes;
  for (int e = 0; e < episodes; ++e) {
    auto user = task.eval_users[e % task.eval_users.size()]();
    Trajectory traj = rollout(env, agent, *task.engine, *user,
                              derive_seed(eval_seed, {static_cast<std::uint64_t>(e)}));
    apply_shaping(traj, cfg.shaping, shaping_cfg);

    double ext = 0.0, intr = 0.0;
    for (const TurnRecord& t : traj.turns) {
      ext += t.r_ext;
      intr += t.r_int;
      if (env.action(t.action).kind == ActionKind::Ask)
        ++m.question_histogram[t.action];
      const std::vector<int> legal = env.legal_actions(t.obs_before);
      kl_sum += kl_penalty(policy.distribution(t.obs_before, legal),
                           reference.distribution(t.obs_before, legal));
      ++kl_turns;
    }
    m.mean_extrinsic += ext;
    m.mean_intrinsic += intr;
    m.mean_episode_length += static_cast<double>(traj.turns.size());
    m.success_rate += task.success ? task.success(traj) : (traj.turns.empty() ? 0.0 : ext);

    const std::size_t cut = std::min<std::size_t>(3, traj.turns.size());
    if (cut > 0) {
      const Belief& b3 = traj.turns[cut - 1].belief_after;
      m.third_turn_calibrated_accuracy +=
          b3(traj.user.id) - 1.0 / env.num_user_types();
    }
  }
  m.mean_extrinsic /= episodes;
  m.mean_intrinsic /= episodes;
  m.mean_episode_length /= episodes;
  m.success_rate /= episodes;
  m.third_turn_calibrated_accuracy /= episodes;
  m.mean_kl = kl_turns > 0 ? kl_sum / kl_turns : 0.0;
  return m;
}

}  // namespace detail

using MetricsSink = std::function<void(const IterationMetrics&)>;
// Called at each eval point with the policy/value state; used for best-
// checkpoint selection.
using SnapshotSink =
    std::function<void(const IterationMetrics&, const PolicyTable&, const ValueTable&)>;

// Batched REINFORCE training loop: roll out B episodes, assemble per-turn
// total rewards (extrinsic, intrinsic from the belief engine, KL penalty at
// the visited key), propagate, and take one policy and one value step. The
// reference policy is the initial policy snapshot. Deterministic given the
// config seed.
inline PolicyTable train_from(const TrainTask& task, const TrainerConfig& cfg,
                              PolicyTable policy, const MetricsSink& sink,
                              const SnapshotSink& snapshot = nullptr) {
  const Environment& env = *task.env;
  const PolicyTable reference = policy;  // frozen initial snapshot
  ValueTable values;
  ShapingConfig shaping_cfg{cfg.turn_discount, cfg.prob_floor, env.num_user_types()};

  Rng sampler_rng(derive_seed(cfg.seed, {0x5a17}));
  std::int64_t episodes_done = 0;
  std::int64_t next_eval = 0;

  const auto emit = [&](std::int64_t step) {
    const IterationMetrics m = detail::run_eval(
        task, cfg, policy, reference, step,
        derive_seed(cfg.seed, {0xe7a1, static_cast<std::uint64_t>(step)}));
    if (sink) sink(m);
    if (snapshot) snapshot(m, policy, values);
  };

  emit(0);
  next_eval = cfg.eval_every;

  PolicyAgent agent(policy);
  while (episodes_done < cfg.total_steps) {
    const int batch =
        static_cast<int>(std::min<std::int64_t>(cfg.batch_size, cfg.total_steps - episodes_done));
    std::vector<TurnSample> policy_batch;
    std::vector<EpisodeKeysRewards> value_batch;

    for (int b = 0; b < batch; ++b) {
      auto user = task.sample_train_user(sampler_rng);
      Trajectory traj =
          rollout(env, agent, *task.engine, *user,
                  derive_seed(cfg.seed, {0xe9, static_cast<std::uint64_t>(episodes_done + b)}));
      apply_shaping(traj, cfg.shaping, shaping_cfg);

      const std::size_t n = traj.turns.size();
      std::vector<double> rewards(n), vals(n + 1, 0.0);
      EpisodeKeysRewards ep;
      ep.keys.reserve(n);
      std::vector<std::vector<int>> legal_per_turn(n);
      for (std::size_t t = 0; t < n; ++t) {
        const TurnRecord& rec = traj.turns[t];
        legal_per_turn[t] = env.legal_actions(rec.obs_before);
        policy.touch(rec.obs_before);
        const double kl = kl_penalty(policy.distribution(rec.obs_before, legal_per_turn[t]),
                                     reference.distribution(rec.obs_before, legal_per_turn[t]));
        rewards[t] = total_reward(rec.r_ext, rec.r_int, kl, cfg);
        ep.keys.push_back(obs_key(rec.obs_before));
        if (t > 0) vals[t] = values.value(ep.keys[t]);
      }
      ep.rewards = rewards;
      const std::vector<double> rhat =
          gae_propagate(rewards, vals, cfg.turn_discount, cfg.gae_lambda);
      for (std::size_t t = 0; t < n; ++t)
        policy_batch.push_back({ep.keys[t], legal_per_turn[t], traj.turns[t].action, rhat[t]});
      value_batch.push_back(std::move(ep));
    }

    reinforce_update(policy, policy_batch, cfg.lr_policy, batch);
    value_update(values, value_batch, cfg.turn_discount, cfg.lr_value);
    episodes_done += batch;

    if (episodes_done >= next_eval || episodes_done >= cfg.total_steps) {
      emit(episodes_done);
      while (next_eval <= episodes_done) next_eval += cfg.eval_every;
    }
  }
  return policy;
}

inline PolicyTable train(const TrainTask& task, const TrainerConfig& cfg,
                         const MetricsSink& sink, const SnapshotSink& snapshot = nullptr) {
  PolicyTable policy(task.env->num_actions(), task.initial_policy_fn);
  return train_from(task, cfg, std::move(policy), sink, snapshot);
}

}  // namespace belieflab
