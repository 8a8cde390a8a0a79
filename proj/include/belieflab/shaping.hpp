#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "belieflab/belief.hpp"
#include "belieflab/errors.hpp"

namespace belieflab {

enum class PotentialKind { Acc, LogAcc, NegEnt };

enum class ShapingKind { DiffAcc, DiffLogAcc, DiffEnt, Acc, Ent, InfoGain };

// The Diff* variants are potential differences and leave the optimal policy
// unchanged; the others are per-turn bonuses without that guarantee.
inline bool is_potential_based(ShapingKind kind) {
  return kind == ShapingKind::DiffAcc || kind == ShapingKind::DiffLogAcc ||
         kind == ShapingKind::DiffEnt;
}

inline std::string shaping_name(ShapingKind kind) {
  switch (kind) {
    case ShapingKind::DiffAcc: return "diffacc";
    case ShapingKind::DiffLogAcc: return "difflogacc";
    case ShapingKind::DiffEnt: return "diffent";
    case ShapingKind::Acc: return "acc";
    case ShapingKind::Ent: return "ent";
    case ShapingKind::InfoGain: return "infogain";
  }
  throw Error("shaping_name: bad kind");
}

inline ShapingKind shaping_from_name(const std::string& name) {
  if (name == "diffacc") return ShapingKind::DiffAcc;
  if (name == "difflogacc") return ShapingKind::DiffLogAcc;
  if (name == "diffent") return ShapingKind::DiffEnt;
  if (name == "acc") return ShapingKind::Acc;
  if (name == "ent") return ShapingKind::Ent;
  if (name == "infogain") return ShapingKind::InfoGain;
  throw ConfigError("unknown shaping kind: " + name);
}

inline std::string potential_name(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::Acc: return "acc";
    case PotentialKind::LogAcc: return "logacc";
    case PotentialKind::NegEnt: return "negent";
  }
  throw Error("potential_name: bad kind");
}

inline PotentialKind potential_from_name(const std::string& name) {
  if (name == "acc") return PotentialKind::Acc;
  if (name == "logacc") return PotentialKind::LogAcc;
  if (name == "negent") return PotentialKind::NegEnt;
  throw ConfigError("unknown potential kind: " + name);
}

struct ShapingConfig {
  double gamma = 0.95;       // turn discount
  double prob_floor = 1e-6;  // clamp inside logs and KL denominators
  int num_user_types = 2;
};

// Shannon entropy in nats, 0·log 0 := 0.
inline double entropy(const Belief& b) {
  double h = 0.0;
  for (int u = 0; u < b.size(); ++u) {
    const double p = b(u);
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

// D_KL(b_new ‖ b_old) in nats; the denominator is floored so a vanished
// prior entry cannot blow up the divergence.
inline double kl_divergence(const Belief& b_new, const Belief& b_old,
                            double prob_floor = 1e-6) {
  if (b_new.size() != b_old.size())
    throw LengthMismatch("kl_divergence: size mismatch");
  double d = 0.0;
  for (int u = 0; u < b_new.size(); ++u) {
    const double p = b_new(u);
    if (p > 0.0) d += p * std::log(p / std::max(b_old(u), prob_floor));
  }
  return std::max(d, 0.0);
}

inline double potential(PotentialKind kind, const Belief& b, int true_type,
                        const ShapingConfig& cfg = {}) {
  switch (kind) {
    case PotentialKind::Acc:
      return b(true_type);
    case PotentialKind::LogAcc:
      return std::log(std::max(b(true_type), cfg.prob_floor));
    case PotentialKind::NegEnt:
      return -entropy(b);
  }
  throw Error("potential: bad kind");
}

// r_base + γ·φ(b_after) − φ(b_before).
inline double shaped_reward(double r_base, const Belief& b_before,
                            const Belief& b_after, PotentialKind kind,
                            int true_type, const ShapingConfig& cfg) {
  return r_base + cfg.gamma * potential(kind, b_after, true_type, cfg) -
         potential(kind, b_before, true_type, cfg);
}

inline double intrinsic_reward(ShapingKind kind, const Belief& b_before,
                               const Belief& b_after, int true_type,
                               const ShapingConfig& cfg) {
  switch (kind) {
    case ShapingKind::DiffAcc:
      return shaped_reward(0.0, b_before, b_after, PotentialKind::Acc, true_type, cfg);
    case ShapingKind::DiffLogAcc:
      return shaped_reward(0.0, b_before, b_after, PotentialKind::LogAcc, true_type, cfg);
    case ShapingKind::DiffEnt:
      return shaped_reward(0.0, b_before, b_after, PotentialKind::NegEnt, true_type, cfg);
    case ShapingKind::Acc:
      return b_after(true_type) - 1.0 / static_cast<double>(cfg.num_user_types);
    case ShapingKind::Ent:
      return std::log(static_cast<double>(cfg.num_user_types)) - entropy(b_after);
    case ShapingKind::InfoGain:
      return kl_divergence(b_after, b_before, cfg.prob_floor);
  }
  throw Error("intrinsic_reward: bad kind");
}

}  // namespace belieflab
