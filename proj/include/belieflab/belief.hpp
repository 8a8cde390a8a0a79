#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "belieflab/errors.hpp"

namespace belieflab {

constexpr double kBeliefTolerance = 1e-9;

// Probability distribution over user types. Immutable after construction;
// every operation that emits a Belief renormalizes.
class Belief {
 public:
  explicit Belief(std::vector<double> probs) : probs_(std::move(probs)) {
    double sum = 0.0;
    for (double p : probs_) {
      if (p < 0.0) throw Error("Belief: negative entry");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kBeliefTolerance)
      throw Error("Belief: entries sum to " + std::to_string(sum));
  }

  // Builds a belief from nonnegative weights, normalizing them.
  static Belief normalized(const std::vector<double>& weights) {
    double sum = 0.0;
    for (double w : weights) sum += w;
    if (sum <= 0.0) throw ZeroEvidence("normalized: all weights zero");
    std::vector<double> probs(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) probs[i] = weights[i] / sum;
    return Belief(std::move(probs));
  }

  static Belief uniform(int n) {
    return Belief(std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }

  static Belief one_hot(int n, int index) {
    std::vector<double> p(n, 0.0);
    p[index] = 1.0;
    return Belief(std::move(p));
  }

  double operator()(int u) const { return probs_[u]; }
  int size() const { return static_cast<int>(probs_.size()); }
  const std::vector<double>& probs() const { return probs_; }

  int argmax() const {
    int best = 0;
    for (int i = 1; i < size(); ++i)
      if (probs_[i] > probs_[best]) best = i;
    return best;
  }

  bool operator==(const Belief& other) const { return probs_ == other.probs_; }

 private:
  std::vector<double> probs_;
};

// Bayes rule: result(u) ∝ likelihoods(u) · b(u). Throws ZeroEvidence when the
// observed response is impossible under every type with positive prior.
inline Belief belief_update(const Belief& b, const std::vector<double>& likelihoods) {
  if (static_cast<int>(likelihoods.size()) != b.size())
    throw LengthMismatch("belief_update: likelihood length != belief length");
  std::vector<double> weights(likelihoods.size());
  double evidence = 0.0;
  for (int u = 0; u < b.size(); ++u) {
    weights[u] = likelihoods[u] * b(u);
    evidence += weights[u];
  }
  if (evidence <= 0.0)
    throw ZeroEvidence("belief_update: evidence has zero probability");
  for (double& w : weights) w /= evidence;
  return Belief(std::move(weights));
}

// Expected reward over the belief: Σ_u b(u)·r(u).
inline double expected_reward(const Belief& b, const std::vector<double>& per_type_rewards) {
  if (static_cast<int>(per_type_rewards.size()) != b.size())
    throw LengthMismatch("expected_reward: reward length != belief length");
  double total = 0.0;
  for (int u = 0; u < b.size(); ++u) total += b(u) * per_type_rewards[u];
  return total;
}

}  // namespace belieflab
