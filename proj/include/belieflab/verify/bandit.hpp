#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "belieflab/errors.hpp"
#include "belieflab/rng.hpp"

namespace belieflab {

enum class BanditRewardKind { Additive, Conjunctive };
enum class FeedbackMode { Full, Semi };

// Pure-exploration instance: identify the m useful arms of a K-arm catalogue
// by pulling size-k super-arms.
struct BanditInstance {
  int K = 10;
  int k = 3;
  int m = 2;
  std::vector<int> useful;  // U*, sorted, |useful| = m
  BanditRewardKind kind = BanditRewardKind::Additive;
  double sigma = 0.0;

  bool is_useful(int arm) const {
    return std::binary_search(useful.begin(), useful.end(), arm);
  }
};

inline BanditInstance make_bandit_instance(int K, int k, int m,
                                           BanditRewardKind kind, double sigma,
                                           Rng& rng) {
  if (!(m <= k && k <= K)) throw ConfigError("bandit: need m <= k <= K");
  BanditInstance inst{K, k, m, {}, kind, sigma};
  std::vector<int> arms(K);
  std::iota(arms.begin(), arms.end(), 0);
  for (int i = 0; i < m; ++i) {
    const int j = i + rng.uniform_int(K - i);
    std::swap(arms[i], arms[j]);
    inst.useful.push_back(arms[i]);
  }
  std::sort(inst.useful.begin(), inst.useful.end());
  return inst;
}

struct BanditFeedback {
  double total = 0.0;
  // Per-arm outcomes, aligned with the pulled super-arm; only in semi mode.
  std::vector<double> per_arm;
};

// Pulls one super-arm. Additive: R = Σ_{a∈S} X_a with X_a ~ N(1{a useful}, σ).
// Conjunctive: R = 1 iff U* ⊆ S. Full feedback reveals only R; semi feedback
// additionally reveals the per-arm outcomes of the pulled arms.
inline BanditFeedback bandit_episode(const BanditInstance& inst,
                                     const std::vector<int>& super_arm,
                                     FeedbackMode mode, Rng& rng) {
  if (static_cast<int>(super_arm.size()) != inst.k)
    throw WrongArity("super-arm size " + std::to_string(super_arm.size()) +
                     " != k = " + std::to_string(inst.k));
  std::set<int> distinct(super_arm.begin(), super_arm.end());
  if (static_cast<int>(distinct.size()) != inst.k)
    throw WrongArity("super-arm has repeated arms");

  BanditFeedback fb;
  if (inst.kind == BanditRewardKind::Additive) {
    for (int a : super_arm) {
      const double mu = inst.is_useful(a) ? 1.0 : 0.0;
      const double x = inst.sigma > 0.0 ? rng.normal(mu, inst.sigma) : mu;
      fb.total += x;
      if (mode == FeedbackMode::Semi) fb.per_arm.push_back(x);
    }
  } else {
    bool covered = true;
    for (int u : inst.useful)
      covered = covered && distinct.count(u) > 0;
    fb.total = covered ? 1.0 : 0.0;
    if (mode == FeedbackMode::Semi)
      for (int a : super_arm) fb.per_arm.push_back(inst.is_useful(a) ? 1.0 : 0.0);
  }
  return fb;
}

struct IdentificationConfig {
  std::int64_t max_episodes = 200000;
};

struct IdentificationResult {
  std::vector<int> estimate;  // Û, sorted, size m
  std::int64_t episodes_used = 0;
  bool correct = false;
};

namespace detail {

// Anytime confidence half-width for a subgaussian mean estimate from n
// samples, with a per-arm failure budget delta_each.
inline double ci_half_width(double sigma, std::int64_t n, double delta_each) {
  if (n <= 0) return std::numeric_limits<double>::infinity();
  const double nn = static_cast<double>(n);
  return sigma * std::sqrt(2.0 * std::log(4.0 * nn * nn / delta_each) / nn);
}

// Covering family: ⌈K/k⌉ super-arms whose union is the catalogue. The last
// group is padded with already-covered arms to keep the arity exact.
inline std::vector<std::vector<int>> covering_super_arms(int K, int k) {
  std::vector<std::vector<int>> groups;
  for (int start = 0; start < K; start += k) {
    std::vector<int> g;
    for (int a = start; a < std::min(start + k, K); ++a) g.push_back(a);
    int pad = 0;
    while (static_cast<int>(g.size()) < k) {
      if (std::find(g.begin(), g.end(), pad) == g.end()) g.push_back(pad);
      ++pad;
    }
    std::sort(g.begin(), g.end());
    groups.push_back(g);
  }
  return groups;
}

inline std::vector<int> top_m(const std::vector<double>& scores, int m) {
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return scores[a] > scores[b]; });
  std::vector<int> result(order.begin(), order.begin() + m);
  std::sort(result.begin(), result.end());
  return result;
}

// Semi-bandit: per-arm outcomes arrive directly, so estimate each arm's mean
// over covering passes and stop once the top m separate from the rest.
inline IdentificationResult identify_semi(const BanditInstance& inst, double delta,
                                          const IdentificationConfig& cfg, Rng& rng) {
  const std::vector<std::vector<int>> groups = covering_super_arms(inst.K, inst.k);
  std::vector<double> sums(inst.K, 0.0);
  std::vector<std::int64_t> counts(inst.K, 0);
  const double delta_each = delta / (2.0 * inst.K);
  const double sigma = inst.kind == BanditRewardKind::Additive ? inst.sigma : 0.0;

  IdentificationResult result;
  while (true) {
    for (const std::vector<int>& g : groups) {
      const BanditFeedback fb = bandit_episode(inst, g, FeedbackMode::Semi, rng);
      ++result.episodes_used;
      for (std::size_t i = 0; i < g.size(); ++i) {
        sums[g[i]] += fb.per_arm[i];
        ++counts[g[i]];
      }
    }
    std::vector<double> means(inst.K);
    for (int a = 0; a < inst.K; ++a) means[a] = sums[a] / counts[a];
    if (sigma <= 0.0) {
      result.estimate = top_m(means, inst.m);
      return result;
    }
    std::vector<int> order(inst.K);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return means[a] > means[b]; });
    const int in_arm = order[inst.m - 1], out_arm = order[inst.m];
    const double lower = means[in_arm] - ci_half_width(sigma, counts[in_arm], delta_each);
    const double upper = means[out_arm] + ci_half_width(sigma, counts[out_arm], delta_each);
    if (lower > upper) {
      result.estimate = top_m(means, inst.m);
      return result;
    }
    if (result.episodes_used + static_cast<std::int64_t>(groups.size()) > cfg.max_episodes)
      throw BudgetExceeded("semi identification exceeded episode budget");
  }
}

// Full-bandit additive: per-arm means are read off episode-reward differences
// of super-arms that differ in a single arm. Arms outside the pivot P share
// the offset μ(P); pivot members are probed against a second pivot Q and
// shifted into the P frame through a bridge arm pulled with both.
inline IdentificationResult identify_full_additive(const BanditInstance& inst,
                                                   double delta,
                                                   const IdentificationConfig& cfg,
                                                   Rng& rng) {
  const int K = inst.K, k = inst.k;
  if (K < 2 * (k - 1) + 1)
    throw ConfigError("full-bandit pairing needs K >= 2k-1");
  std::vector<int> pivot_p, pivot_q;
  for (int a = 0; a < k - 1; ++a) pivot_p.push_back(a);
  for (int a = k - 1; a < 2 * (k - 1); ++a) pivot_q.push_back(a);
  int bridge = 2 * (k - 1);

  struct Probe {
    std::vector<int> super_arm;
    double sum = 0.0;
    std::int64_t n = 0;
  };
  const auto with_arm = [](std::vector<int> base, int arm) {
    base.push_back(arm);
    std::sort(base.begin(), base.end());
    return base;
  };

  // probes[a] measures μ(pivot)+μ_a for each arm; the last two probes measure
  // the two bridge pulls used to cancel μ(Q) − μ(P).
  std::vector<Probe> probes;
  std::vector<int> probe_of_arm(K, -1);
  std::vector<bool> in_p(K, false);
  for (int a : pivot_p) in_p[a] = true;
  for (int a = 0; a < K; ++a) {
    probe_of_arm[a] = static_cast<int>(probes.size());
    probes.push_back({with_arm(in_p[a] ? pivot_q : pivot_p, a), 0.0, 0});
  }
  const int bridge_p = static_cast<int>(probes.size());
  probes.push_back({with_arm(pivot_p, bridge), 0.0, 0});
  const int bridge_q = static_cast<int>(probes.size());
  probes.push_back({with_arm(pivot_q, bridge), 0.0, 0});

  const double delta_each = delta / (2.0 * (K + 2));
  // Scores mix up to three probe means; this subgaussian scale bounds all of
  // them, at the price of a slightly conservative stop.
  const double sigma_score =
      inst.sigma * std::sqrt(3.0 * static_cast<double>(k));

  IdentificationResult result;
  while (true) {
    for (Probe& p : probes) {
      const BanditFeedback fb = bandit_episode(inst, p.super_arm, FeedbackMode::Full, rng);
      p.sum += fb.total;
      ++p.n;
      ++result.episodes_used;
    }
    const double offset = probes[bridge_q].sum / probes[bridge_q].n -
                          probes[bridge_p].sum / probes[bridge_p].n;  // μ(Q) − μ(P)
    std::vector<double> scores(K);
    for (int a = 0; a < K; ++a) {
      const Probe& p = probes[probe_of_arm[a]];
      scores[a] = p.sum / p.n - (in_p[a] ? offset : 0.0);
    }
    if (inst.sigma <= 0.0) {
      result.estimate = top_m(scores, inst.m);
      return result;
    }
    std::vector<int> order(K);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return scores[a] > scores[b]; });
    const int in_arm = order[inst.m - 1], out_arm = order[inst.m];
    const std::int64_t n = probes[probe_of_arm[in_arm]].n;
    const double half = ci_half_width(sigma_score, n, delta_each);
    if (scores[in_arm] - half > scores[out_arm] + half) {
      result.estimate = top_m(scores, inst.m);
      return result;
    }
    if (result.episodes_used + static_cast<std::int64_t>(probes.size()) > cfg.max_episodes)
      throw BudgetExceeded("full-bandit identification exceeded episode budget");
  }
}

// Full-bandit conjunctive: sweep size-k subsets in a seeded order until the
// reward fires, then swap each member out against a filler arm; the members
// whose removal kills the reward are exactly U*. Deterministic given the
// sweep; exponential worst case, fine for K <= 12.
inline IdentificationResult identify_full_conjunctive(const BanditInstance& inst,
                                                      const IdentificationConfig& cfg,
                                                      Rng& rng) {
  const int K = inst.K, k = inst.k;
  std::vector<int> comb(k);
  std::iota(comb.begin(), comb.end(), 0);
  std::vector<std::vector<int>> all;
  while (true) {
    all.push_back(comb);
    int i = k - 1;
    while (i >= 0 && comb[i] == K - k + i) --i;
    if (i < 0) break;
    ++comb[i];
    for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
  }
  for (std::size_t i = all.size(); i > 1; --i)
    std::swap(all[i - 1], all[rng.uniform_int(static_cast<int>(i))]);

  IdentificationResult result;
  std::vector<int> hit;
  for (const std::vector<int>& s : all) {
    if (result.episodes_used >= cfg.max_episodes)
      throw BudgetExceeded("conjunctive sweep exceeded episode budget");
    const BanditFeedback fb = bandit_episode(inst, s, FeedbackMode::Full, rng);
    ++result.episodes_used;
    if (fb.total >= 1.0) {
      hit = s;
      break;
    }
  }
  if (hit.empty()) throw BudgetExceeded("conjunctive sweep found no rewarding super-arm");

  std::set<int> members(hit.begin(), hit.end());
  int filler = 0;
  while (members.count(filler)) ++filler;  // any arm outside hit is non-useful
  for (int a : hit) {
    std::vector<int> swapped;
    for (int b : hit)
      if (b != a) swapped.push_back(b);
    swapped.push_back(filler);
    std::sort(swapped.begin(), swapped.end());
    const BanditFeedback fb = bandit_episode(inst, swapped, FeedbackMode::Full, rng);
    ++result.episodes_used;
    if (fb.total < 1.0) result.estimate.push_back(a);
  }
  std::sort(result.estimate.begin(), result.estimate.end());
  return result;
}

}  // namespace detail

// Identifies Û with Pr{Û = U*} ≥ 1 − δ, minimizing pulled episodes. Strategy
// depends on the feedback mode and reward kind; see the helpers above.
inline IdentificationResult identify_subset(const BanditInstance& inst, FeedbackMode mode,
                                            double delta, const IdentificationConfig& cfg,
                                            Rng& rng) {
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must be in (0,1)");
  IdentificationResult result;
  if (mode == FeedbackMode::Semi) {
    result = detail::identify_semi(inst, delta, cfg, rng);
  } else if (inst.kind == BanditRewardKind::Additive) {
    result = detail::identify_full_additive(inst, delta, cfg, rng);
  } else {
    result = detail::identify_full_conjunctive(inst, cfg, rng);
  }
  result.correct = result.estimate == inst.useful;
  return result;
}

struct ModeSummary {
  double success_rate = 0.0;
  std::int64_t episodes_q1 = 0;
  std::int64_t episodes_median = 0;
  std::int64_t episodes_q3 = 0;
};

struct ComplexityComparison {
  int trials = 0;
  ModeSummary semi;
  ModeSummary full;
};

// Runs identify_subset under both feedback modes over fresh instances and
// reports success rates and episode-count quartiles per mode.
inline ComplexityComparison compare_sample_complexity(int K, int k, int m,
                                                      BanditRewardKind kind,
                                                      double sigma, double delta,
                                                      int trials, std::uint64_t seed,
                                                      const IdentificationConfig& cfg = {}) {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  ComplexityComparison cmp;
  cmp.trials = trials;
  std::vector<std::int64_t> semi_episodes, full_episodes;
  int semi_ok = 0, full_ok = 0;
  for (int t = 0; t < trials; ++t) {
    Rng inst_rng(derive_seed(seed, {0x1257, static_cast<std::uint64_t>(t)}));
    const BanditInstance inst = make_bandit_instance(K, k, m, kind, sigma, inst_rng);
    Rng semi_rng(derive_seed(seed, {0x5e31, static_cast<std::uint64_t>(t)}));
    Rng full_rng(derive_seed(seed, {0xf011, static_cast<std::uint64_t>(t)}));
    const IdentificationResult semi =
        identify_subset(inst, FeedbackMode::Semi, delta, cfg, semi_rng);
    const IdentificationResult full =
        identify_subset(inst, FeedbackMode::Full, delta, cfg, full_rng);
    semi_ok += semi.correct ? 1 : 0;
    full_ok += full.correct ? 1 : 0;
    semi_episodes.push_back(semi.episodes_used);
    full_episodes.push_back(full.episodes_used);
  }
  const auto summarize = [](std::vector<std::int64_t> xs, int ok, int n) {
    std::sort(xs.begin(), xs.end());
    ModeSummary s;
    s.success_rate = static_cast<double>(ok) / n;
    s.episodes_q1 = xs[xs.size() / 4];
    s.episodes_median = xs[xs.size() / 2];
    s.episodes_q3 = xs[(3 * xs.size()) / 4];
    return s;
  };
  cmp.semi = summarize(semi_episodes, semi_ok, trials);
  cmp.full = summarize(full_episodes, full_ok, trials);
  return cmp;
}

}  // namespace belieflab
