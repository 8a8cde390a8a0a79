#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "belieflab/belief.hpp"
#include "belieflab/errors.hpp"
#include "belieflab/pomdp.hpp"
#include "belieflab/shaping.hpp"

namespace belieflab {

constexpr double kTieTolerance = 1e-9;

// Exhaustively enumerated reachable belief tree. Nodes are (observation,
// belief, turn) triples; edges carry the transition probability under the
// node's belief and a base reward equal to the belief-expected per-type
// reward of the action.
struct FiniteBeliefMDP {
  struct Edge {
    int child = 0;
    double prob = 0.0;
  };
  struct ActionArm {
    int action = 0;
    double base_reward = 0.0;
    std::vector<Edge> edges;
  };
  struct Node {
    std::string obs_key;
    Belief belief = Belief::uniform(2);
    int turn = 0;
    std::vector<ActionArm> arms;  // empty at terminal nodes
  };

  std::vector<Node> nodes;
  int horizon = 0;
  int root = 0;
};

// Materializes the reachable belief process of the environment up to
// `horizon`, growing breadth-first from the empty observation. Throws
// StateSpaceCapExceeded past `node_cap`.
inline FiniteBeliefMDP enumerate_belief_mdp(const Environment& env, const Belief& prior,
                                            int horizon,
                                            std::size_t node_cap = 1000000) {
  FiniteBeliefMDP mdp;
  mdp.horizon = horizon;
  mdp.nodes.push_back({obs_key(Observation{}), prior, 0, {}});

  std::vector<std::pair<int, Observation>> frontier = {{0, Observation{}}};
  while (!frontier.empty()) {
    std::vector<std::pair<int, Observation>> next_frontier;
    for (const auto& [node_id, obs] : frontier) {
      if (mdp.nodes[node_id].turn >= horizon) continue;
      // Copy: growing mdp.nodes below invalidates references into it.
      const Belief belief = mdp.nodes[node_id].belief;
      for (int action : env.legal_actions(obs)) {
        FiniteBeliefMDP::ActionArm arm;
        arm.action = action;
        std::vector<double> per_type(env.num_user_types());
        for (int u = 0; u < env.num_user_types(); ++u)
          per_type[u] = env.step_reward(obs, action, u);
        arm.base_reward = expected_reward(belief, per_type);

        const bool ends = env.ends_episode(obs, action);
        for (const ResponseCase& c : env.response_model(obs, action)) {
          const double p = expected_reward(belief, c.prob_per_type);
          if (p <= 0.0) continue;  // unreachable under this belief
          const Belief child_belief = belief_update(belief, c.prob_per_type);
          const Observation child_obs = advance(obs, action, c.event);
          const int child_turn = ends ? horizon : child_obs.turn;
          if (mdp.nodes.size() >= node_cap)
            throw StateSpaceCapExceeded("belief MDP larger than " +
                                        std::to_string(node_cap) + " nodes");
          const int child_id = static_cast<int>(mdp.nodes.size());
          mdp.nodes.push_back({obs_key(child_obs), child_belief, child_turn, {}});
          arm.edges.push_back({child_id, p});
          if (child_turn < horizon) next_frontier.push_back({child_id, child_obs});
        }
        mdp.nodes[node_id].arms.push_back(std::move(arm));
      }
    }
    frontier = std::move(next_frontier);
  }
  return mdp;
}

// Potential of a node's belief with the realized-type dependence integrated
// out (u* ~ b given the node's history): Acc -> Σ b(u)^2, LogAcc ->
// Σ b(u)·log b(u) floored, NegEnt -> −H(b). Keeps the per-edge expected
// shaping term exactly potential-based on the belief tree.
inline double node_potential(PotentialKind kind, const Belief& b,
                             double prob_floor = 1e-6) {
  double phi = 0.0;
  switch (kind) {
    case PotentialKind::Acc:
      for (int u = 0; u < b.size(); ++u) phi += b(u) * b(u);
      return phi;
    case PotentialKind::LogAcc:
      for (int u = 0; u < b.size(); ++u)
        phi += b(u) * std::log(std::max(b(u), prob_floor));
      return phi;
    case PotentialKind::NegEnt:
      return -entropy(b);
  }
  throw Error("node_potential: bad kind");
}

struct NodeSolution {
  double value = 0.0;
  std::vector<int> optimal_actions;  // all actions within tie tolerance of max
};

// Backward induction with an arbitrary per-edge reward bonus. bonus(parent,
// edge-child) is added on top of the arm's base reward.
inline std::vector<NodeSolution> solve_with_edge_bonus(
    const FiniteBeliefMDP& mdp,
    const std::function<double(const FiniteBeliefMDP::Node&, const FiniteBeliefMDP::Node&)>& bonus,
    double gamma) {
  std::vector<NodeSolution> sol(mdp.nodes.size());
  // Children always follow parents in the construction order, so a single
  // reverse sweep visits every child first.
  for (std::size_t i = mdp.nodes.size(); i-- > 0;) {
    const FiniteBeliefMDP::Node& node = mdp.nodes[i];
    if (node.arms.empty()) {
      sol[i] = {0.0, {}};
      continue;
    }
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> q(node.arms.size());
    for (std::size_t a = 0; a < node.arms.size(); ++a) {
      double value = node.arms[a].base_reward;
      for (const FiniteBeliefMDP::Edge& e : node.arms[a].edges) {
        value += e.prob * gamma * sol[e.child].value;
        if (bonus) value += e.prob * bonus(node, mdp.nodes[e.child]);
      }
      q[a] = value;
      best = std::max(best, value);
    }
    sol[i].value = best;
    for (std::size_t a = 0; a < node.arms.size(); ++a)
      if (q[a] >= best - kTieTolerance)
        sol[i].optimal_actions.push_back(node.arms[a].action);
  }
  return sol;
}

// Solves the tree exactly, optionally with potential-based shaping. Shaped
// edges earn γ·φ(b_child) − φ(b_parent) with the episodic convention
// φ(terminal) = 0.
inline std::vector<NodeSolution> solve_optimal(const FiniteBeliefMDP& mdp,
                                               std::optional<PotentialKind> shaping,
                                               double gamma,
                                               double prob_floor = 1e-6) {
  if (!shaping) return solve_with_edge_bonus(mdp, nullptr, gamma);
  const PotentialKind kind = *shaping;
  const int horizon = mdp.horizon;
  auto bonus = [kind, gamma, prob_floor, horizon](const FiniteBeliefMDP::Node& parent,
                                                  const FiniteBeliefMDP::Node& child) {
    const double phi_child =
        child.turn >= horizon ? 0.0 : node_potential(kind, child.belief, prob_floor);
    return gamma * phi_child - node_potential(kind, parent.belief, prob_floor);
  };
  return solve_with_edge_bonus(mdp, bonus, gamma);
}

struct CounterexampleNode {
  int node = 0;
  std::string obs_key;
  int turn = 0;
  std::vector<double> belief;
  std::vector<int> unshaped_actions;
  std::vector<int> shaped_actions;
};

struct InvarianceReport {
  int num_states = 0;
  // Max residual of |V_shaped − V_unshaped + φ(node)| over nodes (with
  // φ(terminal) = 0); the analytic telescoping correction predicts 0.
  double max_value_shift = 0.0;
  bool argmax_sets_equal = true;
  std::vector<CounterexampleNode> counterexamples;
};

namespace detail {

inline InvarianceReport compare_solutions(const FiniteBeliefMDP& mdp,
                                          const std::vector<NodeSolution>& unshaped,
                                          const std::vector<NodeSolution>& shaped,
                                          const std::function<double(const FiniteBeliefMDP::Node&)>& correction) {
  InvarianceReport report;
  report.num_states = static_cast<int>(mdp.nodes.size());
  for (std::size_t i = 0; i < mdp.nodes.size(); ++i) {
    if (correction) {
      const double residual =
          std::abs(shaped[i].value - unshaped[i].value + correction(mdp.nodes[i]));
      report.max_value_shift = std::max(report.max_value_shift, residual);
    }
    if (unshaped[i].optimal_actions != shaped[i].optimal_actions) {
      report.argmax_sets_equal = false;
      report.counterexamples.push_back({static_cast<int>(i), mdp.nodes[i].obs_key,
                                        mdp.nodes[i].turn, mdp.nodes[i].belief.probs(),
                                        unshaped[i].optimal_actions,
                                        shaped[i].optimal_actions});
    }
  }
  return report;
}

}  // namespace detail

// Solves the instance with and without the shaping potential and reports
// whether every node keeps the same optimal-action set (within the tie
// tolerance), along with the telescoping residual.
inline InvarianceReport check_pbrs_invariance(const FiniteBeliefMDP& mdp,
                                              PotentialKind potential, double gamma,
                                              double prob_floor = 1e-6) {
  const std::vector<NodeSolution> unshaped = solve_optimal(mdp, std::nullopt, gamma);
  const std::vector<NodeSolution> shaped =
      solve_optimal(mdp, potential, gamma, prob_floor);
  const int horizon = mdp.horizon;
  auto correction = [potential, prob_floor, horizon](const FiniteBeliefMDP::Node& n) {
    return n.turn >= horizon || n.arms.empty()
               ? 0.0
               : node_potential(potential, n.belief, prob_floor);
  };
  return detail::compare_solutions(mdp, unshaped, shaped, correction);
}

// Same comparison for an arbitrary additive per-turn bonus (no invariance
// guarantee; the report flags any node whose argmax set moves).
inline InvarianceReport check_additive_bonus_invariance(
    const FiniteBeliefMDP& mdp,
    const std::function<double(const FiniteBeliefMDP::Node&, const FiniteBeliefMDP::Node&)>& bonus,
    double gamma) {
  const std::vector<NodeSolution> unshaped = solve_with_edge_bonus(mdp, nullptr, gamma);
  const std::vector<NodeSolution> shaped = solve_with_edge_bonus(mdp, bonus, gamma);
  return detail::compare_solutions(mdp, unshaped, shaped, nullptr);
}

}  // namespace belieflab
