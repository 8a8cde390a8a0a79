#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "belieflab/belief.hpp"
#include "belieflab/errors.hpp"
#include "belieflab/pomdp.hpp"

namespace belieflab {

enum class AttributeAnswer { True, False, Unknown };

// The five decision-relevant user traits, in question order.
enum RelevantAttribute {
  kAttrInjury = 0,
  kAttrOutdoor = 1,
  kAttrExtroverted = 2,
  kAttrLowSes = 3,
  kAttrMotivation = 4,
};
constexpr int kNumRelevantAttributes = 5;

using AnswerSheet = std::array<AttributeAnswer, kNumRelevantAttributes>;

inline AnswerSheet all_unknown_sheet() {
  AnswerSheet sheet;
  sheet.fill(AttributeAnswer::Unknown);
  return sheet;
}

// Probabilities substituted for Unknown answers when the classifier maps a
// sheet to a strategy distribution.
struct AttributePriors {
  double low_ses = 0.2;
  double injury = 0.25;
  double extroverted = 0.4;
  double motivation = 0.5;
  double outdoor = 0.4;
};

namespace detail {
inline double answer_value(AttributeAnswer a, double prior) {
  switch (a) {
    case AttributeAnswer::True: return 1.0;
    case AttributeAnswer::False: return 0.0;
    case AttributeAnswer::Unknown: return prior;
  }
  throw Error("answer_value: bad answer");
}
}  // namespace detail

// Maps an answer sheet to the distribution over the 8 exercise strategies.
// The products form a complete conditional decomposition of the strategy
// rule tree, so the result sums to 1 for every sheet.
inline Belief strategy_distribution(const AnswerSheet& sheet,
                                    const AttributePriors& priors = {}) {
  const double inj = detail::answer_value(sheet[kAttrInjury], priors.injury);
  const double out = detail::answer_value(sheet[kAttrOutdoor], priors.outdoor);
  const double ext = detail::answer_value(sheet[kAttrExtroverted], priors.extroverted);
  const double ses = detail::answer_value(sheet[kAttrLowSes], priors.low_ses);
  const double mot = detail::answer_value(sheet[kAttrMotivation], priors.motivation);

  std::vector<double> probs(8);
  probs[0] = inj * out;
  probs[1] = inj * (1 - out);
  probs[2] = (1 - inj) * out * (1 - ext);
  probs[3] = (1 - inj) * out * ext;
  probs[4] = (1 - inj) * (1 - out) * ses;
  probs[5] = (1 - inj) * (1 - out) * (1 - ses) * (1 - ext) * mot;
  probs[6] = (1 - inj) * (1 - out) * (1 - ses) * (1 - ext) * (1 - mot);
  probs[7] = (1 - inj) * (1 - out) * (1 - ses) * ext;
  return Belief::normalized(probs);
}

// Flattens a belief toward uniform: result(u) ∝ b(u)^(1/tau). tau = 1 is the
// identity; larger tau means a softer distribution. Preserves the argmax.
inline Belief temper(const Belief& b, double tau) {
  if (tau <= 0.0) throw Error("temper: tau must be positive");
  if (tau == 1.0) return b;
  std::vector<double> weights(b.size());
  for (int u = 0; u < b.size(); ++u) weights[u] = std::pow(b(u), 1.0 / tau);
  return Belief::normalized(weights);
}

// Folds exact Bayesian updates over a trajectory's user responses, using the
// environment's likelihood rule. ZeroEvidence propagates.
inline Belief exact_bayes_predict(const Environment& env,
                                  const Trajectory& trajectory,
                                  const Belief& prior) {
  Belief belief = prior;
  for (const TurnRecord& turn : trajectory.turns) {
    const ResponseModel cases = env.response_model(turn.obs_before, turn.action);
    const ResponseCase* observed = nullptr;
    for (const ResponseCase& c : cases) {
      if (c.event == turn.user_response) {
        observed = &c;
        break;
      }
    }
    if (observed == nullptr)
      throw WrongEnvironment("exact_bayes_predict: response not in model");
    belief = belief_update(belief, observed->prob_per_type);
  }
  return belief;
}

// Exact Bayes packaged as a BeliefEngine.
class ExactBayesEngine : public BeliefEngine {
 public:
  explicit ExactBayesEngine(const Environment& env) : env_(env) {}

  Belief prior() const override { return env_.prior_belief(); }

  Belief predict(const Trajectory& trajectory) const override {
    return exact_bayes_predict(env_, trajectory, prior());
  }

 private:
  const Environment& env_;
};

// Engine whose belief never moves; used to isolate reward terms in tests.
class ConstantEngine : public BeliefEngine {
 public:
  explicit ConstantEngine(Belief b) : belief_(std::move(b)) {}
  Belief prior() const override { return belief_; }
  Belief predict(const Trajectory&) const override { return belief_; }

 private:
  Belief belief_;
};

}  // namespace belieflab
