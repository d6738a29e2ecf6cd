#ifndef RADARS_CONTROLLER_H_
#define RADARS_CONTROLLER_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "radars/space.h"

namespace radars {

struct ControllerConfig {
  double lr = 0.1;
  double baseline_decay = 0.9;
  double entropy_coef = 0.01;
  std::uint64_t seed = 0;

  void Validate() const;
  Json ToJson() const;
  static ControllerConfig FromJson(const Json& j);
};

/// Factored categorical policy: one independent logit vector per
/// (layer, hyper-parameter type) decision.
struct Policy {
  // logits[layer][type][choice]
  std::vector<std::vector<std::vector<double>>> logits;
  double baseline = 0.0;
  std::uint64_t step_count = 0;

  /// Zero logits: uniform over every decision.
  explicit Policy(const SearchSpace& space);
  Policy() = default;

  Json ToJson() const;
  static Policy FromJson(const Json& j);
  void Save(const std::string& path) const;
  static Policy Load(const std::string& path);
};

using ActionTables = std::vector<std::vector<std::vector<double>>>;

/// softmax over every decision's logits.
ActionTables ActionProbs(const Policy& policy);

struct Prediction {
  Architecture arch;
  double log_prob = 0.0;
};

/// Samples every decision independently from its softmax.
Prediction Predict(const Policy& policy, Rng& rng);

double LogProb(const Policy& policy, const Architecture& arch);

using RewardBatch = std::vector<std::pair<Architecture, double>>;

/// One REINFORCE step over the batch:
///   logits += lr * ( mean_i (r_i - b) grad log pi(a_i) + entropy_coef * grad H )
/// followed by b <- decay*b + (1-decay)*mean(r). On the first update the
/// baseline starts from the batch mean. Throws NonFiniteReward, EmptySet.
void UpdatePolicy(Policy& policy, const RewardBatch& batch, const ControllerConfig& cfg);

}  // namespace radars

#endif  // RADARS_CONTROLLER_H_
