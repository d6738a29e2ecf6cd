#ifndef RADARS_CONFIG_H_
#define RADARS_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "radars/controller.h"
#include "radars/dataset.h"
#include "radars/evaluator.h"
#include "radars/metrics.h"
#include "radars/space.h"
#include "radars/supernet.h"

namespace radars {

/// Parses a JSON file; syntax errors become ConfigError with a
/// "path:line:column" prefix.
Json LoadJsonFile(const std::string& path);

/// Same for in-memory text; `origin` names the source in diagnostics.
Json ParseJsonText(const std::string& text, const std::string& origin);

struct DatasetConfig {
  enum class Kind { kSynthetic, kCifar10 };
  Kind kind = Kind::kSynthetic;
  SynthSpec synth;
  std::vector<std::string> files;  // CIFAR-10 binary batches
  std::uint64_t split_seed = 0;

  Json ToJson() const;
  static DatasetConfig FromJson(const Json& j, const std::string& base_dir);
  Dataset Load() const;
};

struct EvaluatorConfig {
  enum class Kind { kSurrogate, kTrain };
  Kind kind = Kind::kSurrogate;
  // surrogate
  std::uint64_t surrogate_seed = 0;
  double interaction = 0.0;
  /// Gaussian noise added to the exact surrogate score by proxy training.
  double proxy_noise = 0.05;
  // training
  DatasetConfig dataset;

  Json ToJson() const;
  static EvaluatorConfig FromJson(const Json& j, const std::string& base_dir);
};

/// Resolved run configuration. `space` is always held inline after loading.
struct RadarsConfig {
  SearchSpace space;
  int episodes_per_phase = 10;  // N
  int retrain_count = 6;        // P
  int max_iterations = 5;       // Ep
  RewardParams reward;          // reward.target is the stopping target
  double memory_budget = 12e9;  // bytes
  CostModelParams cost;
  ControllerConfig controller;
  DnasConfig dnas;
  TrainConfig train;
  EvaluatorConfig evaluator;
  std::uint64_t seed = 0;
  bool pipelined = false;
  bool skip_overflow = false;

  explicit RadarsConfig(SearchSpace s) : space(std::move(s)) {}

  void Validate() const;
  Json ToJson() const;
  /// "space" may be an inline object or a path relative to `base_dir`.
  static RadarsConfig FromJson(const Json& j, const std::string& base_dir);
  static RadarsConfig LoadFile(const std::string& path);
};

}  // namespace radars

#endif  // RADARS_CONFIG_H_
