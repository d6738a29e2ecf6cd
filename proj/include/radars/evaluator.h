#ifndef RADARS_EVALUATOR_H_
#define RADARS_EVALUATOR_H_

#include <cstdint>
#include <span>
#include <vector>

#include "radars/dataset.h"
#include "radars/network.h"
#include "radars/space.h"

namespace radars {

struct TrainConfig {
  int proxy_epochs = 2;
  int full_epochs = 20;
  double lr = 0.05;
  int batch = 16;

  void Validate() const;
  Json ToJson() const;
  static TrainConfig FromJson(const Json& j);
};

/// Top-1 accuracy of `net` on the given samples (no tape recorded).
double EvaluateAccuracy(const nn::ChildNetwork& net, const Dataset& ds,
                        std::span<const std::size_t> indices, int batch = 64);

/// Minibatch SGD over the train split for `epochs` passes; the shuffle order
/// is drawn from `rng`.
void TrainNetwork(nn::ChildNetwork& net, const Dataset& ds, const TrainConfig& cfg, int epochs,
                  Rng& rng);

/// Builds the child network of `arch`, trains it on the train split and
/// returns validation accuracy. Throws InvalidArgument for epochs < 1.
double TrainAndEval(const SearchSpace& space, const Architecture& arch, const Dataset& ds,
                    const TrainConfig& cfg, int epochs, std::uint64_t seed);

/// Synthetic accuracy landscape used in place of training:
///   acc = clamp(mean_l w[l][c_l] + lambda * mean_l u[l][c_l][c_{l+1}], 0, 1)
/// where c_l is the flat candidate index of layer l.
struct SurrogateSpec {
  std::uint64_t seed = 0;
  double interaction = 0.0;
  std::vector<std::vector<double>> layer_scores;                // [L][D]
  std::vector<std::vector<std::vector<double>>> pair_scores;    // [L-1][D][D]

  /// Scores in [0, 1] and pair terms in [-0.5, 0.5], all drawn from `seed`.
  static SurrogateSpec Generate(const SearchSpace& space, std::uint64_t seed, double interaction);
};

/// Mixed-radix index of a candidate tuple within its layer.
std::size_t FlatCandidateIndex(const SearchSpace& space, const CandidateTuple& c);

double SurrogateEval(const SearchSpace& space, const Architecture& arch, const SurrogateSpec& spec);

}  // namespace radars

#endif  // RADARS_EVALUATOR_H_
