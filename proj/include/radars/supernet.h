#ifndef RADARS_SUPERNET_H_
#define RADARS_SUPERNET_H_

#include <cstdint>
#include <string>
#include <vector>

#include "radars/dataset.h"
#include "radars/evaluator.h"
#include "radars/metrics.h"
#include "radars/network.h"
#include "radars/space.h"

namespace radars {

struct DnasConfig {
  double weight_lr = 0.05;
  double arch_lr = 0.1;
  int epochs = 5;
  /// Weight steps per architecture-weight step.
  int alternation = 1;
  int batch = 16;

  void Validate() const;
  Json ToJson() const;
  static DnasConfig FromJson(const Json& j);
};

/// Over-parameterised network of a subspace: each layer holds one quantized
/// convolution per allowed candidate plus a vector of architecture weights.
/// The layer output is the softmax(alpha)-weighted sum of candidate outputs.
class SuperNet {
 public:
  struct Layer {
    std::vector<CandidateTuple> candidates;
    std::vector<nn::ConvLayer> ops;
    nn::Tensor alpha;  // (candidates)
  };

  SuperNet(SearchSpace space, Subspace sub, std::vector<Layer> layers, nn::Classifier head);

  nn::Tensor Forward(const nn::Tensor& x) const;
  nn::Tensor Loss(const nn::Tensor& x, const std::vector<int>& labels) const;

  /// Per-layer outputs of every candidate for the given layer input; used to
  /// check the mixture against its parts.
  std::vector<nn::Tensor> CandidateOutputs(int layer, const nn::Tensor& input) const;

  std::vector<nn::Tensor> WeightParameters() const;
  std::vector<nn::Tensor> ArchParameters() const;

  const SearchSpace& space() const { return space_; }
  const Subspace& subspace() const { return sub_; }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& mutable_layers() { return layers_; }
  const nn::Classifier& head() const { return head_; }

  double ModeledMemory(const CostModelParams& cost) const { return SubspaceMemory(space_, sub_, cost); }

  /// Checkpoint: the child-network format with the space, candidate lists
  /// and alpha tables added to the JSON header.
  void Save(const std::string& path) const;
  static SuperNet Load(const std::string& path);

 private:
  SearchSpace space_;
  Subspace sub_;
  std::vector<Layer> layers_;
  nn::Classifier head_;
};

/// One candidate op per allowed tuple, alpha = 0. Weights are drawn in
/// (layer, candidate) order followed by the classifier, so a singleton
/// subspace reproduces BuildChildNetwork with the same seed.
SuperNet BuildSupernet(const SearchSpace& space, const Subspace& sub, std::uint64_t seed);

/// Alternates `alternation` weight steps on train batches with one alpha step
/// on a validation batch, for cfg.epochs passes over the train split.
void AlternateTrain(SuperNet& sn, const Dataset& ds, const DnasConfig& cfg, std::uint64_t seed);

/// Per-layer argmax of alpha (ties to the lowest candidate index).
Architecture DeriveBest(const SuperNet& sn);

struct DnasResult {
  Architecture arch;
  FomRecord fom;
  double supernet_bytes = 0.0;
};

/// Build, alternate-train, derive, then retrain the derived child for
/// train.full_epochs and score it with its own AOPS.
DnasResult DnasSearch(const SearchSpace& space, const Subspace& sub, const Dataset& ds,
                      const DnasConfig& dnas, const TrainConfig& train, const RewardParams& reward,
                      const CostModelParams& cost, std::uint64_t seed);

/// Relaxed SuperNet over a surrogate landscape: the "loss" is minus the
/// expected surrogate accuracy under the per-layer softmax(alpha) mixture.
/// Only architecture weights exist, so every step is an alpha step.
class SurrogateSupernet {
 public:
  SurrogateSupernet(const SearchSpace& space, Subspace sub, const SurrogateSpec& surrogate);

  nn::Tensor ExpectedAccuracy() const;
  void Train(const DnasConfig& cfg);
  Architecture DeriveBest() const;

  const std::vector<nn::Tensor>& alphas() const { return alphas_; }
  const Subspace& subspace() const { return sub_; }

 private:
  Subspace sub_;
  std::vector<nn::Tensor> alphas_;
  std::vector<nn::Tensor> scores_;  // per-layer candidate scores, (n_l)
  std::vector<nn::Tensor> pairs_;   // (n_l, n_{l+1})
  double interaction_;
};

/// Argmax over a list of alpha tensors, ties to the lowest index, mapped back
/// to the subspace's candidate tuples.
Architecture ArgmaxArchitecture(const Subspace& sub, const std::vector<nn::Tensor>& alphas);

}  // namespace radars

#endif  // RADARS_SUPERNET_H_
