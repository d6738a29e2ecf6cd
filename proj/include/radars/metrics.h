#ifndef RADARS_METRICS_H_
#define RADARS_METRICS_H_

#include <cstdint>

#include "radars/space.h"

namespace radars {

/// Constants of the analytical SuperNet memory model. `eta` scales weight-side
/// storage (weights + gradients), `theta` activation-side storage.
struct CostModelParams {
  double eta = 2.0;
  double theta = 2.0;
  double batch = 32.0;
  double bytes_per_value = 4.0;

  void Validate() const;
  Json ToJson() const;
  static CostModelParams FromJson(const Json& j);
};

/// reward = alpha*acc + (1-alpha)*(1 - (aops - beta)/gamma)
struct RewardParams {
  double alpha = 0.5;
  double beta = 0.0;
  double gamma = 1e9;
  double target = 1.0;

  void Validate() const;
  Json ToJson() const;
  static RewardParams FromJson(const Json& j);
};

struct FomRecord {
  double accuracy = 0.0;
  double aops = 0.0;
  double reward = 0.0;

  Json ToJson() const;
  static FomRecord FromJson(const Json& j);
};

/// CI * CO * K^2 * WO * HO.
std::uint64_t MacCount(const LayerTemplate& layer, int kernel);

/// Sum over convolution layers of MACs * activation bits * weight bits. The
/// same (int, frac) pair quantizes weights and activations of a layer, so the
/// two bit factors are equal. Pooling and the classifier are not counted.
double Aops(const SearchSpace& space, const Architecture& arch);

double Reward(double accuracy, double aops, const RewardParams& p);

FomRecord MakeFom(double accuracy, double aops, const RewardParams& p);

/// NW_l = CI * CO * K^2 * prod(D_i).
double LayerWeightCount(const LayerTemplate& layer, const std::vector<HyperParamType>& hp_types,
                        int kernel);

/// NA_l = B * CO * WO * HO * prod(D_i).
double LayerActivationCount(const LayerTemplate& layer,
                            const std::vector<HyperParamType>& hp_types, double batch);

/// Whole-space SuperNet memory in bytes, evaluated with the largest kernel
/// size of the space for every candidate.
double SupernetMemoryFull(const SearchSpace& space, const CostModelParams& p);

/// Exact bytes of a SuperNet over `sub`: every deduplicated candidate counted
/// once with its own kernel size.
double SubspaceMemory(const SearchSpace& space, const Subspace& sub, const CostModelParams& p);

double SinglePathMemory(const SearchSpace& space, const Architecture& arch,
                        const CostModelParams& p);

}  // namespace radars

#endif  // RADARS_METRICS_H_
