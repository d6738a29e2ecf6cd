#include "radars/metrics.h"

#include <cmath>

#include "radars/error.h"

namespace radars {
namespace {

double ProductOfChoices(const std::vector<HyperParamType>& hp_types) {
  double n = 1;
  for (const auto& t : hp_types) n *= static_cast<double>(t.choices.size());
  return n;
}

double CandidateBytes(const LayerTemplate& layer, int kernel, const CostModelParams& p) {
  const double weights = static_cast<double>(layer.in_channels) * layer.out_channels * kernel * kernel;
  const double acts =
      p.batch * layer.out_channels * static_cast<double>(layer.out_width) * layer.out_height;
  return p.eta * weights + p.theta * acts;
}

}  // namespace

void CostModelParams::Validate() const {
  Check(eta > 0 && theta > 0 && batch > 0 && bytes_per_value > 0, ErrorKind::kConfig,
        "cost model constants must be strictly positive");
}

Json CostModelParams::ToJson() const {
  return {{"eta", eta}, {"theta", theta}, {"batch", batch}, {"bytes_per_value", bytes_per_value}};
}

CostModelParams CostModelParams::FromJson(const Json& j) {
  CostModelParams p;
  p.eta = j.value("eta", p.eta);
  p.theta = j.value("theta", p.theta);
  p.batch = j.value("batch", p.batch);
  p.bytes_per_value = j.value("bytes_per_value", p.bytes_per_value);
  p.Validate();
  return p;
}

void RewardParams::Validate() const {
  Check(alpha >= 0 && alpha <= 1, ErrorKind::kConfig, "reward alpha must lie in [0, 1]");
  Check(gamma > 0, ErrorKind::kConfig, "reward gamma must be positive");
}

Json RewardParams::ToJson() const {
  return {{"alpha", alpha}, {"beta", beta}, {"gamma", gamma}, {"target", target}};
}

RewardParams RewardParams::FromJson(const Json& j) {
  RewardParams p;
  p.alpha = j.value("alpha", p.alpha);
  p.beta = j.value("beta", p.beta);
  p.gamma = j.value("gamma", p.gamma);
  p.target = j.value("target", p.target);
  p.Validate();
  return p;
}

Json FomRecord::ToJson() const { return {{"accuracy", accuracy}, {"aops", aops}, {"reward", reward}}; }

FomRecord FomRecord::FromJson(const Json& j) {
  return {j.at("accuracy").get<double>(), j.at("aops").get<double>(), j.at("reward").get<double>()};
}

std::uint64_t MacCount(const LayerTemplate& layer, int kernel) {
  return static_cast<std::uint64_t>(layer.in_channels) * layer.out_channels * kernel * kernel *
         layer.out_width * layer.out_height;
}

double Aops(const SearchSpace& space, const Architecture& arch) {
  Check(arch.IsValidIn(space), ErrorKind::kInvalidArgument, "architecture not valid in space");
  double total = 0;
  for (int l = 0; l < space.num_layers(); ++l) {
    const auto c = arch.tuple(l);
    const double bits = space.BitWidth(c);
    total += static_cast<double>(MacCount(space.layer(l), space.KernelSize(c))) * bits * bits;
  }
  return total;
}

double Reward(double accuracy, double aops, const RewardParams& p) {
  return p.alpha * accuracy + (1.0 - p.alpha) * (1.0 - (aops - p.beta) / p.gamma);
}

FomRecord MakeFom(double accuracy, double aops, const RewardParams& p) {
  return {accuracy, aops, Reward(accuracy, aops, p)};
}

double LayerWeightCount(const LayerTemplate& layer, const std::vector<HyperParamType>& hp_types,
                        int kernel) {
  return static_cast<double>(layer.in_channels) * layer.out_channels * kernel * kernel *
         ProductOfChoices(hp_types);
}

double LayerActivationCount(const LayerTemplate& layer,
                            const std::vector<HyperParamType>& hp_types, double batch) {
  return batch * layer.out_channels * static_cast<double>(layer.out_width) * layer.out_height *
         ProductOfChoices(hp_types);
}

double SupernetMemoryFull(const SearchSpace& space, const CostModelParams& p) {
  const int k = space.MaxKernelSize();
  double values = 0;
  for (const auto& layer : space.layers()) {
    values += p.eta * LayerWeightCount(layer, space.hp_types(), k) +
              p.theta * LayerActivationCount(layer, space.hp_types(), p.batch);
  }
  return p.bytes_per_value * values;
}

double SubspaceMemory(const SearchSpace& space, const Subspace& sub, const CostModelParams& p) {
  Check(sub.num_layers() == space.num_layers(), ErrorKind::kInvalidArgument,
        "subspace layer count differs from the space");
  double values = 0;
  for (int l = 0; l < space.num_layers(); ++l) {
    for (const auto& c : sub.layer(l)) values += CandidateBytes(space.layer(l), space.KernelSize(c), p);
  }
  return p.bytes_per_value * values;
}

double SinglePathMemory(const SearchSpace& space, const Architecture& arch,
                        const CostModelParams& p) {
  return SubspaceMemory(space, SubspaceFrom(space, {arch}), p);
}

}  // namespace radars
