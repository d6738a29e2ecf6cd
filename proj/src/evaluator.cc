#include "radars/evaluator.h"

#include <algorithm>
#include <numeric>

#include "radars/error.h"

namespace radars {

void TrainConfig::Validate() const {
  Check(proxy_epochs >= 1 && full_epochs >= 1, ErrorKind::kConfig, "epoch counts must be >= 1");
  Check(proxy_epochs <= full_epochs, ErrorKind::kConfig, "proxy_epochs must not exceed full_epochs");
  Check(lr > 0, ErrorKind::kConfig, "training lr must be positive");
  Check(batch >= 1, ErrorKind::kConfig, "training batch must be >= 1");
}

Json TrainConfig::ToJson() const {
  return {{"proxy_epochs", proxy_epochs}, {"full_epochs", full_epochs}, {"lr", lr}, {"batch", batch}};
}

TrainConfig TrainConfig::FromJson(const Json& j) {
  TrainConfig c;
  c.proxy_epochs = j.value("proxy_epochs", c.proxy_epochs);
  c.full_epochs = j.value("full_epochs", c.full_epochs);
  c.lr = j.value("lr", c.lr);
  c.batch = j.value("batch", c.batch);
  c.Validate();
  return c;
}

double EvaluateAccuracy(const nn::ChildNetwork& net, const Dataset& ds,
                        std::span<const std::size_t> indices, int batch) {
  Check(!indices.empty(), ErrorKind::kInvalidArgument, "accuracy over an empty split");
  nn::NoGradGuard no_grad;
  std::size_t correct = 0;
  for (std::size_t start = 0; start < indices.size(); start += batch) {
    const auto chunk = indices.subspan(start, std::min<std::size_t>(batch, indices.size() - start));
    const auto logits = net.Forward(ds.Batch(chunk));
    const int C = logits.dim(1);
    const auto v = logits.values();
    for (std::size_t n = 0; n < chunk.size(); ++n) {
      const auto row = v.subspan(n * C, C);
      const int pred = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
      if (pred == ds.labels[chunk[n]]) ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(indices.size());
}

void TrainNetwork(nn::ChildNetwork& net, const Dataset& ds, const TrainConfig& cfg, int epochs,
                  Rng& rng) {
  Check(!ds.train.empty(), ErrorKind::kInvalidArgument, "dataset has no training samples");
  auto params = net.Parameters();
  std::vector<std::size_t> order = ds.train;
  for (int e = 0; e < epochs; ++e) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch) {
      const std::span<const std::size_t> chunk(
          order.data() + start, std::min<std::size_t>(cfg.batch, order.size() - start));
      nn::ZeroGrad(params);
      nn::Backward(net.Loss(ds.Batch(chunk), ds.Labels(chunk)));
      nn::SgdStep(params, cfg.lr);
    }
  }
}

double TrainAndEval(const SearchSpace& space, const Architecture& arch, const Dataset& ds,
                    const TrainConfig& cfg, int epochs, std::uint64_t seed) {
  Check(epochs >= 1, ErrorKind::kInvalidArgument, "training needs at least one epoch");
  Check(ds.channels() == space.input_shape().channels, ErrorKind::kShapeMismatch,
        "dataset channels differ from the search space input");
  auto net = nn::BuildChildNetwork(space, arch, seed);
  Rng rng(seed ^ 0x5bd1e995ULL);
  TrainNetwork(net, ds, cfg, epochs, rng);
  return EvaluateAccuracy(net, ds, ds.val);
}

SurrogateSpec SurrogateSpec::Generate(const SearchSpace& space, std::uint64_t seed,
                                      double interaction) {
  Check(interaction >= 0, ErrorKind::kInvalidArgument, "interaction strength must be >= 0");
  const auto D = static_cast<std::size_t>(space.candidates_per_layer());
  const int L = space.num_layers();
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SurrogateSpec s;
  s.seed = seed;
  s.interaction = interaction;
  s.layer_scores.assign(L, std::vector<double>(D));
  for (auto& layer : s.layer_scores) {
    for (double& w : layer) w = unit(rng);
  }
  s.pair_scores.assign(std::max(0, L - 1), std::vector<std::vector<double>>(D, std::vector<double>(D)));
  for (auto& pair : s.pair_scores) {
    for (auto& row : pair) {
      for (double& u : row) u = unit(rng) - 0.5;
    }
  }
  return s;
}

std::size_t FlatCandidateIndex(const SearchSpace& space, const CandidateTuple& c) {
  std::size_t idx = 0;
  for (int t = 0; t < space.num_types(); ++t) {
    idx = idx * space.hp_types()[t].choices.size() + static_cast<std::size_t>(c.at(t));
  }
  return idx;
}

double SurrogateEval(const SearchSpace& space, const Architecture& arch, const SurrogateSpec& spec) {
  Check(arch.IsValidIn(space), ErrorKind::kInvalidArgument, "architecture not valid in space");
  const int L = space.num_layers();
  Check(static_cast<int>(spec.layer_scores.size()) == L, ErrorKind::kInvalidArgument,
        "surrogate was generated for a different space");
  std::vector<std::size_t> c(L);
  for (int l = 0; l < L; ++l) c[l] = FlatCandidateIndex(space, arch.tuple(l));
  double base = 0;
  for (int l = 0; l < L; ++l) base += spec.layer_scores[l].at(c[l]);
  base /= L;
  double pair = 0;
  if (L > 1 && spec.interaction != 0) {
    for (int l = 0; l + 1 < L; ++l) pair += spec.pair_scores.at(l).at(c[l]).at(c[l + 1]);
    pair /= (L - 1);
  }
  return std::clamp(base + spec.interaction * pair, 0.0, 1.0);
}

}  // namespace radars
