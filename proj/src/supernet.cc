#include "radars/supernet.h"

#include <algorithm>
#include <span>

#include "radars/error.h"

namespace radars {

void DnasConfig::Validate() const {
  Check(weight_lr >= 0 && arch_lr >= 0, ErrorKind::kConfig, "DNAS learning rates must be >= 0");
  Check(epochs >= 0, ErrorKind::kConfig, "DNAS epochs must be >= 0");
  Check(alternation >= 1 && batch >= 1, ErrorKind::kConfig, "DNAS alternation and batch must be >= 1");
}

Json DnasConfig::ToJson() const {
  return {{"weight_lr", weight_lr}, {"arch_lr", arch_lr}, {"epochs", epochs},
          {"alternation", alternation}, {"batch", batch}};
}

DnasConfig DnasConfig::FromJson(const Json& j) {
  DnasConfig c;
  c.weight_lr = j.value("weight_lr", c.weight_lr);
  c.arch_lr = j.value("arch_lr", c.arch_lr);
  c.epochs = j.value("epochs", c.epochs);
  c.alternation = j.value("alternation", c.alternation);
  c.batch = j.value("batch", c.batch);
  c.Validate();
  return c;
}

SuperNet::SuperNet(SearchSpace space, Subspace sub, std::vector<Layer> layers, nn::Classifier head)
    : space_(std::move(space)), sub_(std::move(sub)), layers_(std::move(layers)), head_(std::move(head)) {
  Check(static_cast<int>(layers_.size()) == space_.num_layers(), ErrorKind::kShapeMismatch,
        "SuperNet layer count differs from the space");
  for (const auto& l : layers_) {
    Check(!l.ops.empty() && l.ops.size() == l.candidates.size() &&
              static_cast<std::size_t>(l.alpha.numel()) == l.ops.size(),
          ErrorKind::kShapeMismatch, "SuperNet layer candidate count mismatch");
  }
}

std::vector<nn::Tensor> SuperNet::CandidateOutputs(int layer, const nn::Tensor& input) const {
  std::vector<nn::Tensor> outs;
  for (const auto& op : layers_.at(layer).ops) outs.push_back(nn::Relu(op.Forward(input)));
  return outs;
}

nn::Tensor SuperNet::Forward(const nn::Tensor& x) const {
  nn::Tensor h = x;
  for (int l = 0; l < static_cast<int>(layers_.size()); ++l) {
    h = nn::Mixture(CandidateOutputs(l, h), layers_[l].alpha);
  }
  return head_.Forward(nn::GlobalAvgPool(h));
}

nn::Tensor SuperNet::Loss(const nn::Tensor& x, const std::vector<int>& labels) const {
  return nn::SoftmaxCrossEntropy(Forward(x), labels);
}

std::vector<nn::Tensor> SuperNet::WeightParameters() const {
  std::vector<nn::Tensor> params;
  for (const auto& l : layers_) {
    for (const auto& op : l.ops) params.push_back(op.weights);
  }
  params.push_back(head_.weights);
  params.push_back(head_.bias);
  return params;
}

std::vector<nn::Tensor> SuperNet::ArchParameters() const {
  std::vector<nn::Tensor> params;
  for (const auto& l : layers_) params.push_back(l.alpha);
  return params;
}

void SuperNet::Save(const std::string& path) const {
  Json layers = Json::array();
  Json alphas = Json::array();
  for (const auto& l : layers_) {
    Json quant = Json::array();
    for (const auto& op : l.ops) quant.push_back({{"int_bits", op.quant.int_bits}, {"frac_bits", op.quant.frac_bits}});
    layers.push_back({{"candidates", l.candidates}, {"quant", quant}});
    alphas.push_back(std::vector<double>(l.alpha.values().begin(), l.alpha.values().end()));
  }
  Json header = {{"kind", "supernet"}, {"space", space_.ToJson()}, {"layers", layers}, {"alpha", alphas}};
  nn::WriteCheckpoint(path, std::move(header), WeightParameters());
}

SuperNet SuperNet::Load(const std::string& path) {
  auto ck = nn::ReadCheckpoint(path);
  Check(ck.header.value("kind", "") == "supernet", ErrorKind::kIo, path + " is not a SuperNet checkpoint");
  auto space = SearchSpace::FromJson(ck.header.at("space"));
  const auto& jl = ck.header.at("layers");
  const auto& ja = ck.header.at("alpha");
  std::vector<Layer> layers;
  std::vector<std::vector<CandidateTuple>> allowed;
  std::size_t t = 0;
  for (std::size_t l = 0; l < jl.size(); ++l) {
    Layer layer;
    layer.candidates = jl[l].at("candidates").get<std::vector<CandidateTuple>>();
    const auto& quant = jl[l].at("quant");
    for (std::size_t c = 0; c < layer.candidates.size(); ++c) {
      Check(t < ck.tensors.size(), ErrorKind::kIo, "SuperNet checkpoint is missing tensors");
      layer.ops.push_back({ck.tensors[t++],
                           {quant[c].at("int_bits").get<int>(), quant[c].at("frac_bits").get<int>()},
                           space.layer(static_cast<int>(l)).stride});
    }
    auto a = ja.at(l).get<std::vector<double>>();
    const int n = static_cast<int>(a.size());
    layer.alpha = nn::Tensor::FromData({n}, std::move(a), true);
    allowed.push_back(layer.candidates);
    layers.push_back(std::move(layer));
  }
  Check(ck.tensors.size() == t + 2, ErrorKind::kIo, "SuperNet checkpoint tensor count mismatch");
  nn::Classifier head{ck.tensors[t], ck.tensors[t + 1]};
  Subspace sub(std::move(allowed));
  return SuperNet(std::move(space), std::move(sub), std::move(layers), std::move(head));
}

SuperNet BuildSupernet(const SearchSpace& space, const Subspace& sub, std::uint64_t seed) {
  Check(sub.num_layers() == space.num_layers(), ErrorKind::kShapeMismatch,
        "subspace layer count differs from the space");
  Rng rng(seed);
  std::vector<SuperNet::Layer> layers;
  for (int l = 0; l < space.num_layers(); ++l) {
    SuperNet::Layer layer;
    layer.candidates = sub.layer(l);
    for (const auto& c : layer.candidates) {
      Check(space.IsValid(c), ErrorKind::kInvalidArgument, "subspace candidate not valid in space");
      layer.ops.push_back(nn::MakeConvLayer(space.layer(l), space.KernelSize(c), nn::QuantFor(space, c), rng));
    }
    layer.alpha = nn::Tensor::Zeros({static_cast<int>(layer.candidates.size())}, true);
    layers.push_back(std::move(layer));
  }
  auto head = nn::MakeClassifier(space.layers().back().out_channels, space.num_classes(), rng);
  return SuperNet(space, sub, std::move(layers), std::move(head));
}

void AlternateTrain(SuperNet& sn, const Dataset& ds, const DnasConfig& cfg, std::uint64_t seed) {
  cfg.Validate();
  if (cfg.epochs == 0) return;
  Check(!ds.train.empty() && !ds.val.empty(), ErrorKind::kInvalidArgument,
        "alternating DNAS training needs train and val splits");
  auto weights = sn.WeightParameters();
  auto alphas = sn.ArchParameters();
  std::vector<nn::Tensor> all = weights;
  all.insert(all.end(), alphas.begin(), alphas.end());

  Rng rng(seed);
  std::vector<std::size_t> train = ds.train;
  std::vector<std::size_t> val = ds.val;
  std::shuffle(val.begin(), val.end(), rng);
  std::size_t val_cursor = 0;
  auto next_val_batch = [&]() {
    if (val_cursor >= val.size()) {
      std::shuffle(val.begin(), val.end(), rng);
      val_cursor = 0;
    }
    const auto n = std::min<std::size_t>(cfg.batch, val.size() - val_cursor);
    std::span<const std::size_t> chunk(val.data() + val_cursor, n);
    val_cursor += n;
    return chunk;
  };

  int steps = 0;
  for (int e = 0; e < cfg.epochs; ++e) {
    std::shuffle(train.begin(), train.end(), rng);
    for (std::size_t start = 0; start < train.size(); start += cfg.batch) {
      std::span<const std::size_t> chunk(train.data() + start,
                                         std::min<std::size_t>(cfg.batch, train.size() - start));
      nn::ZeroGrad(all);
      nn::Backward(sn.Loss(ds.Batch(chunk), ds.Labels(chunk)));
      nn::SgdStep(weights, cfg.weight_lr);
      if (++steps % cfg.alternation == 0) {
        const auto vchunk = next_val_batch();
        nn::ZeroGrad(all);
        nn::Backward(sn.Loss(ds.Batch(vchunk), ds.Labels(vchunk)));
        nn::SgdStep(alphas, cfg.arch_lr);
      }
    }
  }
  nn::ZeroGrad(all);
}

Architecture ArgmaxArchitecture(const Subspace& sub, const std::vector<nn::Tensor>& alphas) {
  Check(static_cast<int>(alphas.size()) == sub.num_layers(), ErrorKind::kShapeMismatch,
        "alpha table count differs from the subspace");
  std::vector<CandidateTuple> tuples;
  for (int l = 0; l < sub.num_layers(); ++l) {
    const auto a = alphas[l].values();
    // max_element returns the first maximum: ties go to the lowest index.
    const auto best = std::max_element(a.begin(), a.end()) - a.begin();
    tuples.push_back(sub.layer(l).at(static_cast<std::size_t>(best)));
  }
  return Architecture::FromTuples(tuples);
}

Architecture DeriveBest(const SuperNet& sn) {
  return ArgmaxArchitecture(sn.subspace(), sn.ArchParameters());
}

DnasResult DnasSearch(const SearchSpace& space, const Subspace& sub, const Dataset& ds,
                      const DnasConfig& dnas, const TrainConfig& train, const RewardParams& reward,
                      const CostModelParams& cost, std::uint64_t seed) {
  auto sn = BuildSupernet(space, sub, seed);
  DnasResult result;
  result.supernet_bytes = sn.ModeledMemory(cost);
  AlternateTrain(sn, ds, dnas, seed + 1);
  result.arch = DeriveBest(sn);
  const double acc = TrainAndEval(space, result.arch, ds, train, train.full_epochs, seed + 2);
  result.fom = MakeFom(acc, Aops(space, result.arch), reward);
  return result;
}

SurrogateSupernet::SurrogateSupernet(const SearchSpace& space, Subspace sub,
                                     const SurrogateSpec& surrogate)
    : sub_(std::move(sub)), interaction_(surrogate.interaction) {
  Check(sub_.num_layers() == space.num_layers(), ErrorKind::kShapeMismatch,
        "subspace layer count differs from the space");
  const int L = space.num_layers();
  std::vector<std::vector<std::size_t>> flat(L);
  for (int l = 0; l < L; ++l) {
    const auto& cands = sub_.layer(l);
    std::vector<double> s;
    for (const auto& c : cands) {
      flat[l].push_back(FlatCandidateIndex(space, c));
      s.push_back(surrogate.layer_scores.at(l).at(flat[l].back()) / L);
    }
    const int n = static_cast<int>(cands.size());
    alphas_.push_back(nn::Tensor::Zeros({n}, true));
    scores_.push_back(nn::Tensor::FromData({n}, std::move(s)));
  }
  for (int l = 0; l + 1 < L; ++l) {
    std::vector<double> u;
    for (auto a : flat[l]) {
      for (auto b : flat[l + 1]) u.push_back(surrogate.pair_scores.at(l).at(a).at(b) / (L - 1));
    }
    pairs_.push_back(nn::Tensor::FromData(
        {static_cast<int>(flat[l].size()), static_cast<int>(flat[l + 1].size())}, std::move(u)));
  }
}

nn::Tensor SurrogateSupernet::ExpectedAccuracy() const {
  std::vector<nn::Tensor> probs;
  for (const auto& a : alphas_) probs.push_back(nn::Softmax(a));
  nn::Tensor total = nn::Dot(probs[0], scores_[0]);
  for (std::size_t l = 1; l < probs.size(); ++l) total = nn::Add(total, nn::Dot(probs[l], scores_[l]));
  if (interaction_ != 0) {
    for (std::size_t l = 0; l + 1 < probs.size(); ++l) {
      const int n = probs[l].dim(0);
      auto row = nn::MatMul(nn::Reshape(probs[l], {1, n}), pairs_[l]);
      total = nn::Add(total, nn::Scale(nn::Dot(row, probs[l + 1]), interaction_));
    }
  }
  return total;
}

void SurrogateSupernet::Train(const DnasConfig& cfg) {
  cfg.Validate();
  std::vector<nn::Tensor> params = alphas_;
  for (int e = 0; e < cfg.epochs; ++e) {
    nn::ZeroGrad(params);
    nn::Backward(nn::Scale(ExpectedAccuracy(), -1.0));
    nn::SgdStep(params, cfg.arch_lr);
  }
}

Architecture SurrogateSupernet::DeriveBest() const { return ArgmaxArchitecture(sub_, alphas_); }

}  // namespace radars
