#include "radars/controller.h"

#include <cmath>
#include <fstream>

#include "radars/error.h"
#include "radars/ops.h"

namespace radars {

void ControllerConfig::Validate() const {
  Check(lr > 0, ErrorKind::kConfig, "controller lr must be positive");
  Check(baseline_decay >= 0 && baseline_decay < 1, ErrorKind::kConfig,
        "baseline_decay must lie in [0, 1)");
  Check(entropy_coef >= 0, ErrorKind::kConfig, "entropy_coef must be >= 0");
}

Json ControllerConfig::ToJson() const {
  return {{"lr", lr}, {"baseline_decay", baseline_decay}, {"entropy_coef", entropy_coef}, {"seed", seed}};
}

ControllerConfig ControllerConfig::FromJson(const Json& j) {
  ControllerConfig c;
  c.lr = j.value("lr", c.lr);
  c.baseline_decay = j.value("baseline_decay", c.baseline_decay);
  c.entropy_coef = j.value("entropy_coef", c.entropy_coef);
  c.seed = j.value("seed", c.seed);
  c.Validate();
  return c;
}

Policy::Policy(const SearchSpace& space) {
  logits.resize(space.num_layers());
  for (auto& layer : logits) {
    for (const auto& t : space.hp_types()) layer.emplace_back(t.choices.size(), 0.0);
  }
}

Json Policy::ToJson() const {
  return {{"logits", logits}, {"baseline", baseline}, {"step_count", step_count}};
}

Policy Policy::FromJson(const Json& j) {
  Policy p;
  p.logits = j.at("logits").get<std::vector<std::vector<std::vector<double>>>>();
  p.baseline = j.at("baseline").get<double>();
  p.step_count = j.at("step_count").get<std::uint64_t>();
  return p;
}

void Policy::Save(const std::string& path) const {
  std::ofstream out(path);
  Check(static_cast<bool>(out), ErrorKind::kIo, "cannot write " + path);
  out << ToJson().dump() << '\n';
}

Policy Policy::Load(const std::string& path) {
  std::ifstream in(path);
  Check(static_cast<bool>(in), ErrorKind::kIo, "cannot open " + path);
  try {
    return FromJson(Json::parse(in));
  } catch (const Json::exception& e) {
    Fail(ErrorKind::kIo, path + ": " + e.what());
  }
}

ActionTables ActionProbs(const Policy& policy) {
  ActionTables probs;
  for (const auto& layer : policy.logits) {
    auto& out = probs.emplace_back();
    for (const auto& decision : layer) out.push_back(nn::SoftmaxValues(decision));
  }
  return probs;
}

Prediction Predict(const Policy& policy, Rng& rng) {
  const auto probs = ActionProbs(policy);
  std::vector<int> idx;
  double log_prob = 0;
  for (const auto& layer : probs) {
    for (const auto& p : layer) {
      std::discrete_distribution<int> pick(p.begin(), p.end());
      const int c = pick(rng);
      idx.push_back(c);
      log_prob += std::log(p[c]);
    }
  }
  const int L = static_cast<int>(probs.size());
  return {Architecture(L, static_cast<int>(probs.at(0).size()), std::move(idx)), log_prob};
}

double LogProb(const Policy& policy, const Architecture& arch) {
  const auto probs = ActionProbs(policy);
  double lp = 0;
  for (int l = 0; l < arch.num_layers(); ++l) {
    for (int t = 0; t < arch.num_types(); ++t) lp += std::log(probs.at(l).at(t).at(arch.choice(l, t)));
  }
  return lp;
}

void UpdatePolicy(Policy& policy, const RewardBatch& batch, const ControllerConfig& cfg) {
  Check(!batch.empty(), ErrorKind::kEmptySet, "controller update needs at least one sample");
  double mean = 0;
  for (const auto& [arch, r] : batch) {
    Check(std::isfinite(r), ErrorKind::kNonFiniteReward, "reward is not finite");
    mean += r;
  }
  mean /= static_cast<double>(batch.size());
  if (policy.step_count == 0) policy.baseline = mean;

  const auto probs = ActionProbs(policy);
  const double n = static_cast<double>(batch.size());
  for (std::size_t l = 0; l < probs.size(); ++l) {
    for (std::size_t t = 0; t < probs[l].size(); ++t) {
      const auto& p = probs[l][t];
      std::vector<double> step(p.size(), 0.0);
      for (const auto& [arch, r] : batch) {
        const double adv = (r - policy.baseline) / n;
        if (adv == 0) continue;
        const int chosen = arch.choice(static_cast<int>(l), static_cast<int>(t));
        for (std::size_t c = 0; c < p.size(); ++c) {
          step[c] += adv * ((static_cast<int>(c) == chosen ? 1.0 : 0.0) - p[c]);
        }
      }
      if (cfg.entropy_coef > 0) {
        // dH/dz_j = -p_j (log p_j + H)
        double H = 0;
        for (double q : p) {
          if (q > 0) H -= q * std::log(q);
        }
        for (std::size_t c = 0; c < p.size(); ++c) {
          if (p[c] > 0) step[c] += cfg.entropy_coef * (-p[c] * (std::log(p[c]) + H));
        }
      }
      for (std::size_t c = 0; c < p.size(); ++c) policy.logits[l][t][c] += cfg.lr * step[c];
    }
  }
  policy.baseline = cfg.baseline_decay * policy.baseline + (1.0 - cfg.baseline_decay) * mean;
  ++policy.step_count;
}

}  // namespace radars
