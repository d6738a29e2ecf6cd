#include "radars/config.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "radars/error.h"

namespace radars {
namespace {

std::string Resolve(const std::string& base_dir, const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return p.string();
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

template <typename T>
T Get(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    Fail(ErrorKind::kConfig, std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

Json ParseJsonText(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    // e.byte is 1-based and points just past the offending character.
    std::size_t line = 1, col = 1;
    const std::size_t stop = e.byte == 0 ? 0 : std::min(text.size(), e.byte - 1);
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    Fail(ErrorKind::kConfig, origin + ":" + std::to_string(line) + ":" + std::to_string(col) +
                                 ": malformed JSON (" + e.what() + ")");
  }
}

Json LoadJsonFile(const std::string& path) {
  std::ifstream in(path);
  Check(static_cast<bool>(in), ErrorKind::kConfig, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseJsonText(ss.str(), path);
}

Json DatasetConfig::ToJson() const {
  if (kind == Kind::kSynthetic) {
    Json j = synth.ToJson();
    j["kind"] = "synthetic";
    return j;
  }
  return {{"kind", "cifar10"}, {"files", files}, {"split_seed", split_seed}};
}

DatasetConfig DatasetConfig::FromJson(const Json& j, const std::string& base_dir) {
  DatasetConfig d;
  const auto kind = Get<std::string>(j, "kind", "synthetic");
  if (kind == "synthetic") {
    d.kind = Kind::kSynthetic;
    try {
      d.synth = SynthSpec::FromJson(j);
    } catch (const Json::exception& e) {
      Fail(ErrorKind::kConfig, std::string("synthetic dataset: ") + e.what());
    }
  } else if (kind == "cifar10") {
    d.kind = Kind::kCifar10;
    for (const auto& f : Get<std::vector<std::string>>(j, "files", {})) d.files.push_back(Resolve(base_dir, f));
    Check(!d.files.empty(), ErrorKind::kConfig, "cifar10 dataset needs at least one file");
    d.split_seed = Get<std::uint64_t>(j, "split_seed", 0);
  } else {
    Fail(ErrorKind::kConfig, "unknown dataset kind '" + kind + "'");
  }
  return d;
}

Dataset DatasetConfig::Load() const {
  if (kind == Kind::kSynthetic) return SynthDataset(synth);
  std::vector<Dataset> parts;
  for (const auto& f : files) parts.push_back(LoadCifar10Binary(f));
  Dataset ds = Concatenate(parts);
  AssignStratifiedSplits(ds, split_seed);
  return ds;
}

Json EvaluatorConfig::ToJson() const {
  if (kind == Kind::kSurrogate) {
    return {{"kind", "surrogate"}, {"seed", surrogate_seed}, {"interaction", interaction},
            {"proxy_noise", proxy_noise}};
  }
  return {{"kind", "train"}, {"dataset", dataset.ToJson()}};
}

EvaluatorConfig EvaluatorConfig::FromJson(const Json& j, const std::string& base_dir) {
  EvaluatorConfig e;
  const auto kind = Get<std::string>(j, "kind", "surrogate");
  if (kind == "surrogate") {
    e.kind = Kind::kSurrogate;
    e.surrogate_seed = Get<std::uint64_t>(j, "seed", 0);
    e.interaction = Get<double>(j, "interaction", 0.0);
    e.proxy_noise = Get<double>(j, "proxy_noise", e.proxy_noise);
    Check(e.interaction >= 0 && e.proxy_noise >= 0, ErrorKind::kConfig,
          "surrogate interaction and proxy_noise must be >= 0");
  } else if (kind == "train") {
    e.kind = Kind::kTrain;
    Check(j.contains("dataset"), ErrorKind::kConfig, "train evaluator needs a dataset");
    e.dataset = DatasetConfig::FromJson(j.at("dataset"), base_dir);
  } else {
    Fail(ErrorKind::kConfig, "unknown evaluator kind '" + kind + "'");
  }
  return e;
}

void RadarsConfig::Validate() const {
  Check(episodes_per_phase >= 1, ErrorKind::kConfig, "N must be >= 1");
  Check(retrain_count >= 1, ErrorKind::kConfig, "P must be >= 1");
  Check(max_iterations >= 0, ErrorKind::kConfig, "Ep must be >= 0");
  Check(memory_budget >= 0, ErrorKind::kConfig, "memory_budget must be >= 0");
  reward.Validate();
  cost.Validate();
  controller.Validate();
  dnas.Validate();
  train.Validate();
}

Json RadarsConfig::ToJson() const {
  return {{"space", space.ToJson()},
          {"N", episodes_per_phase},
          {"P", retrain_count},
          {"Ep", max_iterations},
          {"reward", reward.ToJson()},
          {"memory_budget", memory_budget},
          {"cost", cost.ToJson()},
          {"controller", controller.ToJson()},
          {"dnas", dnas.ToJson()},
          {"train", train.ToJson()},
          {"evaluator", evaluator.ToJson()},
          {"seed", seed},
          {"pipelined", pipelined},
          {"skip_overflow", skip_overflow}};
}

RadarsConfig RadarsConfig::FromJson(const Json& j, const std::string& base_dir) {
  Check(j.is_object(), ErrorKind::kConfig, "run config must be a JSON object");
  Check(j.contains("space"), ErrorKind::kConfig, "run config needs a 'space'");
  const auto& js = j.at("space");
  SearchSpace space = js.is_string() ? SearchSpace::FromJson(LoadJsonFile(Resolve(base_dir, js.get<std::string>())))
                                     : SearchSpace::FromJson(js);
  RadarsConfig c(std::move(space));
  c.episodes_per_phase = Get<int>(j, "N", c.episodes_per_phase);
  c.retrain_count = Get<int>(j, "P", c.retrain_count);
  c.max_iterations = Get<int>(j, "Ep", c.max_iterations);
  c.memory_budget = Get<double>(j, "memory_budget", c.memory_budget);
  c.seed = Get<std::uint64_t>(j, "seed", c.seed);
  c.pipelined = Get<bool>(j, "pipelined", c.pipelined);
  c.skip_overflow = Get<bool>(j, "skip_overflow", c.skip_overflow);
  try {
    if (j.contains("reward")) c.reward = RewardParams::FromJson(j.at("reward"));
    if (j.contains("cost")) c.cost = CostModelParams::FromJson(j.at("cost"));
    if (j.contains("controller")) c.controller = ControllerConfig::FromJson(j.at("controller"));
    if (j.contains("dnas")) c.dnas = DnasConfig::FromJson(j.at("dnas"));
    if (j.contains("train")) c.train = TrainConfig::FromJson(j.at("train"));
  } catch (const Json::exception& e) {
    Fail(ErrorKind::kConfig, e.what());
  }
  if (j.contains("evaluator")) c.evaluator = EvaluatorConfig::FromJson(j.at("evaluator"), base_dir);
  c.Validate();
  return c;
}

RadarsConfig RadarsConfig::LoadFile(const std::string& path) {
  const auto base = std::filesystem::path(path).parent_path().string();
  return FromJson(LoadJsonFile(path), base);
}

}  // namespace radars
