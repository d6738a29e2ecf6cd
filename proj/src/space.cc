#include "radars/space.h"

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "radars/error.h"

namespace radars {
namespace {

int CeilDiv(int a, int b) { return (a + b - 1) / b; }

const std::map<std::string, int>& BuiltinFixed() {
  static const std::map<std::string, int> kFixed = {
      {kKernelSize, 3}, {kIntBits, 3}, {kFracBits, 6}};
  return kFixed;
}

std::string ShortName(const std::string& name) {
  if (name == kKernelSize) return "k";
  if (name == kIntBits) return "i";
  if (name == kFracBits) return "f";
  return name + "=";
}

}  // namespace

SearchSpace::SearchSpace(InputShape input, int num_classes, std::vector<LayerSpec> layers,
                         std::vector<HyperParamType> hp_types, std::map<std::string, int> fixed)
    : input_(input),
      num_classes_(num_classes),
      specs_(std::move(layers)),
      hp_types_(std::move(hp_types)),
      fixed_(BuiltinFixed()) {
  for (const auto& [k, v] : fixed) fixed_[k] = v;

  Check(input_.channels > 0 && input_.width > 0 && input_.height > 0, ErrorKind::kConfig,
        "input_shape entries must be positive");
  Check(num_classes_ >= 1, ErrorKind::kConfig, "num_classes must be positive");
  Check(!specs_.empty(), ErrorKind::kConfig, "search space needs at least one layer");
  Check(!hp_types_.empty(), ErrorKind::kConfig, "search space needs at least one hp_type");

  std::set<std::string> names;
  for (const auto& t : hp_types_) {
    Check(!t.name.empty(), ErrorKind::kConfig, "hp_type without a name");
    Check(names.insert(t.name).second, ErrorKind::kConfig, "duplicate hp_type " + t.name);
    Check(!t.choices.empty(), ErrorKind::kConfig, "hp_type " + t.name + " has no choices");
    for (std::size_t i = 0; i < t.choices.size(); ++i) {
      Check(t.choices[i] > 0, ErrorKind::kConfig, "hp_type " + t.name + " has a non-positive choice");
      Check(i == 0 || t.choices[i] > t.choices[i - 1], ErrorKind::kConfig,
            "hp_type " + t.name + " choices must be strictly increasing");
      if (t.name == kKernelSize) {
        Check(t.choices[i] % 2 == 1, ErrorKind::kConfig, "kernel sizes must be odd");
      }
    }
  }
  Check(fixed_.at(kKernelSize) % 2 == 1, ErrorKind::kConfig, "fixed kernel size must be odd");

  int channels = input_.channels;
  int width = input_.width;
  int height = input_.height;
  for (const auto& s : specs_) {
    Check(s.out_channels > 0 && s.stride > 0, ErrorKind::kConfig,
          "layer out_channels and stride must be positive");
    LayerTemplate t;
    t.in_channels = channels;
    t.out_channels = s.out_channels;
    t.stride = s.stride;
    t.in_width = width;
    t.in_height = height;
    t.out_width = CeilDiv(width, s.stride);
    t.out_height = CeilDiv(height, s.stride);
    layers_.push_back(t);
    channels = t.out_channels;
    width = t.out_width;
    height = t.out_height;
  }
}

SearchSpace SearchSpace::FromJson(const Json& j) {
  try {
    const auto& shape = j.at("input_shape");
    Check(shape.is_array() && shape.size() == 3, ErrorKind::kConfig,
          "input_shape must be [channels, width, height]");
    InputShape input{shape[0].get<int>(), shape[1].get<int>(), shape[2].get<int>()};
    std::vector<LayerSpec> layers;
    for (const auto& l : j.at("layers")) {
      layers.push_back({l.at("out_channels").get<int>(), l.value("stride", 1)});
    }
    std::vector<HyperParamType> types;
    for (const auto& t : j.at("hp_types")) {
      types.push_back({t.at("name").get<std::string>(), t.at("choices").get<std::vector<int>>()});
    }
    std::map<std::string, int> fixed;
    if (j.contains("fixed")) fixed = j.at("fixed").get<std::map<std::string, int>>();
    return SearchSpace(input, j.at("num_classes").get<int>(), std::move(layers), std::move(types),
                       std::move(fixed));
  } catch (const Json::exception& e) {
    Fail(ErrorKind::kConfig, std::string("search space: ") + e.what());
  }
}

SearchSpace SearchSpace::LoadFile(const std::string& path) {
  std::ifstream in(path);
  Check(static_cast<bool>(in), ErrorKind::kConfig, "cannot open search space " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    Fail(ErrorKind::kConfig, path + ": " + e.what());
  }
  return FromJson(j);
}

Json SearchSpace::ToJson() const {
  Json layers = Json::array();
  for (const auto& s : specs_) layers.push_back({{"out_channels", s.out_channels}, {"stride", s.stride}});
  Json types = Json::array();
  for (const auto& t : hp_types_) types.push_back({{"name", t.name}, {"choices", t.choices}});
  return {{"input_shape", {input_.channels, input_.width, input_.height}},
          {"num_classes", num_classes_},
          {"layers", layers},
          {"hp_types", types},
          {"fixed", fixed_}};
}

std::uint64_t SearchSpace::candidates_per_layer() const {
  std::uint64_t n = 1;
  for (const auto& t : hp_types_) n *= t.choices.size();
  return n;
}

int SearchSpace::TypeIndex(const std::string& name) const {
  for (std::size_t i = 0; i < hp_types_.size(); ++i) {
    if (hp_types_[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

int SearchSpace::Value(const CandidateTuple& c, const std::string& name) const {
  int t = TypeIndex(name);
  if (t < 0) {
    auto it = fixed_.find(name);
    Check(it != fixed_.end(), ErrorKind::kInvalidArgument, "no value for hyper-parameter " + name);
    return it->second;
  }
  return hp_types_[t].choices.at(c.at(t));
}

int SearchSpace::MaxKernelSize() const {
  int t = TypeIndex(kKernelSize);
  return t < 0 ? fixed_.at(kKernelSize) : hp_types_[t].choices.back();
}

bool SearchSpace::IsValid(const CandidateTuple& c) const {
  if (c.size() != hp_types_.size()) return false;
  for (std::size_t t = 0; t < c.size(); ++t) {
    if (c[t] < 0 || c[t] >= static_cast<int>(hp_types_[t].choices.size())) return false;
  }
  return true;
}

std::string SearchSpace::CandidateName(const CandidateTuple& c) const {
  std::string out;
  for (std::size_t t = 0; t < hp_types_.size(); ++t) {
    if (t) out += '/';
    out += ShortName(hp_types_[t].name) + std::to_string(hp_types_[t].choices.at(c.at(t)));
  }
  return out;
}

SearchSpace SearchSpace::WithTypes(std::vector<HyperParamType> hp_types) const {
  return SearchSpace(input_, num_classes_, specs_, std::move(hp_types), fixed_);
}

Architecture::Architecture(int num_layers, int num_types, std::vector<int> indices)
    : num_layers_(num_layers), num_types_(num_types), indices_(std::move(indices)) {
  Check(num_layers_ >= 1 && num_types_ >= 1 &&
            indices_.size() == static_cast<std::size_t>(num_layers_) * num_types_,
        ErrorKind::kInvalidArgument, "architecture dimensions do not match its index count");
}

Architecture Architecture::FromTuples(const std::vector<CandidateTuple>& tuples) {
  Check(!tuples.empty(), ErrorKind::kInvalidArgument, "architecture needs at least one layer");
  std::vector<int> idx;
  for (const auto& t : tuples) {
    Check(t.size() == tuples[0].size(), ErrorKind::kInvalidArgument, "ragged candidate tuples");
    idx.insert(idx.end(), t.begin(), t.end());
  }
  return Architecture(static_cast<int>(tuples.size()), static_cast<int>(tuples[0].size()),
                      std::move(idx));
}

CandidateTuple Architecture::tuple(int layer) const {
  auto first = indices_.begin() + static_cast<std::ptrdiff_t>(layer) * num_types_;
  return CandidateTuple(first, first + num_types_);
}

bool Architecture::IsValidIn(const SearchSpace& space) const {
  if (num_layers_ != space.num_layers() || num_types_ != space.num_types()) return false;
  for (int l = 0; l < num_layers_; ++l) {
    if (!space.IsValid(tuple(l))) return false;
  }
  return true;
}

std::string Architecture::ToIndexString() const {
  std::string out;
  for (int l = 0; l < num_layers_; ++l) {
    if (l) out += '|';
    for (int t = 0; t < num_types_; ++t) {
      if (t) out += ',';
      out += std::to_string(choice(l, t));
    }
  }
  return out;
}

Architecture Architecture::Parse(const std::string& text) {
  std::vector<CandidateTuple> tuples;
  std::stringstream layers(text);
  std::string layer;
  while (std::getline(layers, layer, '|')) {
    CandidateTuple t;
    std::stringstream fields(layer);
    std::string f;
    while (std::getline(fields, f, ',')) {
      try {
        std::size_t used = 0;
        t.push_back(std::stoi(f, &used));
        Check(used == f.size(), ErrorKind::kInvalidArgument, "bad architecture index '" + f + "'");
      } catch (const std::logic_error&) {
        Fail(ErrorKind::kInvalidArgument, "bad architecture index '" + f + "'");
      }
    }
    tuples.push_back(std::move(t));
  }
  return FromTuples(tuples);
}

std::string Architecture::Describe(const SearchSpace& space) const {
  std::string out;
  for (int l = 0; l < num_layers_; ++l) {
    if (l) out += " | ";
    out += space.CandidateName(tuple(l));
  }
  return out;
}

Json Architecture::ToJson() const {
  Json layers = Json::array();
  for (int l = 0; l < num_layers_; ++l) layers.push_back(tuple(l));
  return layers;
}

Architecture Architecture::FromJson(const Json& j) {
  return FromTuples(j.get<std::vector<CandidateTuple>>());
}

Subspace::Subspace(std::vector<std::vector<CandidateTuple>> allowed) : allowed_(std::move(allowed)) {
  for (auto& layer : allowed_) {
    Check(!layer.empty(), ErrorKind::kEmptySet, "subspace layer without candidates");
    std::sort(layer.begin(), layer.end());
    layer.erase(std::unique(layer.begin(), layer.end()), layer.end());
  }
}

std::size_t Subspace::total_candidates() const {
  std::size_t n = 0;
  for (const auto& layer : allowed_) n += layer.size();
  return n;
}

int Subspace::IndexOf(int l, const CandidateTuple& c) const {
  const auto& layer = allowed_.at(l);
  auto it = std::lower_bound(layer.begin(), layer.end(), c);
  if (it == layer.end() || *it != c) return -1;
  return static_cast<int>(it - layer.begin());
}

bool Subspace::Contains(const Architecture& a) const {
  if (a.num_layers() != num_layers()) return false;
  for (int l = 0; l < num_layers(); ++l) {
    if (IndexOf(l, a.tuple(l)) < 0) return false;
  }
  return true;
}

double Subspace::num_paths() const {
  double n = 1;
  for (const auto& layer : allowed_) n *= static_cast<double>(layer.size());
  return n;
}

Json Subspace::ToJson() const { return allowed_; }

std::uint64_t SpaceSize(const SearchSpace& space) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t per_layer = space.candidates_per_layer();
  std::uint64_t n = 1;
  for (int l = 0; l < space.num_layers(); ++l) {
    if (n > kMax / per_layer) return kMax;
    n *= per_layer;
  }
  return n;
}

Architecture Sample(const SearchSpace& space, Rng& rng) {
  std::vector<int> idx;
  idx.reserve(static_cast<std::size_t>(space.num_layers()) * space.num_types());
  for (int l = 0; l < space.num_layers(); ++l) {
    for (const auto& t : space.hp_types()) {
      std::uniform_int_distribution<int> pick(0, static_cast<int>(t.choices.size()) - 1);
      idx.push_back(pick(rng));
    }
  }
  return Architecture(space.num_layers(), space.num_types(), std::move(idx));
}

std::vector<Architecture> Enumerate(const SearchSpace& space, std::uint64_t limit) {
  const std::uint64_t size = SpaceSize(space);
  Check(size <= limit, ErrorKind::kSpaceTooLarge,
        "space holds " + std::to_string(size) + " architectures, limit is " + std::to_string(limit));
  const int L = space.num_layers();
  const int T = space.num_types();
  std::vector<int> radix;
  for (int l = 0; l < L; ++l) {
    for (const auto& t : space.hp_types()) radix.push_back(static_cast<int>(t.choices.size()));
  }
  std::vector<Architecture> out;
  out.reserve(size);
  std::vector<int> idx(radix.size(), 0);
  for (std::uint64_t n = 0; n < size; ++n) {
    out.emplace_back(L, T, idx);
    for (int d = static_cast<int>(idx.size()) - 1; d >= 0; --d) {
      if (++idx[d] < radix[d]) break;
      idx[d] = 0;
    }
  }
  return out;
}

Subspace SubspaceFrom(const SearchSpace& space, const std::vector<Architecture>& archs) {
  Check(!archs.empty(), ErrorKind::kEmptySet, "cannot build a subspace from no architectures");
  std::vector<std::vector<CandidateTuple>> allowed(space.num_layers());
  for (const auto& a : archs) {
    Check(a.IsValidIn(space), ErrorKind::kInvalidArgument,
          "architecture " + a.ToIndexString() + " is not valid in the space");
    for (int l = 0; l < space.num_layers(); ++l) allowed[l].push_back(a.tuple(l));
  }
  return Subspace(std::move(allowed));
}

}  // namespace radars
