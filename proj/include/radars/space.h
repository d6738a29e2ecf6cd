#ifndef RADARS_SPACE_H_
#define RADARS_SPACE_H_

#include <compare>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

namespace radars {

using Json = nlohmann::json;
using Rng = std::mt19937_64;

/// A searched hyper-parameter with its ordered domain values.
struct HyperParamType {
  std::string name;
  std::vector<int> choices;
};

/// Fixed shape information of one convolution layer. Output dims use ceiling
/// division by the stride ("same" padding).
struct LayerTemplate {
  int in_channels = 0;
  int out_channels = 0;
  int stride = 1;
  int in_width = 0;
  int in_height = 0;
  int out_width = 0;
  int out_height = 0;
};

struct InputShape {
  int channels = 0;
  int width = 0;
  int height = 0;
};

// Names with a cost/network meaning. Other hyper-parameter types are opaque:
// they multiply the candidate count but do not change the layer itself.
inline constexpr const char* kKernelSize = "kernel_size";
inline constexpr const char* kIntBits = "int_bits";
inline constexpr const char* kFracBits = "frac_bits";

/// One choice index per hyper-parameter type, i.e. a single candidate
/// operation of a layer.
using CandidateTuple = std::vector<int>;

class Architecture;

class SearchSpace {
 public:
  struct LayerSpec {
    int out_channels = 0;
    int stride = 1;
  };

  SearchSpace(InputShape input, int num_classes, std::vector<LayerSpec> layers,
              std::vector<HyperParamType> hp_types, std::map<std::string, int> fixed = {});

  static SearchSpace FromJson(const Json& j);
  static SearchSpace LoadFile(const std::string& path);
  Json ToJson() const;

  int num_layers() const { return static_cast<int>(layers_.size()); }
  int num_types() const { return static_cast<int>(hp_types_.size()); }
  int num_classes() const { return num_classes_; }
  const InputShape& input_shape() const { return input_; }
  const LayerTemplate& layer(int l) const { return layers_.at(l); }
  const std::vector<LayerTemplate>& layers() const { return layers_; }
  const std::vector<HyperParamType>& hp_types() const { return hp_types_; }
  const std::vector<LayerSpec>& layer_specs() const { return specs_; }

  /// Product of D_i over all types: distinct candidate operations per layer.
  std::uint64_t candidates_per_layer() const;

  /// Domain value of a named hyper-parameter for a candidate; falls back to
  /// the fixed value when the type is not searched.
  int Value(const CandidateTuple& c, const std::string& name) const;
  int KernelSize(const CandidateTuple& c) const { return Value(c, kKernelSize); }
  int IntBits(const CandidateTuple& c) const { return Value(c, kIntBits); }
  int FracBits(const CandidateTuple& c) const { return Value(c, kFracBits); }
  /// Sign bit plus integer and fraction bits.
  int BitWidth(const CandidateTuple& c) const { return 1 + IntBits(c) + FracBits(c); }
  int MaxKernelSize() const;

  bool IsValid(const CandidateTuple& c) const;
  std::string CandidateName(const CandidateTuple& c) const;

  /// Same layers, different searched types. Used by growth sweeps.
  SearchSpace WithTypes(std::vector<HyperParamType> hp_types) const;

 private:
  int TypeIndex(const std::string& name) const;

  InputShape input_;
  int num_classes_;
  std::vector<LayerSpec> specs_;
  std::vector<LayerTemplate> layers_;
  std::vector<HyperParamType> hp_types_;
  std::map<std::string, int> fixed_;
};

/// One choice index per (layer, type), stored layer-major. Ordered
/// lexicographically by the flattened index tuple.
class Architecture {
 public:
  Architecture() = default;
  Architecture(int num_layers, int num_types, std::vector<int> indices);
  static Architecture FromTuples(const std::vector<CandidateTuple>& tuples);

  int num_layers() const { return num_layers_; }
  int num_types() const { return num_types_; }
  int choice(int layer, int type) const { return indices_[layer * num_types_ + type]; }
  CandidateTuple tuple(int layer) const;
  const std::vector<int>& indices() const { return indices_; }

  bool IsValidIn(const SearchSpace& space) const;

  /// "0,1,2|1,0,0": one comma-separated tuple per layer.
  std::string ToIndexString() const;
  static Architecture Parse(const std::string& text);
  /// "k3/i1/f3 | k5/i3/f6" style, using the space's type names.
  std::string Describe(const SearchSpace& space) const;

  Json ToJson() const;
  static Architecture FromJson(const Json& j);

  friend bool operator==(const Architecture&, const Architecture&) = default;
  friend auto operator<=>(const Architecture& a, const Architecture& b) {
    return a.indices_ <=> b.indices_;
  }

 private:
  int num_layers_ = 0;
  int num_types_ = 0;
  std::vector<int> indices_;
};

/// Per-layer deduplicated candidate sets; candidates within a layer are kept
/// in lexicographic order so that candidate indices are deterministic.
class Subspace {
 public:
  Subspace() = default;
  explicit Subspace(std::vector<std::vector<CandidateTuple>> allowed);

  int num_layers() const { return static_cast<int>(allowed_.size()); }
  const std::vector<CandidateTuple>& layer(int l) const { return allowed_.at(l); }
  const std::vector<std::vector<CandidateTuple>>& allowed() const { return allowed_; }
  std::size_t total_candidates() const;
  /// Position of the tuple within layer l, or -1.
  int IndexOf(int l, const CandidateTuple& c) const;
  bool Contains(const Architecture& a) const;
  /// Number of paths (product of per-layer set sizes).
  double num_paths() const;

  Json ToJson() const;

 private:
  std::vector<std::vector<CandidateTuple>> allowed_;
};

/// Product of choice counts over all layers and types; saturates at
/// UINT64_MAX.
std::uint64_t SpaceSize(const SearchSpace& space);

Architecture Sample(const SearchSpace& space, Rng& rng);

/// Every architecture in lexicographic order. Throws SpaceTooLarge when the
/// space holds more than `limit` architectures.
std::vector<Architecture> Enumerate(const SearchSpace& space, std::uint64_t limit);

/// Per-layer union of the candidates used by `archs`. Throws EmptySet.
Subspace SubspaceFrom(const SearchSpace& space, const std::vector<Architecture>& archs);

}  // namespace radars

#endif  // RADARS_SPACE_H_
