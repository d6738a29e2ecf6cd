#ifndef RADARS_DATASET_H_
#define RADARS_DATASET_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "radars/tensor.h"
#include "radars/space.h"

namespace radars {

struct Dataset {
  nn::Tensor images;  // (N, C, H, W)
  std::vector<int> labels;
  int num_classes = 0;
  std::vector<std::size_t> train, val, test;

  std::size_t size() const { return labels.size(); }
  int channels() const { return images.dim(1); }
  int height() const { return images.dim(2); }
  int width() const { return images.dim(3); }

  /// Copies the selected samples into a (n, C, H, W) tensor.
  nn::Tensor Batch(std::span<const std::size_t> indices) const;
  std::vector<int> Labels(std::span<const std::size_t> indices) const;

  /// Labels within range, split indices in range and pairwise disjoint.
  void Validate() const;
};

/// Stratified split: per class, the first 70% (rounded) of a seeded shuffle
/// go to train, the next 15% to val, the rest to test. Index lists are sorted.
void AssignStratifiedSplits(Dataset& ds, std::uint64_t seed, double train_fraction = 0.70,
                            double val_fraction = 0.15);

/// CIFAR-10 binary format: repeated 3073-byte records, one label byte (0-9)
/// followed by 1024 red, 1024 green and 1024 blue bytes, each plane row-major.
/// Pixels are scaled to [0, 1]. All records land in `train`; callers assign
/// splits. Throws TruncatedRecord or LabelOutOfRange.
Dataset LoadCifar10Binary(const std::string& path);
Dataset LoadCifar10Binary(std::span<const unsigned char> bytes);

/// Concatenates several loaded files (same image shape).
Dataset Concatenate(const std::vector<Dataset>& parts);

struct SynthSpec {
  int num_classes = 4;
  int channels = 3;
  int height = 8;
  int width = 8;
  int samples_per_class = 100;
  std::uint64_t seed = 1;
  double noise = 0.5;       // per-pixel Gaussian sigma
  double amplitude = 1.0;   // peak of the class blob

  Json ToJson() const;
  static SynthSpec FromJson(const Json& j);
};

/// Class-conditioned Gaussian-blob images: class c draws a bump centred at a
/// class-specific position on channel c mod C (negated for every second wrap)
/// plus isotropic pixel noise. Deterministic per seed; stratified 70/15/15.
Dataset SynthDataset(const SynthSpec& spec);

/// Noise-free class mean image of SynthDataset, flattened (C*H*W).
std::vector<double> SynthClassMean(const SynthSpec& spec, int cls);

}  // namespace radars

#endif  // RADARS_DATASET_H_
