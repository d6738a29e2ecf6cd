#include "radars/dataset.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <set>

#include "radars/error.h"

namespace radars {
namespace {

constexpr std::size_t kCifarSide = 32;
constexpr std::size_t kCifarPixels = 3 * kCifarSide * kCifarSide;
constexpr std::size_t kCifarRecord = 1 + kCifarPixels;
constexpr int kCifarClasses = 10;

}  // namespace

nn::Tensor Dataset::Batch(std::span<const std::size_t> indices) const {
  const std::size_t per = static_cast<std::size_t>(channels()) * height() * width();
  std::vector<double> out(indices.size() * per);
  const auto src = images.values();
  for (std::size_t i = 0; i < indices.size(); ++i) {
    std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(indices[i] * per), per,
                out.begin() + static_cast<std::ptrdiff_t>(i * per));
  }
  return nn::Tensor::FromData({static_cast<int>(indices.size()), channels(), height(), width()},
                              std::move(out));
}

std::vector<int> Dataset::Labels(std::span<const std::size_t> indices) const {
  std::vector<int> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(labels.at(i));
  return out;
}

void Dataset::Validate() const {
  Check(images.defined() && images.shape().size() == 4 &&
            static_cast<std::size_t>(images.dim(0)) == labels.size(),
        ErrorKind::kShapeMismatch, "dataset images and labels disagree");
  for (int l : labels) {
    Check(l >= 0 && l < num_classes, ErrorKind::kLabelOutOfRange,
          "label " + std::to_string(l) + " outside [0," + std::to_string(num_classes) + ")");
  }
  std::set<std::size_t> seen;
  for (const auto* split : {&train, &val, &test}) {
    for (auto i : *split) {
      Check(i < labels.size(), ErrorKind::kInvalidArgument, "split index out of range");
      Check(seen.insert(i).second, ErrorKind::kInvalidArgument, "dataset splits overlap");
    }
  }
}

void AssignStratifiedSplits(Dataset& ds, std::uint64_t seed, double train_fraction,
                            double val_fraction) {
  Rng rng(seed);
  ds.train.clear();
  ds.val.clear();
  ds.test.clear();
  std::vector<std::vector<std::size_t>> by_class(ds.num_classes);
  for (std::size_t i = 0; i < ds.labels.size(); ++i) by_class.at(ds.labels[i]).push_back(i);
  for (auto& members : by_class) {
    std::shuffle(members.begin(), members.end(), rng);
    const auto n = members.size();
    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * n));
    const auto n_val = std::min(n - n_train, static_cast<std::size_t>(std::llround(val_fraction * n)));
    ds.train.insert(ds.train.end(), members.begin(), members.begin() + n_train);
    ds.val.insert(ds.val.end(), members.begin() + n_train, members.begin() + n_train + n_val);
    ds.test.insert(ds.test.end(), members.begin() + n_train + n_val, members.end());
  }
  std::sort(ds.train.begin(), ds.train.end());
  std::sort(ds.val.begin(), ds.val.end());
  std::sort(ds.test.begin(), ds.test.end());
}

Dataset LoadCifar10Binary(std::span<const unsigned char> bytes) {
  Check(bytes.size() % kCifarRecord == 0, ErrorKind::kTruncatedRecord,
        std::to_string(bytes.size()) + " bytes is not a whole number of 3073-byte records");
  const std::size_t n = bytes.size() / kCifarRecord;
  std::vector<double> pixels(n * kCifarPixels);
  Dataset ds;
  ds.num_classes = kCifarClasses;
  ds.labels.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    const unsigned char* rec = bytes.data() + r * kCifarRecord;
    Check(rec[0] < kCifarClasses, ErrorKind::kLabelOutOfRange,
          "record " + std::to_string(r) + " has label " + std::to_string(rec[0]));
    ds.labels[r] = rec[0];
    // Channel planes are already in (C, H, W) order.
    for (std::size_t p = 0; p < kCifarPixels; ++p) pixels[r * kCifarPixels + p] = rec[1 + p] / 255.0;
  }
  ds.images = nn::Tensor::FromData({static_cast<int>(n), 3, kCifarSide, kCifarSide}, std::move(pixels));
  ds.train.resize(n);
  for (std::size_t i = 0; i < n; ++i) ds.train[i] = i;
  return ds;
}

Dataset LoadCifar10Binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  Check(static_cast<bool>(in), ErrorKind::kIo, "cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return LoadCifar10Binary(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

Dataset Concatenate(const std::vector<Dataset>& parts) {
  Check(!parts.empty(), ErrorKind::kEmptySet, "nothing to concatenate");
  Dataset out;
  out.num_classes = parts[0].num_classes;
  std::vector<double> pixels;
  for (const auto& p : parts) {
    Check(p.channels() == parts[0].channels() && p.height() == parts[0].height() &&
              p.width() == parts[0].width(),
          ErrorKind::kShapeMismatch, "datasets have different image shapes");
    const std::size_t offset = out.labels.size();
    pixels.insert(pixels.end(), p.images.values().begin(), p.images.values().end());
    out.labels.insert(out.labels.end(), p.labels.begin(), p.labels.end());
    for (auto i : p.train) out.train.push_back(offset + i);
    for (auto i : p.val) out.val.push_back(offset + i);
    for (auto i : p.test) out.test.push_back(offset + i);
    out.num_classes = std::max(out.num_classes, p.num_classes);
  }
  out.images = nn::Tensor::FromData(
      {static_cast<int>(out.labels.size()), parts[0].channels(), parts[0].height(), parts[0].width()},
      std::move(pixels));
  return out;
}

Json SynthSpec::ToJson() const {
  return {{"num_classes", num_classes}, {"channels", channels}, {"height", height},
          {"width", width}, {"samples_per_class", samples_per_class}, {"seed", seed},
          {"noise", noise}, {"amplitude", amplitude}};
}

SynthSpec SynthSpec::FromJson(const Json& j) {
  SynthSpec s;
  s.num_classes = j.value("num_classes", s.num_classes);
  s.channels = j.value("channels", s.channels);
  s.height = j.value("height", s.height);
  s.width = j.value("width", s.width);
  s.samples_per_class = j.value("samples_per_class", s.samples_per_class);
  s.seed = j.value("seed", s.seed);
  s.noise = j.value("noise", s.noise);
  s.amplitude = j.value("amplitude", s.amplitude);
  return s;
}

std::vector<double> SynthClassMean(const SynthSpec& spec, int cls) {
  const int C = spec.channels, H = spec.height, W = spec.width;
  std::vector<double> mean(static_cast<std::size_t>(C) * H * W, 0.0);
  const int channel = cls % C;
  const double sign = (cls / C) % 2 == 0 ? 1.0 : -1.0;
  // Centres spread on a circle around the image centre.
  const double angle = 2.0 * std::numbers::pi * cls / spec.num_classes;
  const double cy = (H - 1) / 2.0 + 0.25 * H * std::sin(angle);
  const double cx = (W - 1) / 2.0 + 0.25 * W * std::cos(angle);
  const double width = std::max(1.0, std::min(H, W) / 4.0);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const double r2 = (y - cy) * (y - cy) + (x - cx) * (x - cx);
      mean[(static_cast<std::size_t>(channel) * H + y) * W + x] =
          sign * spec.amplitude * std::exp(-r2 / (2 * width * width));
    }
  }
  return mean;
}

Dataset SynthDataset(const SynthSpec& spec) {
  Check(spec.num_classes > 0 && spec.channels > 0 && spec.height > 0 && spec.width > 0 &&
            spec.samples_per_class > 0,
        ErrorKind::kInvalidArgument, "synthetic dataset counts must be positive");
  Check(spec.noise >= 0, ErrorKind::kInvalidArgument, "synthetic noise must be non-negative");
  const std::size_t per = static_cast<std::size_t>(spec.channels) * spec.height * spec.width;
  const std::size_t n = static_cast<std::size_t>(spec.num_classes) * spec.samples_per_class;
  std::vector<std::vector<double>> means;
  for (int c = 0; c < spec.num_classes; ++c) means.push_back(SynthClassMean(spec, c));

  Rng rng(spec.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  Dataset ds;
  ds.num_classes = spec.num_classes;
  std::vector<double> pixels(n * per);
  ds.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int c = static_cast<int>(i % spec.num_classes);
    ds.labels[i] = c;
    for (std::size_t p = 0; p < per; ++p) pixels[i * per + p] = means[c][p] + spec.noise * noise(rng);
  }
  ds.images = nn::Tensor::FromData({static_cast<int>(n), spec.channels, spec.height, spec.width},
                                   std::move(pixels));
  AssignStratifiedSplits(ds, spec.seed ^ 0x9e3779b97f4a7c15ULL);
  return ds;
}

}  // namespace radars
