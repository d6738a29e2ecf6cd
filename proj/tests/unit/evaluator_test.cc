#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "radars/dataset.h"
#include "radars/error.h"
#include "radars/evaluator.h"
#include "test_support.h"

namespace radars {
namespace {

std::vector<unsigned char> CifarBytes(const std::vector<int>& labels) {
  std::vector<unsigned char> bytes;
  for (std::size_t r = 0; r < labels.size(); ++r) {
    bytes.push_back(static_cast<unsigned char>(labels[r]));
    for (int i = 0; i < 3072; ++i) bytes.push_back(static_cast<unsigned char>((i * 7 + r * 13) % 256));
  }
  return bytes;
}

ErrorKind KindOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kInvalidArgument;
}

TEST(Cifar10, TwoRecordsFromFile) {
  const auto bytes = CifarBytes({3, 9});
  ASSERT_EQ(bytes.size(), 6146u);
  const auto path = testing::TempPath("two.bin");
  testing::WriteText(path, std::string(bytes.begin(), bytes.end()));
  const auto ds = LoadCifar10Binary(path);
  EXPECT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds.labels, (std::vector<int>{3, 9}));
  EXPECT_EQ(ds.images.shape(), (nn::Shape{2, 3, 32, 32}));
  // planes are red, green, blue; rows are row-major
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 3; ++c)
      for (int y : {0, 17, 31})
        for (int x : {0, 5, 31}) {
          const int i = c * 1024 + y * 32 + x;
          EXPECT_DOUBLE_EQ(ds.images.at(((r * 3 + c) * 32 + y) * 32 + x), ((i * 7 + r * 13) % 256) / 255.0);
        }
}

TEST(Cifar10, Errors) {
  auto bytes = CifarBytes({1, 2});
  bytes.resize(6000);
  EXPECT_EQ(KindOf([&] { LoadCifar10Binary(bytes); }), ErrorKind::kTruncatedRecord);
  EXPECT_EQ(KindOf([&] { LoadCifar10Binary(CifarBytes({0, 10})); }), ErrorKind::kLabelOutOfRange);
  EXPECT_THROW(LoadCifar10Binary(testing::TempPath("does-not-exist.bin")), Error);
}

TEST(SynthDataset, DeterministicAndStratified) {
  SynthSpec spec;
  const auto a = SynthDataset(spec), b = SynthDataset(spec);
  EXPECT_EQ(a.size(), 400u);
  EXPECT_EQ(a.train.size(), 280u);
  EXPECT_EQ(a.val.size(), 60u);
  EXPECT_EQ(a.test.size(), 60u);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.train, b.train);
  for (std::size_t i = 0; i < a.images.numel(); ++i) ASSERT_EQ(a.images.at(i), b.images.at(i));
  a.Validate();
  std::vector<int> per_class(4, 0);
  for (auto i : a.val) ++per_class[a.labels[i]];
  for (int c : per_class) EXPECT_EQ(c, 15);
}

TEST(SynthDataset, SeparatedMeansGiveLinearProbeAboveNinety) {
  SynthSpec spec;
  const auto ds = SynthDataset(spec);
  std::vector<std::vector<double>> means;
  for (int c = 0; c < spec.num_classes; ++c) means.push_back(SynthClassMean(spec, c));
  double min_sep = 1e300;
  for (int i = 0; i < spec.num_classes; ++i)
    for (int j = i + 1; j < spec.num_classes; ++j) {
      double d2 = 0;
      for (std::size_t k = 0; k < means[i].size(); ++k) d2 += std::pow(means[i][k] - means[j][k], 2);
      min_sep = std::min(min_sep, std::sqrt(d2));
    }
  EXPECT_GE(min_sep, 3 * spec.noise);
  // nearest-mean rule: argmax_c (m_c . x - |m_c|^2 / 2) is linear in x
  const std::size_t dim = means[0].size();
  int correct = 0;
  for (std::size_t n = 0; n < ds.size(); ++n) {
    int best = 0;
    double best_score = -1e300;
    for (int c = 0; c < spec.num_classes; ++c) {
      double dot = 0, norm = 0;
      for (std::size_t k = 0; k < dim; ++k) {
        dot += means[c][k] * ds.images.at(n * dim + k);
        norm += means[c][k] * means[c][k];
      }
      if (dot - norm / 2 > best_score) {
        best_score = dot - norm / 2;
        best = c;
      }
    }
    correct += best == ds.labels[n];
  }
  EXPECT_GT(correct / static_cast<double>(ds.size()), 0.9);
}

TEST(TrainAndEval, ConstantClassIsPerfect) {
  SynthSpec spec;
  spec.num_classes = 2;
  spec.samples_per_class = 20;
  auto ds = SynthDataset(spec);
  std::fill(ds.labels.begin(), ds.labels.end(), 0);
  const SearchSpace s({3, 8, 8}, 2, {{4, 2}}, {{kKernelSize, {3}}});
  const TrainConfig cfg{1, 1, 0.1, 8};
  EXPECT_EQ(TrainAndEval(s, Architecture(1, 1, {0}), ds, cfg, 1, 3), 1.0);
  EXPECT_EQ(KindOf([&] { TrainAndEval(s, Architecture(1, 1, {0}), ds, cfg, 0, 3); }), ErrorKind::kInvalidArgument);
}

TEST(TrainAndEval, TwoBlobTaskAboveNinetyFive) {
  SynthSpec spec;
  spec.num_classes = 2;
  spec.samples_per_class = 60;
  spec.seed = 5;
  const auto ds = SynthDataset(spec);
  const SearchSpace s({3, 8, 8}, 2, {{8, 1}, {8, 2}}, {{kKernelSize, {3}}});
  const TrainConfig cfg{2, 20, 0.05, 16};
  const Architecture a(2, 1, {0, 0});
  const double acc = TrainAndEval(s, a, ds, cfg, 20, 1);
  EXPECT_GT(acc, 0.95);
  EXPECT_EQ(acc, TrainAndEval(s, a, ds, cfg, 20, 1));
}

TEST(TrainConfig, Validation) {
  EXPECT_THROW((TrainConfig{5, 2, 0.1, 4}).Validate(), Error);
  EXPECT_THROW((TrainConfig{1, 2, 0.0, 4}).Validate(), Error);
  const TrainConfig c{3, 7, 0.02, 9};
  const auto back = TrainConfig::FromJson(c.ToJson());
  EXPECT_EQ(back.proxy_epochs, 3);
  EXPECT_EQ(back.full_epochs, 7);
}

TEST(Surrogate, EqualScoresAreFlat) {
  const auto s = testing::ToySpace64();
  auto spec = SurrogateSpec::Generate(s, 1, 0.0);
  for (auto& l : spec.layer_scores) std::fill(l.begin(), l.end(), 0.4);
  for (const auto& a : Enumerate(s, 64)) EXPECT_DOUBLE_EQ(SurrogateEval(s, a, spec), 0.4);
}

TEST(Surrogate, SeparableOptimumIsPerLayerArgmax) {
  const auto s = testing::ToySpace64();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto spec = SurrogateSpec::Generate(s, seed, 0.0);
    std::vector<CandidateTuple> tuples;
    for (int l = 0; l < s.num_layers(); ++l) {
      const auto& w = spec.layer_scores[l];
      const int c = static_cast<int>(std::max_element(w.begin(), w.end()) - w.begin());
      tuples.push_back({c / 2, c % 2});
    }
    const auto constructed = Architecture::FromTuples(tuples);
    Architecture best;
    double best_acc = -1;
    for (const auto& a : Enumerate(s, 64)) {
      const double acc = SurrogateEval(s, a, spec);
      if (acc > best_acc) {
        best_acc = acc;
        best = a;
      }
    }
    EXPECT_EQ(best, constructed);
  }
}

TEST(Surrogate, DeterministicAndInRange) {
  const auto s = testing::Cifar10QuantSpace();
  const auto s1 = SurrogateSpec::Generate(s, 7, 2.0), s2 = SurrogateSpec::Generate(s, 7, 2.0);
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const auto a = Sample(s, rng);
    const double v = SurrogateEval(s, a, s1);
    EXPECT_EQ(v, SurrogateEval(s, a, s2));
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  EXPECT_EQ(FlatCandidateIndex(s, {3, 1, 2}), 23u);
}

}  // namespace
}  // namespace radars
