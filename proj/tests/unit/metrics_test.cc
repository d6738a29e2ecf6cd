#include <gtest/gtest.h>

#include <random>

#include "radars/error.h"
#include "radars/metrics.h"
#include "test_support.h"

namespace radars {
namespace {

using testing::Cifar10QuantSpace;
using testing::ToySpace64;

LayerTemplate Layer(int ci, int co, int wo, int ho) {
  LayerTemplate t;
  t.in_channels = ci;
  t.out_channels = co;
  t.out_width = wo;
  t.out_height = ho;
  t.in_width = wo;
  t.in_height = ho;
  return t;
}

std::uint64_t CountMacsByLoops(const LayerTemplate& t, int k) {
  std::uint64_t n = 0;
  for (int co = 0; co < t.out_channels; ++co)
    for (int y = 0; y < t.out_height; ++y)
      for (int x = 0; x < t.out_width; ++x)
        for (int ci = 0; ci < t.in_channels; ++ci)
          for (int ky = 0; ky < k; ++ky)
            for (int kx = 0; kx < k; ++kx) ++n;
  return n;
}

std::vector<HyperParamType> TypesWithProduct(std::vector<int> sizes) {
  std::vector<HyperParamType> out;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    HyperParamType t{"t" + std::to_string(i), {}};
    for (int c = 0; c < sizes[i]; ++c) t.choices.push_back(c + 1);
    out.push_back(t);
  }
  return out;
}

TEST(MacCount, Examples) {
  EXPECT_EQ(MacCount(Layer(3, 8, 16, 16), 3), 55296u);
  EXPECT_EQ(MacCount(Layer(1, 1, 1, 1), 1), 1u);
  EXPECT_EQ(MacCount(Layer(64, 64, 16, 16), 3), 9437184u);
}

TEST(MacCount, MatchesLoopOracle) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> ch(1, 12), dim(1, 9), kk(0, 3);
  for (int i = 0; i < 50; ++i) {
    const auto t = Layer(ch(rng), ch(rng), dim(rng), dim(rng));
    const int k = 2 * kk(rng) + 1;
    EXPECT_EQ(MacCount(t, k), CountMacsByLoops(t, k));
  }
}

TEST(Aops, SingleLayerExample) {
  const SearchSpace s({3, 16, 16}, 2, {{8, 1}}, {{kIntBits, {1}}, {kFracBits, {3}}});
  EXPECT_EQ(Aops(s, Architecture(1, 2, {0, 0})), 55296.0 * 25);
}

TEST(Aops, EqualBitsGiveMacsTimesBitsSquared) {
  const auto s = Cifar10QuantSpace();
  Rng rng(4);
  for (int i = 0; i < 10; ++i) {
    auto a = Sample(s, rng);
    std::vector<CandidateTuple> tuples;
    for (int l = 0; l < 6; ++l) tuples.push_back({a.choice(l, 0), 1, 2});
    const auto same = Architecture::FromTuples(tuples);
    double macs = 0;
    for (int l = 0; l < 6; ++l) macs += MacCount(s.layer(l), s.KernelSize(same.tuple(l)));
    EXPECT_EQ(Aops(s, same), macs * 100.0);
  }
}

TEST(Aops, MonotoneInEveryChoice) {
  const SearchSpace s({3, 6, 6}, 2, {{4, 2}},
                      {{kKernelSize, {1, 3, 5}}, {kIntBits, {1, 2, 3}}, {kFracBits, {1, 3, 6}}});
  for (const auto& a : Enumerate(s, 100)) {
    for (int t = 0; t < 3; ++t) {
      auto idx = a.indices();
      if (idx[t] + 1 >= static_cast<int>(s.hp_types()[t].choices.size())) continue;
      ++idx[t];
      EXPECT_GE(Aops(s, Architecture(1, 3, idx)), Aops(s, a));
    }
  }
}

TEST(Reward, ReferenceConstants) {
  const RewardParams p{0.5, 0.0, 1e9, 1.0};
  EXPECT_NEAR(Reward(0.8833, 2.50e9, p), -0.30835, 1e-12);
  EXPECT_DOUBLE_EQ(Reward(0.7, 123456.0, {1.0, 0.0, 1e9, 1.0}), 0.7);
  EXPECT_DOUBLE_EQ(Reward(0.6, 42.0, {0.5, 42.0, 7.0, 1.0}), 0.5 * 0.6 + 0.5);
  const auto fom = MakeFom(0.9, 1e8, p);
  EXPECT_DOUBLE_EQ(fom.reward, Reward(0.9, 1e8, p));
}

TEST(Reward, AffinePartials) {
  const RewardParams p{0.3, 1e6, 5e8, 1.0};
  const double h = 1e-3;
  EXPECT_NEAR((Reward(0.5 + h, 1e8, p) - Reward(0.5 - h, 1e8, p)) / (2 * h), 0.3, 1e-9);
  const double ha = 1e3;
  EXPECT_NEAR((Reward(0.5, 1e8 + ha, p) - Reward(0.5, 1e8 - ha, p)) / (2 * ha), -(1 - 0.3) / 5e8, 1e-15);
}

TEST(Reward, ParamsValidate) {
  EXPECT_THROW((RewardParams{1.5, 0, 1, 1}).Validate(), Error);
  EXPECT_THROW((RewardParams{0.5, 0, 0, 1}).Validate(), Error);
  EXPECT_THROW((CostModelParams{0, 1, 1, 1}).Validate(), Error);
}

TEST(LayerCounts, Examples) {
  EXPECT_EQ(LayerWeightCount(Layer(64, 64, 1, 1), TypesWithProduct({4, 2, 3}), 3), 884736.0);
  EXPECT_EQ(LayerWeightCount(Layer(3, 4, 1, 1), TypesWithProduct({2}), 1), 24.0);
  EXPECT_EQ(LayerWeightCount(Layer(5, 7, 1, 1), {}, 3), 5.0 * 7 * 9);
  EXPECT_EQ(LayerActivationCount(Layer(1, 4, 2, 2), TypesWithProduct({2, 3}), 2), 192.0);
  EXPECT_EQ(LayerActivationCount(Layer(1, 4, 3, 5), {}, 1), 60.0);
  EXPECT_EQ(LayerActivationCount(Layer(3, 64, 32, 32), TypesWithProduct({4, 2, 3}), 256), 402653184.0);
}

TEST(SupernetMemory, FactorizationOverTypes) {
  const CostModelParams p{2, 32, 256, 4};
  const auto full = Cifar10QuantSpace();
  const auto plain = full.WithTypes({{kKernelSize, {7}}});
  EXPECT_EQ(SupernetMemoryFull(full, p), 24 * SupernetMemoryFull(plain, p));
  EXPECT_EQ(SupernetMemoryFull(full, p), 113939288064.0);
  // doubling one D doubles the total
  const auto doubled = full.WithTypes({{kKernelSize, {1, 3, 5, 7}}, {kIntBits, {1, 2, 3, 4}}, {kFracBits, {1, 3, 6}}});
  EXPECT_EQ(SupernetMemoryFull(doubled, p), 2 * SupernetMemoryFull(full, p));
}

TEST(SupernetMemory, SingleCandidateSpaceEqualsPlainNetwork) {
  const CostModelParams p{1, 1, 8, 4};
  const auto s = Cifar10QuantSpace().WithTypes({{kKernelSize, {3}}});
  const Architecture a(6, 1, std::vector<int>(6, 0));
  EXPECT_EQ(SupernetMemoryFull(s, p), SinglePathMemory(s, a, p));
  double direct = 0;
  for (const auto& l : s.layers()) {
    direct += 4.0 * (double(l.in_channels) * l.out_channels * 9 + 8.0 * l.out_channels * l.out_width * l.out_height);
  }
  EXPECT_EQ(SupernetMemoryFull(s, p), direct);
}

TEST(SubspaceMemory, SingletonEqualsSinglePath) {
  const CostModelParams p{2, 2, 32, 4};
  const auto s = Cifar10QuantSpace();
  Rng rng(2);
  for (int i = 0; i < 10; ++i) {
    const auto a = Sample(s, rng);
    EXPECT_EQ(SubspaceMemory(s, SubspaceFrom(s, {a}), p), SinglePathMemory(s, a, p));
  }
}

TEST(SubspaceMemory, FullSubspaceBoundedByFullSupernet) {
  const CostModelParams p{2, 2, 16, 4};
  const SearchSpace s({3, 8, 8}, 2, {{4, 1}, {6, 2}}, {{kKernelSize, {1, 3, 5}}, {kIntBits, {1, 3}}});
  const auto all = SubspaceFrom(s, Enumerate(s, 1000));
  EXPECT_LE(SubspaceMemory(s, all, p), SupernetMemoryFull(s, p));
  // with a single kernel choice the two agree exactly
  const auto k = s.WithTypes({{kKernelSize, {3}}, {kIntBits, {1, 3}}});
  EXPECT_EQ(SubspaceMemory(k, SubspaceFrom(k, Enumerate(k, 1000)), p), SupernetMemoryFull(k, p));
}

TEST(SubspaceMemory, DedupNeverIncreasesMemory) {
  const CostModelParams p{2, 2, 32, 4};
  const auto s = ToySpace64();
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Architecture> archs;
    double sum = 0, worst = 0;
    for (int i = 0; i < 1 + trial % 7; ++i) {
      archs.push_back(Sample(s, rng));
      const double m = SinglePathMemory(s, archs.back(), p);
      sum += m;
      worst = std::max(worst, m);
    }
    const double mem = SubspaceMemory(s, SubspaceFrom(s, archs), p);
    EXPECT_LE(mem, sum);
    EXPECT_LE(mem, archs.size() * worst);
  }
}

}  // namespace
}  // namespace radars
