#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "radars/error.h"
#include "radars/space.h"
#include "test_support.h"

namespace radars {
namespace {

using testing::Cifar10QuantSpace;
using testing::ToySpace64;

SearchSpace OneTypeSpace(int layers, std::vector<int> choices) {
  std::vector<SearchSpace::LayerSpec> specs(layers, {4, 1});
  return SearchSpace({3, 4, 4}, 2, specs, {{kKernelSize, std::move(choices)}});
}

TEST(SpaceSize, TableOneIs24ToTheSixth) {
  EXPECT_EQ(SpaceSize(Cifar10QuantSpace()), 191102976ULL);
  EXPECT_EQ(Cifar10QuantSpace().candidates_per_layer(), 24u);
}

TEST(SpaceSize, Singleton) { EXPECT_EQ(SpaceSize(OneTypeSpace(1, {3})), 1u); }

TEST(SpaceSize, MatchesEnumeration) {
  const auto space = OneTypeSpace(3, {1, 3, 5, 7});
  EXPECT_EQ(SpaceSize(space), 64u);
  EXPECT_EQ(Enumerate(space, 1000).size(), 64u);
  EXPECT_EQ(Enumerate(ToySpace64(), 64).size(), SpaceSize(ToySpace64()));
}

TEST(SearchSpace, ChannelChainAndCeilDims) {
  const auto s = Cifar10QuantSpace();
  const int expect_ci[] = {3, 64, 64, 128, 128, 256};
  const int expect_wo[] = {32, 16, 16, 8, 8, 4};
  for (int l = 0; l < 6; ++l) {
    EXPECT_EQ(s.layer(l).in_channels, expect_ci[l]);
    EXPECT_EQ(s.layer(l).out_width, expect_wo[l]);
    EXPECT_EQ(s.layer(l).out_height, expect_wo[l]);
  }
  const SearchSpace odd({1, 7, 5}, 2, {{2, 2}, {2, 2}}, {{kKernelSize, {1}}});
  EXPECT_EQ(odd.layer(0).out_width, 4);
  EXPECT_EQ(odd.layer(0).out_height, 3);
  EXPECT_EQ(odd.layer(1).out_width, 2);
  EXPECT_EQ(odd.layer(1).out_height, 2);
}

TEST(SearchSpace, RejectsBadChoices) {
  EXPECT_THROW(OneTypeSpace(1, {}), Error);
  EXPECT_THROW(OneTypeSpace(1, {3, 3}), Error);
  EXPECT_THROW(OneTypeSpace(1, {5, 3}), Error);
  EXPECT_THROW(OneTypeSpace(1, {2}), Error);  // even kernel
  EXPECT_THROW(SearchSpace({3, 4, 4}, 2, {}, {{kKernelSize, {1}}}), Error);
}

TEST(SearchSpace, JsonRoundTrip) {
  const auto s = Cifar10QuantSpace();
  const auto back = SearchSpace::FromJson(s.ToJson());
  EXPECT_EQ(back.ToJson(), s.ToJson());
  EXPECT_EQ(SpaceSize(back), SpaceSize(s));
}

TEST(SearchSpace, ShippedTableOneConfig) {
  const auto s = SearchSpace::LoadFile(std::string(RADARS_SOURCE_DIR) + "/configs/cifar10_quant.json");
  EXPECT_EQ(s.ToJson(), Cifar10QuantSpace().ToJson());
}

TEST(SearchSpace, CandidateValues) {
  const auto s = Cifar10QuantSpace();
  const CandidateTuple c{2, 1, 0};
  EXPECT_EQ(s.KernelSize(c), 5);
  EXPECT_EQ(s.IntBits(c), 3);
  EXPECT_EQ(s.FracBits(c), 1);
  EXPECT_EQ(s.BitWidth(c), 5);
  EXPECT_EQ(s.MaxKernelSize(), 7);
  EXPECT_EQ(s.CandidateName(c), "k5/i3/f1");
  // types outside the space fall back to fixed defaults
  const auto k = OneTypeSpace(1, {3});
  EXPECT_EQ(k.IntBits({0}), 3);
  EXPECT_EQ(k.FracBits({0}), 6);
}

TEST(Sample, SingletonAndDeterminism) {
  Rng a(5), b(5), c(1);
  const auto single = OneTypeSpace(2, {3});
  EXPECT_EQ(Sample(single, c), Architecture(2, 1, {0, 0}));
  const auto s = Cifar10QuantSpace();
  for (int i = 0; i < 20; ++i) EXPECT_EQ(Sample(s, a), Sample(s, b));
}

TEST(Sample, UniformWithinFiveSigma) {
  const SearchSpace s({3, 4, 4}, 2, {{4, 1}},
                      {{kKernelSize, {1, 3, 5, 7}}, {kIntBits, {1, 3}}, {kFracBits, {1, 3, 6}}});
  Rng rng(11);
  const int n = 100000;
  std::vector<int> counts(24, 0);
  for (int i = 0; i < n; ++i) {
    const auto a = Sample(s, rng);
    const auto t = a.tuple(0);
    ++counts[(t[0] * 2 + t[1]) * 3 + t[2]];
  }
  const double p = 1.0 / 24, sigma = std::sqrt(n * p * (1 - p));
  for (int c : counts) EXPECT_LT(std::abs(c - n * p), 5 * sigma);
}

TEST(Enumerate, LexicographicOrder) {
  const auto s = OneTypeSpace(2, {1, 3});
  const auto all = Enumerate(s, 10);
  ASSERT_EQ(all.size(), 4u);
  EXPECT_EQ(all[0].indices(), (std::vector<int>{0, 0}));
  EXPECT_EQ(all[1].indices(), (std::vector<int>{0, 1}));
  EXPECT_EQ(all[2].indices(), (std::vector<int>{1, 0}));
  EXPECT_EQ(all[3].indices(), (std::vector<int>{1, 1}));
  EXPECT_TRUE(std::is_sorted(all.begin(), all.end()));
  EXPECT_EQ(Enumerate(OneTypeSpace(1, {3}), 1).size(), 1u);
}

TEST(Enumerate, TableOneTooLarge) {
  try {
    Enumerate(Cifar10QuantSpace(), 1000000);
    FAIL() << "expected SpaceTooLarge";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSpaceTooLarge);
  }
}

TEST(Architecture, TextAndJsonRoundTrip) {
  const Architecture a(3, 2, {0, 1, 1, 0, 1, 1});
  EXPECT_EQ(a.ToIndexString(), "0,1|1,0|1,1");
  EXPECT_EQ(Architecture::Parse(a.ToIndexString()), a);
  EXPECT_EQ(Architecture::FromJson(a.ToJson()), a);
  EXPECT_TRUE(a.IsValidIn(ToySpace64()));
  EXPECT_FALSE(Architecture(3, 2, {0, 2, 0, 0, 0, 0}).IsValidIn(ToySpace64()));
  EXPECT_EQ(a.Describe(ToySpace64()), "k1/i3 | k3/i1 | k3/i3");
  EXPECT_THROW(Architecture::Parse("0,1|1"), Error);
  EXPECT_THROW(Architecture::Parse("0,x"), Error);
}

TEST(SubspaceFrom, FigureTwoDedup) {
  // Layer 3 receives {Op4, Op5, Op5}: only two distinct candidates survive.
  const auto s = OneTypeSpace(3, {1, 3, 5, 7, 9, 11});
  const std::vector<Architecture> archs = {Architecture(3, 1, {0, 1, 3}), Architecture(3, 1, {1, 2, 4}),
                                           Architecture(3, 1, {2, 0, 4})};
  const auto sub = SubspaceFrom(s, archs);
  EXPECT_EQ(sub.layer(2).size(), 2u);
  EXPECT_EQ(sub.layer(0).size(), 3u);
  EXPECT_EQ(sub.total_candidates(), 8u);
  for (const auto& a : archs) EXPECT_TRUE(sub.Contains(a));
}

TEST(SubspaceFrom, SingletonRoundTrip) {
  Rng rng(3);
  const auto s = Cifar10QuantSpace();
  for (int i = 0; i < 20; ++i) {
    const auto a = Sample(s, rng);
    const auto sub = SubspaceFrom(s, {a});
    std::vector<CandidateTuple> picked;
    for (int l = 0; l < sub.num_layers(); ++l) {
      ASSERT_EQ(sub.layer(l).size(), 1u);
      picked.push_back(sub.layer(l)[0]);
    }
    EXPECT_EQ(Architecture::FromTuples(picked), a);
    EXPECT_EQ(sub.num_paths(), 1.0);
  }
}

TEST(SubspaceFrom, FullEnumerationUnion) {
  const SearchSpace s({3, 4, 4}, 2, {{4, 1}, {4, 1}}, {{kKernelSize, {1, 3}}});
  const auto sub = SubspaceFrom(s, Enumerate(s, 10));
  EXPECT_EQ(sub.layer(0).size(), 2u);
  EXPECT_EQ(sub.layer(1).size(), 2u);
  EXPECT_THROW(SubspaceFrom(s, {}), Error);
}

TEST(SubspaceFrom, MonotoneInArchitectureSet) {
  const auto s = ToySpace64();
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Architecture> b;
    for (int i = 0; i < 6; ++i) b.push_back(Sample(s, rng));
    std::vector<Architecture> a(b.begin(), b.begin() + 1 + trial % 5);
    const auto sa = SubspaceFrom(s, a), sb = SubspaceFrom(s, b);
    for (int l = 0; l < s.num_layers(); ++l) {
      for (const auto& c : sa.layer(l)) EXPECT_GE(sb.IndexOf(l, c), 0);
      EXPECT_LE(sa.layer(l).size(), std::min<std::size_t>(a.size(), s.candidates_per_layer()));
    }
  }
}

}  // namespace
}  // namespace radars
