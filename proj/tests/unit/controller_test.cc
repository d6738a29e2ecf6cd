#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "radars/controller.h"
#include "radars/error.h"
#include "test_support.h"

namespace radars {
namespace {

SearchSpace Bandit() { return SearchSpace({1, 2, 2}, 2, {{1, 1}}, {{kKernelSize, {1, 3}}}); }

double ProbabilityOfChoiceZero(const Policy& p) { return ActionProbs(p)[0][0][0]; }

TEST(Policy, UniformAtInit) {
  const auto s = testing::Cifar10QuantSpace();
  const Policy p(s);
  const auto probs = ActionProbs(p);
  for (int l = 0; l < s.num_layers(); ++l)
    for (int t = 0; t < s.num_types(); ++t) {
      const double d = static_cast<double>(s.hp_types()[t].choices.size());
      for (double v : probs[l][t]) EXPECT_DOUBLE_EQ(v, 1.0 / d);
    }
}

TEST(Predict, SaturatedLogit) {
  const auto s = testing::ToySpace64();
  Policy p(s);
  p.logits[1][0][1] = 20.0;
  Rng rng(1);
  int hits = 0;
  for (int i = 0; i < 2000; ++i) hits += Predict(p, rng).arch.choice(1, 0) == 1;
  EXPECT_GT(hits, 1995);
  EXPECT_GT(ActionProbs(p)[1][0][1], 0.999);
}

TEST(Predict, LogProbIsSumOfLogSoftmax) {
  const auto s = testing::Cifar10QuantSpace();
  Policy p(s);
  Rng rng(2);
  std::normal_distribution<double> n(0, 1);
  for (auto& l : p.logits)
    for (auto& t : l)
      for (auto& v : t) v = n(rng);
  for (int i = 0; i < 20; ++i) {
    const auto pred = Predict(p, rng);
    double expect = 0;
    const auto probs = ActionProbs(p);
    for (int l = 0; l < s.num_layers(); ++l)
      for (int t = 0; t < s.num_types(); ++t) expect += std::log(probs[l][t][pred.arch.choice(l, t)]);
    EXPECT_NEAR(pred.log_prob, expect, 1e-12);
    EXPECT_NEAR(LogProb(p, pred.arch), expect, 1e-12);
  }
}

TEST(ActionProbs, NormalizedAndMonotone) {
  const auto s = testing::Cifar10QuantSpace();
  Policy p(s);
  Rng rng(3);
  std::normal_distribution<double> n(0, 5);
  for (auto& l : p.logits)
    for (auto& t : l)
      for (auto& v : t) v = n(rng);
  const auto probs = ActionProbs(p);
  for (std::size_t l = 0; l < probs.size(); ++l)
    for (std::size_t t = 0; t < probs[l].size(); ++t) {
      double sum = 0;
      for (double v : probs[l][t]) sum += v;
      EXPECT_NEAR(sum, 1.0, 1e-9);
      for (std::size_t a = 0; a < probs[l][t].size(); ++a)
        for (std::size_t b = 0; b < probs[l][t].size(); ++b)
          if (p.logits[l][t][a] > p.logits[l][t][b]) EXPECT_GT(probs[l][t][a], probs[l][t][b]);
    }
}

TEST(UpdatePolicy, BanditConverges) {
  const auto s = Bandit();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Policy p(s);
    Rng rng(seed);
    ControllerConfig cfg;
    for (int step = 0; step < 500; ++step) {
      const auto a = Predict(p, rng).arch;
      UpdatePolicy(p, {{a, a.choice(0, 0) == 0 ? 1.0 : 0.0}}, cfg);
    }
    EXPECT_GT(ProbabilityOfChoiceZero(p), 0.9) << "seed " << seed;
  }
}

TEST(UpdatePolicy, ZeroAdvantageLeavesLogitsExactly) {
  const auto s = testing::ToySpace64();
  Policy p(s);
  p.logits[0][1] = {0.3, -0.7};
  p.baseline = 0.25;
  p.step_count = 4;
  const auto before = p.logits;
  ControllerConfig cfg;
  cfg.entropy_coef = 0.0;
  Rng rng(4);
  RewardBatch batch;
  for (int i = 0; i < 8; ++i) batch.emplace_back(Predict(p, rng).arch, 0.25);
  UpdatePolicy(p, batch, cfg);
  EXPECT_EQ(p.logits, before);
  EXPECT_EQ(p.step_count, 5u);
}

TEST(UpdatePolicy, PositiveAdvantageRaisesChosenLogit) {
  const auto s = testing::ToySpace64();
  Policy p(s);
  p.baseline = 0.0;
  p.step_count = 1;
  ControllerConfig cfg;
  cfg.entropy_coef = 0.0;
  const Architecture a(3, 2, {1, 0, 0, 1, 1, 1});
  UpdatePolicy(p, {{a, 1.0}}, cfg);
  for (int l = 0; l < 3; ++l)
    for (int t = 0; t < 2; ++t) {
      const int chosen = a.choice(l, t);
      EXPECT_GT(p.logits[l][t][chosen], p.logits[l][t][1 - chosen]);
    }
}

TEST(UpdatePolicy, ShiftInvarianceWithBaselineAtBatchMean) {
  const auto s = testing::ToySpace64();
  Rng rng(5);
  RewardBatch batch, shifted;
  double mean = 0;
  for (int i = 0; i < 10; ++i) {
    const auto a = Sample(s, rng);
    const double r = std::uniform_real_distribution<double>(0, 1)(rng);
    batch.emplace_back(a, r);
    shifted.emplace_back(a, r + 3.5);
    mean += r / 10;
  }
  Policy p1(s), p2(s);
  p1.step_count = p2.step_count = 1;
  p1.baseline = mean;
  p2.baseline = mean + 3.5;
  ControllerConfig cfg;
  UpdatePolicy(p1, batch, cfg);
  UpdatePolicy(p2, shifted, cfg);
  for (std::size_t l = 0; l < p1.logits.size(); ++l)
    for (std::size_t t = 0; t < p1.logits[l].size(); ++t)
      for (std::size_t c = 0; c < p1.logits[l][t].size(); ++c)
        EXPECT_NEAR(p1.logits[l][t][c], p2.logits[l][t][c], 1e-12);
}

TEST(UpdatePolicy, FirstUpdateStartsBaselineAtBatchMean) {
  const auto s = Bandit();
  Policy p(s);
  ControllerConfig cfg;
  cfg.entropy_coef = 0.0;
  const Architecture a0(1, 1, {0}), a1(1, 1, {1});
  UpdatePolicy(p, {{a0, 0.2}, {a1, 0.6}}, cfg);
  EXPECT_DOUBLE_EQ(p.baseline, 0.4);
  UpdatePolicy(p, {{a0, 1.4}}, cfg);
  EXPECT_DOUBLE_EQ(p.baseline, 0.9 * 0.4 + 0.1 * 1.4);
}

TEST(UpdatePolicy, Errors) {
  const auto s = Bandit();
  Policy p(s);
  ControllerConfig cfg;
  try {
    UpdatePolicy(p, {{Architecture(1, 1, {0}), std::numeric_limits<double>::quiet_NaN()}}, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNonFiniteReward);
  }
  EXPECT_THROW(UpdatePolicy(p, {}, cfg), Error);
}

TEST(Policy, DeterministicAndCheckpointRoundTrip) {
  const auto s = testing::ToySpace64();
  auto run = [&] {
    Policy p(s);
    Rng rng(9);
    for (int i = 0; i < 20; ++i) {
      RewardBatch b;
      for (int k = 0; k < 5; ++k) {
        auto a = Predict(p, rng).arch;
        b.emplace_back(a, a.choice(0, 0) * 0.5 + a.choice(2, 1) * 0.25);
      }
      UpdatePolicy(p, b, ControllerConfig{});
    }
    return p;
  };
  const auto a = run(), b = run();
  EXPECT_EQ(a.logits, b.logits);
  EXPECT_EQ(a.baseline, b.baseline);
  const auto path = testing::TempPath("policy.json");
  a.Save(path);
  const auto c = Policy::Load(path);
  EXPECT_EQ(c.logits, a.logits);
  EXPECT_EQ(c.baseline, a.baseline);
  EXPECT_EQ(c.step_count, a.step_count);
}

}  // namespace
}  // namespace radars
