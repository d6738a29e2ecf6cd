#include <gtest/gtest.h>

#include <limits>
#include <set>
#include <thread>

#include "radars/error.h"
#include "radars/metrics.h"
#include "radars/pool.h"
#include "test_support.h"

namespace radars {
namespace {

using testing::ToySpace64;

Architecture Arch(int a, int b, int c) {
  // flat candidate index per layer of the toy space
  return Architecture(3, 2, {a / 2, a % 2, b / 2, b % 2, c / 2, c % 2});
}

ResultEntry Entry(const Architecture& a, double reward, bool full = false, int episode = 1) {
  return ResultEntry{a, reward, reward, 1000.0, full, episode};
}

TEST(ResultPool, MaxRewardKept) {
  ResultPool pool;
  pool.Append(Entry(Arch(0, 0, 0), 0.3));
  pool.Append(Entry(Arch(0, 0, 0), 0.5, false, 2));
  ASSERT_EQ(pool.size(), 1u);
  EXPECT_EQ(pool.Snapshot()[0].reward, 0.5);
  EXPECT_EQ(pool.Snapshot()[0].episode_found, 1);
  pool.Append(Entry(Arch(0, 0, 0), 0.4));
  EXPECT_EQ(pool.Snapshot()[0].reward, 0.5);
}

TEST(ResultPool, FullyTrainedWins) {
  ResultPool pool;
  pool.Append(Entry(Arch(1, 0, 0), 0.7));
  pool.Append(Entry(Arch(1, 0, 0), 0.6, true));
  EXPECT_TRUE(pool.Snapshot()[0].fully_trained);
  EXPECT_EQ(pool.Snapshot()[0].reward, 0.6);
  pool.Append(Entry(Arch(1, 0, 0), 0.9));  // proxy never overrides a full result
  EXPECT_EQ(pool.Snapshot()[0].reward, 0.6);
  pool.Append(Entry(Arch(2, 0, 0), 0.5));
  pool.Append(Entry(Arch(2, 0, 0), 0.5, true));
  EXPECT_TRUE(pool.Find(Arch(2, 0, 0))->fully_trained);
}

TEST(ResultPool, BatchIntoEmptyPool) {
  ResultPool pool;
  pool.Append({Entry(Arch(0, 1, 2), 0.1), Entry(Arch(3, 2, 1), 0.2), Entry(Arch(1, 1, 1), 0.3)});
  EXPECT_EQ(pool.size(), 3u);
}

TEST(ResultPool, DedupMatchesSetUnion) {
  const auto s = ToySpace64();
  Rng rng(3);
  ResultPool pool;
  std::set<Architecture> seen;
  for (int phase = 0; phase < 5; ++phase) {
    for (int i = 0; i < 10; ++i) {
      const auto a = Sample(s, rng);
      seen.insert(a);
      pool.Append(Entry(a, 0.1 * i));
    }
    EXPECT_EQ(pool.size(), seen.size());
  }
}

TEST(ResultPool, ConcurrentAppendsAndJsonl) {
  ResultPool pool;
  std::vector<std::thread> workers;
  for (int w = 0; w < 4; ++w) {
    workers.emplace_back([&pool, w] {
      for (int i = 0; i < 16; ++i) pool.Append(Entry(Arch(i / 4, i % 4, w), 0.01 * i));
    });
  }
  for (auto& t : workers) t.join();
  EXPECT_EQ(pool.size(), 64u);
  const auto path = testing::TempPath("pool.jsonl");
  pool.DumpJsonl(path);
  const auto back = ResultPool::LoadJsonl(path);
  ASSERT_EQ(back.size(), 64u);
  ResultPool copy;
  copy.Append(back);
  const auto path2 = testing::TempPath("pool2.jsonl");
  copy.DumpJsonl(path2);
  EXPECT_EQ(testing::ReadText(path), testing::ReadText(path2));
}

TEST(TopP, Examples) {
  std::vector<ResultEntry> three = {Entry(Arch(0, 0, 0), 0.1), Entry(Arch(0, 0, 1), 0.9),
                                    Entry(Arch(0, 0, 2), 0.5)};
  EXPECT_EQ(TopP(three, 6).size(), 3u);
  const auto two = TopP(three, 2);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0].reward, 0.9);
  EXPECT_EQ(two[1].reward, 0.5);

  std::vector<ResultEntry> tie = {Entry(Arch(2, 0, 0), 0.4), Entry(Arch(1, 3, 0), 0.4)};
  EXPECT_EQ(TopP(tie, 1)[0].arch, Arch(1, 3, 0));
  std::swap(tie[0], tie[1]);
  EXPECT_EQ(TopP(tie, 1)[0].arch, Arch(1, 3, 0));

  try {
    TopP({}, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kEmptyPool);
  }
  EXPECT_THROW(TopP(three, 0), Error);
}

class SelectSnTest : public ::testing::Test {
 protected:
  SearchSpace space_ = ToySpace64();
  CostModelParams cost_{2, 2, 32, 4};
};

TEST_F(SelectSnTest, ExactFitKeepsOnlyTop) {
  const std::vector<ResultEntry> ordered = {Entry(Arch(0, 0, 0), 0.9), Entry(Arch(1, 1, 1), 0.8),
                                            Entry(Arch(2, 2, 2), 0.7)};
  const double budget = SinglePathMemory(space_, ordered[0].arch, cost_);
  const auto sel = SelectSn(ordered, space_, budget, cost_);
  ASSERT_EQ(sel.included.size(), 1u);
  EXPECT_EQ(sel.included[0], ordered[0].arch);
  ASSERT_TRUE(sel.rejected.has_value());
  EXPECT_EQ(*sel.rejected, ordered[1].arch);
  EXPECT_EQ(sel.memory_bytes, budget);
}

TEST_F(SelectSnTest, InfiniteBudgetTakesAll) {
  std::vector<ResultEntry> ordered;
  for (int i = 0; i < 6; ++i) ordered.push_back(Entry(Arch(i % 4, (i + 1) % 4, (i * 3) % 4), 1.0 - 0.1 * i));
  const auto sel = SelectSn(ordered, space_, std::numeric_limits<double>::infinity(), cost_);
  EXPECT_EQ(sel.included.size(), 6u);
  EXPECT_FALSE(sel.rejected.has_value());
}

TEST_F(SelectSnTest, BudgetTooSmall) {
  const std::vector<ResultEntry> ordered = {Entry(Arch(3, 3, 3), 0.9)};
  try {
    SelectSn(ordered, space_, SinglePathMemory(space_, ordered[0].arch, cost_) - 1, cost_);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kBudgetTooSmall);
  }
}

TEST_F(SelectSnTest, HandSimulatedGreedyTrace) {
  // Six distinct architectures; the budget admits the first three.
  std::vector<ResultEntry> ordered;
  const int codes[6][3] = {{0, 0, 0}, {1, 1, 1}, {2, 2, 2}, {3, 3, 3}, {0, 1, 2}, {1, 2, 3}};
  for (int i = 0; i < 6; ++i) ordered.push_back(Entry(Arch(codes[i][0], codes[i][1], codes[i][2]), 1.0 - 0.1 * i));
  std::vector<Architecture> first3 = {ordered[0].arch, ordered[1].arch, ordered[2].arch};
  std::vector<Architecture> first4 = first3;
  first4.push_back(ordered[3].arch);
  const double m3 = SubspaceMemory(space_, SubspaceFrom(space_, first3), cost_);
  const double m4 = SubspaceMemory(space_, SubspaceFrom(space_, first4), cost_);
  ASSERT_LT(m3, m4);
  const double budget = (m3 + m4) / 2;
  const auto sel = SelectSn(ordered, space_, budget, cost_);
  EXPECT_EQ(sel.included, first3);
  EXPECT_EQ(*sel.rejected, ordered[3].arch);
  EXPECT_EQ(sel.memory_bytes, m3);
  EXPECT_LE(sel.memory_bytes, budget);
  EXPECT_LE(sel.memory_bytes, 3 * sel.max_single_path_bytes);
  // the fifth entry reuses existing candidates only in layers 0..1, so the
  // skip variant may admit later entries that Break semantics never reach
  const auto skip = SelectSn(ordered, space_, budget, cost_, true);
  EXPECT_GE(skip.included.size(), 3u);
  EXPECT_LE(skip.memory_bytes, budget);
}

TEST_F(SelectSnTest, PrefixPropertyAndBound) {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    ResultPool pool;
    for (int i = 0; i < 12; ++i) pool.Append(Entry(Sample(space_, rng), std::uniform_real_distribution<double>()(rng)));
    const auto top = TopP(pool.Snapshot(), 6);
    const double top1 = SinglePathMemory(space_, top[0].arch, cost_);
    const double budget = top1 * std::uniform_real_distribution<double>(1.0, 6.0)(rng);
    const auto sel = SelectSn(top, space_, budget, cost_);
    EXPECT_LE(sel.memory_bytes, budget);
    EXPECT_LE(sel.memory_bytes, 6 * sel.max_single_path_bytes);
    for (std::size_t i = 0; i < sel.included.size(); ++i) EXPECT_EQ(sel.included[i], top[i].arch);
    const auto again = SelectSn(top, space_, budget, cost_);
    EXPECT_EQ(again.included, sel.included);
  }
}

TEST_F(SelectSnTest, RejectsUnorderedInput) {
  const std::vector<ResultEntry> bad = {Entry(Arch(0, 0, 0), 0.1), Entry(Arch(1, 1, 1), 0.9)};
  EXPECT_THROW(SelectSn(bad, space_, 1e12, cost_), Error);
}

}  // namespace
}  // namespace radars
