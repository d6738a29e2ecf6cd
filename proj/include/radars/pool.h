#ifndef RADARS_POOL_H_
#define RADARS_POOL_H_

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "radars/metrics.h"
#include "radars/space.h"

namespace radars {

struct ResultEntry {
  Architecture arch;
  double reward = 0.0;
  double accuracy = 0.0;
  double aops = 0.0;
  bool fully_trained = false;
  int episode_found = 0;

  Json ToJson() const;
  static ResultEntry FromJson(const Json& j);
};

/// Every explored (architecture, reward) pair, one entry per architecture.
///
/// Merge rule on a repeated architecture: a fully-trained result replaces a
/// proxy one; a proxy result never replaces a fully-trained one; otherwise
/// the higher reward is kept. The earliest episode_found is retained.
///
/// Appends are serialized; readers work on Snapshot() copies.
class ResultPool {
 public:
  ResultPool() = default;
  ResultPool(const ResultPool& other);
  ResultPool& operator=(const ResultPool& other);

  void Append(const ResultEntry& entry);
  void Append(const std::vector<ResultEntry>& entries);

  std::vector<ResultEntry> Snapshot() const;
  std::size_t size() const;
  std::optional<ResultEntry> Find(const Architecture& arch) const;

  /// JSON lines, one entry per line, in insertion order.
  void DumpJsonl(const std::string& path) const;
  static std::vector<ResultEntry> LoadJsonl(const std::string& path);

 private:
  void AppendLocked(const ResultEntry& entry);

  mutable std::mutex mu_;
  std::vector<ResultEntry> entries_;
  std::map<Architecture, std::size_t> index_;
};

/// True when `a` ranks ahead of `b`: higher reward, ties to the
/// lexicographically smaller architecture.
bool RanksBefore(const ResultEntry& a, const ResultEntry& b);

/// The P best entries in rank order (all of them when fewer). Throws
/// EmptyPool on an empty input and InvalidArgument for P < 1.
std::vector<ResultEntry> TopP(const std::vector<ResultEntry>& entries, int p);

struct SnSelection {
  Subspace subspace;
  std::vector<Architecture> included;
  /// First candidate that overflowed the budget, if any.
  std::optional<Architecture> rejected;
  double memory_bytes = 0.0;
  /// Largest single-path memory among the included architectures.
  double max_single_path_bytes = 0.0;
};

/// Greedy memory-budgeted SN selection over reward-ordered entries: add the
/// next architecture, rebuild the deduplicated union, and on the first
/// overflow drop it and stop. With `skip_overflow` the overflowing candidate
/// is dropped and the scan continues. Throws BudgetTooSmall when the top
/// entry alone exceeds the budget.
SnSelection SelectSn(const std::vector<ResultEntry>& ordered, const SearchSpace& space,
                     double budget_bytes, const CostModelParams& cost, bool skip_overflow = false);

}  // namespace radars

#endif  // RADARS_POOL_H_
