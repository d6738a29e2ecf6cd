#ifndef RADARS_REPORT_H_
#define RADARS_REPORT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "radars/evaluator.h"
#include "radars/metrics.h"
#include "radars/pool.h"
#include "radars/space.h"

namespace radars {

/// Shortest decimal text that parses back to the same double.
std::string FormatDouble(double v);
double ParseDouble(const std::string& text);

/// RFC 4180 style table: the first row is the header; fields containing a
/// comma, quote or newline are quoted. Output always ends rows with '\n'.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string ToString() const;
  static CsvTable Parse(const std::string& text);
  void WriteFile(const std::string& path) const;
  static CsvTable ReadFile(const std::string& path);
};

struct RankedArchitecture {
  Architecture arch;
  FomRecord fom;
};

/// Every architecture scored with the surrogate, AOPS and reward, sorted by
/// descending reward (ties to the lexicographically smaller architecture).
/// Throws SpaceTooLarge above `limit`.
std::vector<RankedArchitecture> BruteForceRanking(const SearchSpace& space,
                                                  const SurrogateSpec& surrogate,
                                                  const RewardParams& reward, std::uint64_t limit);

CsvTable RankingTable(const SearchSpace& space, const std::vector<RankedArchitecture>& ranking);
std::vector<RankedArchitecture> ParseRankingTable(const CsvTable& table);

struct ParetoPoint {
  std::string source;
  Architecture arch;
  double aops = 0.0;
  double error = 0.0;
  bool non_dominated = false;
};

/// Marks every point that no other point dominates (<= on both AOPS and
/// error, strictly better on one). Sort-and-sweep, O(n log n).
void MarkParetoFront(std::vector<ParetoPoint>& points);

std::vector<ParetoPoint> ParetoFromPools(const std::vector<std::string>& pool_paths);
CsvTable ParetoTable(const std::vector<ParetoPoint>& points);
std::vector<ParetoPoint> ParseParetoTable(const CsvTable& table);

struct LayerMemoryRow {
  int layer = 0;
  LayerTemplate shape;
  int kernel = 0;
  double weight_count = 0.0;      // NW_l
  double activation_count = 0.0;  // NA_l
  double bytes = 0.0;
};

struct MemoryEstimate {
  std::vector<LayerMemoryRow> layers;
  double full_supernet_bytes = 0.0;
  /// Worst single path (largest kernel everywhere).
  double single_path_bytes = 0.0;
  int p = 0;
  double bound_bytes = 0.0;  // p * single_path_bytes
};

MemoryEstimate EstimateMemory(const SearchSpace& space, const CostModelParams& cost, int p);
std::string FormatMemoryEstimate(const MemoryEstimate& est);
Json MemoryEstimateJson(const MemoryEstimate& est);

}  // namespace radars

#endif  // RADARS_REPORT_H_
