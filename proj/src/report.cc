#include "radars/report.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "radars/error.h"

namespace radars {
namespace {

bool NeedsQuotes(const std::string& f) {
  return f.find_first_of(",\"\n\r") != std::string::npos;
}

void AppendField(std::string& out, const std::string& f) {
  if (!NeedsQuotes(f)) {
    out += f;
    return;
  }
  out += '"';
  for (char c : f) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

void AppendRow(std::string& out, const std::vector<std::string>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out += ',';
    AppendField(out, row[i]);
  }
  out += '\n';
}

std::size_t Column(const CsvTable& t, const std::string& name) {
  auto it = std::find(t.header.begin(), t.header.end(), name);
  Check(it != t.header.end(), ErrorKind::kIo, "CSV has no column '" + name + "'");
  return static_cast<std::size_t>(it - t.header.begin());
}

std::string HumanBytes(double b) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f GB", b / 1e9);
  return buf;
}

}  // namespace

std::string FormatDouble(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  Check(ec == std::errc(), ErrorKind::kInvalidArgument, "cannot format number");
  return std::string(buf, end);
}

double ParseDouble(const std::string& text) {
  double v = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  Check(ec == std::errc() && end == text.data() + text.size(), ErrorKind::kIo,
        "'" + text + "' is not a number");
  return v;
}

std::string CsvTable::ToString() const {
  std::string out;
  AppendRow(out, header);
  for (const auto& r : rows) AppendRow(out, r);
  return out;
}

CsvTable CsvTable::Parse(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    any = true;
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      row.push_back(std::move(field));
      field.clear();
      records.push_back(std::move(row));
      row.clear();
      any = false;
    } else if (c != '\r') {
      field += c;
    }
  }
  Check(!quoted, ErrorKind::kIo, "CSV ends inside a quoted field");
  if (any) {
    row.push_back(std::move(field));
    records.push_back(std::move(row));
  }
  Check(!records.empty(), ErrorKind::kIo, "CSV is empty");
  CsvTable t;
  t.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    Check(records[r].size() == t.header.size(), ErrorKind::kIo,
          "CSV row " + std::to_string(r + 1) + " has " + std::to_string(records[r].size()) +
              " fields, header has " + std::to_string(t.header.size()));
    t.rows.push_back(std::move(records[r]));
  }
  return t;
}

void CsvTable::WriteFile(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  Check(static_cast<bool>(out), ErrorKind::kIo, "cannot write " + path);
  out << ToString();
}

CsvTable CsvTable::ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  Check(static_cast<bool>(in), ErrorKind::kIo, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return Parse(ss.str());
}

std::vector<RankedArchitecture> BruteForceRanking(const SearchSpace& space,
                                                  const SurrogateSpec& surrogate,
                                                  const RewardParams& reward, std::uint64_t limit) {
  std::vector<RankedArchitecture> out;
  for (auto& a : Enumerate(space, limit)) {
    const double acc = SurrogateEval(space, a, surrogate);
    auto fom = MakeFom(acc, Aops(space, a), reward);
    out.push_back({std::move(a), fom});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    if (x.fom.reward != y.fom.reward) return x.fom.reward > y.fom.reward;
    return x.arch < y.arch;
  });
  return out;
}

CsvTable RankingTable(const SearchSpace& space, const std::vector<RankedArchitecture>& ranking) {
  CsvTable t;
  t.header = {"rank", "arch", "description", "accuracy", "aops", "reward"};
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    const auto& r = ranking[i];
    t.rows.push_back({std::to_string(i + 1), r.arch.ToIndexString(), r.arch.Describe(space),
                      FormatDouble(r.fom.accuracy), FormatDouble(r.fom.aops),
                      FormatDouble(r.fom.reward)});
  }
  return t;
}

std::vector<RankedArchitecture> ParseRankingTable(const CsvTable& table) {
  const auto ca = Column(table, "arch"), cacc = Column(table, "accuracy"),
             cops = Column(table, "aops"), crew = Column(table, "reward");
  std::vector<RankedArchitecture> out;
  for (const auto& r : table.rows) {
    out.push_back({Architecture::Parse(r[ca]),
                   {ParseDouble(r[cacc]), ParseDouble(r[cops]), ParseDouble(r[crew])}});
  }
  return out;
}

void MarkParetoFront(std::vector<ParetoPoint>& points) {
  std::vector<std::size_t> order(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (points[a].aops != points[b].aops) return points[a].aops < points[b].aops;
    return points[a].error < points[b].error;
  });
  double best_before = std::numeric_limits<double>::infinity();  // over strictly smaller AOPS
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && points[order[j]].aops == points[order[i]].aops) ++j;
    const double group_min = points[order[i]].error;
    for (std::size_t k = i; k < j; ++k) {
      auto& p = points[order[k]];
      p.non_dominated = !(best_before <= p.error) && !(group_min < p.error);
    }
    best_before = std::min(best_before, group_min);
    i = j;
  }
}

std::vector<ParetoPoint> ParetoFromPools(const std::vector<std::string>& pool_paths) {
  Check(!pool_paths.empty(), ErrorKind::kInvalidArgument, "no pool dumps given");
  std::vector<ParetoPoint> points;
  for (const auto& path : pool_paths) {
    for (const auto& e : ResultPool::LoadJsonl(path)) {
      points.push_back({path, e.arch, e.aops, 1.0 - e.accuracy, false});
    }
  }
  MarkParetoFront(points);
  return points;
}

CsvTable ParetoTable(const std::vector<ParetoPoint>& points) {
  CsvTable t;
  t.header = {"source", "arch", "aops", "error", "non_dominated"};
  for (const auto& p : points) {
    t.rows.push_back({p.source, p.arch.ToIndexString(), FormatDouble(p.aops), FormatDouble(p.error),
                      p.non_dominated ? "1" : "0"});
  }
  return t;
}

std::vector<ParetoPoint> ParseParetoTable(const CsvTable& table) {
  const auto cs = Column(table, "source"), ca = Column(table, "arch"), cops = Column(table, "aops"),
             cerr = Column(table, "error"), cnd = Column(table, "non_dominated");
  std::vector<ParetoPoint> out;
  for (const auto& r : table.rows) {
    Check(r[cnd] == "0" || r[cnd] == "1", ErrorKind::kIo, "non_dominated must be 0 or 1");
    out.push_back({r[cs], Architecture::Parse(r[ca]), ParseDouble(r[cops]), ParseDouble(r[cerr]),
                   r[cnd] == "1"});
  }
  return out;
}

MemoryEstimate EstimateMemory(const SearchSpace& space, const CostModelParams& cost, int p) {
  Check(p >= 1, ErrorKind::kInvalidArgument, "P must be >= 1");
  cost.Validate();
  MemoryEstimate est;
  const int k = space.MaxKernelSize();
  const std::vector<HyperParamType> single;  // prod over no types = 1
  for (int l = 0; l < space.num_layers(); ++l) {
    LayerMemoryRow row;
    row.layer = l + 1;
    row.shape = space.layer(l);
    row.kernel = k;
    row.weight_count = LayerWeightCount(row.shape, space.hp_types(), k);
    row.activation_count = LayerActivationCount(row.shape, space.hp_types(), cost.batch);
    row.bytes = cost.bytes_per_value * (cost.eta * row.weight_count + cost.theta * row.activation_count);
    est.single_path_bytes += cost.bytes_per_value *
                             (cost.eta * LayerWeightCount(row.shape, single, k) +
                              cost.theta * LayerActivationCount(row.shape, single, cost.batch));
    est.layers.push_back(row);
  }
  est.full_supernet_bytes = SupernetMemoryFull(space, cost);
  est.p = p;
  est.bound_bytes = p * est.single_path_bytes;
  return est;
}

std::string FormatMemoryEstimate(const MemoryEstimate& est) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%5s %6s %6s %3s %5s %5s %16s %16s %14s\n", "layer", "CI", "CO", "K",
                "WO", "HO", "NW", "NA", "bytes");
  out += buf;
  for (const auto& r : est.layers) {
    std::snprintf(buf, sizeof(buf), "%5d %6d %6d %3d %5d %5d %16.0f %16.0f %14s\n", r.layer,
                  r.shape.in_channels, r.shape.out_channels, r.kernel, r.shape.out_width,
                  r.shape.out_height, r.weight_count, r.activation_count, HumanBytes(r.bytes).c_str());
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), "full SuperNet:      %.0f bytes (%s)\n", est.full_supernet_bytes,
                HumanBytes(est.full_supernet_bytes).c_str());
  out += buf;
  std::snprintf(buf, sizeof(buf), "single path:        %.0f bytes (%s)\n", est.single_path_bytes,
                HumanBytes(est.single_path_bytes).c_str());
  out += buf;
  std::snprintf(buf, sizeof(buf), "bound P=%d x M_sp:  %.0f bytes (%s)\n", est.p, est.bound_bytes,
                HumanBytes(est.bound_bytes).c_str());
  out += buf;
  return out;
}

Json MemoryEstimateJson(const MemoryEstimate& est) {
  Json layers = Json::array();
  for (const auto& r : est.layers) {
    layers.push_back({{"layer", r.layer}, {"in_channels", r.shape.in_channels},
                      {"out_channels", r.shape.out_channels}, {"kernel", r.kernel},
                      {"out_width", r.shape.out_width}, {"out_height", r.shape.out_height},
                      {"weight_count", r.weight_count}, {"activation_count", r.activation_count},
                      {"bytes", r.bytes}});
  }
  return {{"layers", layers},
          {"full_supernet_bytes", est.full_supernet_bytes},
          {"single_path_bytes", est.single_path_bytes},
          {"P", est.p},
          {"bound_bytes", est.bound_bytes}};
}

}  // namespace radars
