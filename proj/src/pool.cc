#include "radars/pool.h"

#include <algorithm>
#include <fstream>

#include "radars/error.h"

namespace radars {

Json ResultEntry::ToJson() const {
  return {{"arch", arch.ToJson()},     {"reward", reward},
          {"accuracy", accuracy},      {"aops", aops},
          {"fully_trained", fully_trained}, {"episode_found", episode_found}};
}

ResultEntry ResultEntry::FromJson(const Json& j) {
  ResultEntry e;
  e.arch = Architecture::FromJson(j.at("arch"));
  e.reward = j.at("reward").get<double>();
  e.accuracy = j.at("accuracy").get<double>();
  e.aops = j.at("aops").get<double>();
  e.fully_trained = j.value("fully_trained", false);
  e.episode_found = j.value("episode_found", 0);
  return e;
}

ResultPool::ResultPool(const ResultPool& other) {
  std::lock_guard lock(other.mu_);
  entries_ = other.entries_;
  index_ = other.index_;
}

ResultPool& ResultPool::operator=(const ResultPool& other) {
  if (this != &other) {
    std::scoped_lock lock(mu_, other.mu_);
    entries_ = other.entries_;
    index_ = other.index_;
  }
  return *this;
}

void ResultPool::AppendLocked(const ResultEntry& entry) {
  auto it = index_.find(entry.arch);
  if (it == index_.end()) {
    index_.emplace(entry.arch, entries_.size());
    entries_.push_back(entry);
    return;
  }
  ResultEntry& cur = entries_[it->second];
  bool replace;
  if (entry.fully_trained != cur.fully_trained) {
    replace = entry.fully_trained;
  } else if (entry.fully_trained) {
    // A later full-training result is the more precise one.
    replace = true;
  } else {
    replace = entry.reward > cur.reward;
  }
  if (replace) {
    const int first_seen = std::min(cur.episode_found, entry.episode_found);
    cur = entry;
    cur.episode_found = first_seen;
  }
}

void ResultPool::Append(const ResultEntry& entry) {
  std::lock_guard lock(mu_);
  AppendLocked(entry);
}

void ResultPool::Append(const std::vector<ResultEntry>& entries) {
  std::lock_guard lock(mu_);
  for (const auto& e : entries) AppendLocked(e);
}

std::vector<ResultEntry> ResultPool::Snapshot() const {
  std::lock_guard lock(mu_);
  return entries_;
}

std::size_t ResultPool::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

std::optional<ResultEntry> ResultPool::Find(const Architecture& arch) const {
  std::lock_guard lock(mu_);
  auto it = index_.find(arch);
  if (it == index_.end()) return std::nullopt;
  return entries_[it->second];
}

void ResultPool::DumpJsonl(const std::string& path) const {
  std::ofstream out(path);
  Check(static_cast<bool>(out), ErrorKind::kIo, "cannot write " + path);
  for (const auto& e : Snapshot()) out << e.ToJson().dump() << '\n';
}

std::vector<ResultEntry> ResultPool::LoadJsonl(const std::string& path) {
  std::ifstream in(path);
  Check(static_cast<bool>(in), ErrorKind::kIo, "cannot open " + path);
  std::vector<ResultEntry> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(ResultEntry::FromJson(Json::parse(line)));
    } catch (const Json::exception& e) {
      Fail(ErrorKind::kIo, path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

bool RanksBefore(const ResultEntry& a, const ResultEntry& b) {
  if (a.reward != b.reward) return a.reward > b.reward;
  return a.arch < b.arch;
}

std::vector<ResultEntry> TopP(const std::vector<ResultEntry>& entries, int p) {
  Check(p >= 1, ErrorKind::kInvalidArgument, "P must be >= 1");
  Check(!entries.empty(), ErrorKind::kEmptyPool, "result pool is empty");
  std::vector<ResultEntry> sorted = entries;
  const auto n = std::min<std::size_t>(static_cast<std::size_t>(p), sorted.size());
  std::partial_sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n), sorted.end(),
                    RanksBefore);
  sorted.resize(n);
  return sorted;
}

SnSelection SelectSn(const std::vector<ResultEntry>& ordered, const SearchSpace& space,
                     double budget_bytes, const CostModelParams& cost, bool skip_overflow) {
  Check(!ordered.empty(), ErrorKind::kEmptyPool, "no candidates to build SN from");
  for (std::size_t i = 1; i < ordered.size(); ++i) {
    Check(ordered[i - 1].reward >= ordered[i].reward, ErrorKind::kInvalidArgument,
          "SN candidates must be in descending reward order");
  }
  const double top = SinglePathMemory(space, ordered.front().arch, cost);
  Check(top <= budget_bytes, ErrorKind::kBudgetTooSmall,
        "top architecture needs " + std::to_string(top) + " bytes, budget is " +
            std::to_string(budget_bytes));

  SnSelection sel;
  for (const auto& e : ordered) {
    sel.included.push_back(e.arch);
    auto sub = SubspaceFrom(space, sel.included);
    const double mem = SubspaceMemory(space, sub, cost);
    if (mem > budget_bytes) {
      sel.included.pop_back();
      if (!sel.rejected) sel.rejected = e.arch;
      if (!skip_overflow) break;
      continue;
    }
    sel.subspace = std::move(sub);
    sel.memory_bytes = mem;
    sel.max_single_path_bytes =
        std::max(sel.max_single_path_bytes, SinglePathMemory(space, e.arch, cost));
  }
  return sel;
}

}  // namespace radars
