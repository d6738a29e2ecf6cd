#ifndef RADARS_ORCHESTRATOR_H_
#define RADARS_ORCHESTRATOR_H_

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "radars/config.h"
#include "radars/controller.h"
#include "radars/pool.h"

namespace radars {

/// What the search loop needs from training: short proxy training, full
/// training, and a DNAS pass over a pruned subspace. Implementations must be
/// safe to call from two threads at once (pipelined mode).
class SearchBackend {
 public:
  virtual ~SearchBackend() = default;
  virtual double ProxyAccuracy(const Architecture& arch, std::uint64_t seed) const = 0;
  virtual double FullAccuracy(const Architecture& arch, std::uint64_t seed) const = 0;
  /// Builds the SuperNet of `sub`, trains it and returns the derived
  /// architecture (not yet retrained).
  virtual Architecture Exploit(const Subspace& sub, std::uint64_t seed) const = 0;
  /// Held-out accuracy for the final report, when the backend has one.
  virtual std::optional<double> TestAccuracy(const Architecture&, std::uint64_t) const {
    return std::nullopt;
  }
};

/// Surrogate landscape: full accuracy is the exact surrogate score, proxy
/// accuracy adds seeded Gaussian noise, DNAS runs on a SurrogateSupernet.
class SurrogateBackend : public SearchBackend {
 public:
  SurrogateBackend(const SearchSpace& space, SurrogateSpec spec, double proxy_noise, DnasConfig dnas);

  double ProxyAccuracy(const Architecture& arch, std::uint64_t seed) const override;
  double FullAccuracy(const Architecture& arch, std::uint64_t seed) const override;
  Architecture Exploit(const Subspace& sub, std::uint64_t seed) const override;

  const SurrogateSpec& spec() const { return spec_; }

 private:
  SearchSpace space_;
  SurrogateSpec spec_;
  double proxy_noise_;
  DnasConfig dnas_;
};

/// Real training of child networks and SuperNets on a dataset.
class TrainingBackend : public SearchBackend {
 public:
  TrainingBackend(const SearchSpace& space, Dataset ds, TrainConfig train, DnasConfig dnas);

  double ProxyAccuracy(const Architecture& arch, std::uint64_t seed) const override;
  double FullAccuracy(const Architecture& arch, std::uint64_t seed) const override;
  Architecture Exploit(const Subspace& sub, std::uint64_t seed) const override;
  std::optional<double> TestAccuracy(const Architecture& arch, std::uint64_t seed) const override;

  const Dataset& dataset() const { return ds_; }

 private:
  SearchSpace space_;
  Dataset ds_;
  TrainConfig train_;
  DnasConfig dnas_;
};

std::unique_ptr<SearchBackend> MakeBackend(const RadarsConfig& cfg);

struct BestRecord {
  Architecture arch;
  FomRecord fom;
  std::optional<double> test_accuracy;
};

struct PhaseRecord {
  int iteration = 0;
  std::string phase;  // "exploration" | "exploitation"
  double seconds = 0.0;
  double modeled_bytes = 0.0;
};

struct ExploitRecord {
  int iteration = 0;
  std::vector<Architecture> sn;
  Subspace subspace;
  double memory_bytes = 0.0;
  double bound_bytes = 0.0;  // P * max single-path memory of SN
  Architecture derived;
  FomRecord fom;
};

struct RunState {
  ResultPool pool;
  std::optional<BestRecord> best;
  int iteration = 0;
  int episodes = 0;
  std::vector<PhaseRecord> phase_log;
  std::vector<ExploitRecord> exploitations;
  /// Reward of `best` after each exploitation phase.
  std::vector<double> best_history;
  /// SuperNets whose modeled memory broke the budget or the P*M_sp bound.
  int memory_violations = 0;
  double peak_modeled_bytes = 0.0;
};

/// The interleaved exploration/exploitation loop.
class Orchestrator {
 public:
  Orchestrator(RadarsConfig cfg, std::shared_ptr<const SearchBackend> backend);

  /// N controller episodes with proxy training, one controller update, then
  /// full retraining of the top-P pool entries.
  void ExplorationPhase();

  /// Budgeted SN selection from the top-P of `snapshot`, DNAS over its
  /// subspace, retraining of the derived architecture, best update.
  void ExploitationPhase(const std::vector<ResultEntry>& snapshot);

  /// Runs iterations until best.reward >= target or Ep iterations ran.
  /// Throws NoSearchPerformed when Ep = 0.
  const RunState& Run();

  const RunState& state() const { return state_; }
  const Policy& policy() const { return policy_; }
  const RadarsConfig& config() const { return cfg_; }

 private:
  std::uint64_t SeedFor(std::uint64_t tag, std::uint64_t a, std::uint64_t b = 0) const;
  void ConsiderBest(const Architecture& arch, const FomRecord& fom);
  void LogPhase(PhaseRecord rec);
  bool TargetReached() const;

  RadarsConfig cfg_;
  std::shared_ptr<const SearchBackend> backend_;
  RunState state_;
  Policy policy_;
  Rng rng_;
  int explorations_ = 0;
  mutable std::mutex mu_;  // best, logs and counters under pipelined mode
};

/// config.json, pool.jsonl, best.json and phases.csv under `dir`.
void WriteRunArtifacts(const std::string& dir, const RadarsConfig& cfg, const RunState& state);

}  // namespace radars

#endif  // RADARS_ORCHESTRATOR_H_
