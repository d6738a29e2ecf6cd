#include "radars/orchestrator.h"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <random>

#include "radars/error.h"
#include "radars/report.h"

namespace radars {
namespace {

std::uint64_t Mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t ArchKey(const Architecture& arch) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : arch.ToIndexString()) h = (h ^ static_cast<unsigned char>(c)) * 0x100000001b3ULL;
  return h;
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

constexpr std::uint64_t kTagProxy = 1;
constexpr std::uint64_t kTagFull = 2;
constexpr std::uint64_t kTagExploit = 3;
constexpr std::uint64_t kTagTest = 4;
constexpr std::uint64_t kTagPolicy = 5;

}  // namespace

SurrogateBackend::SurrogateBackend(const SearchSpace& space, SurrogateSpec spec, double proxy_noise,
                                   DnasConfig dnas)
    : space_(space), spec_(std::move(spec)), proxy_noise_(proxy_noise), dnas_(dnas) {
  Check(proxy_noise >= 0, ErrorKind::kInvalidArgument, "proxy_noise must be >= 0");
}

double SurrogateBackend::ProxyAccuracy(const Architecture& arch, std::uint64_t seed) const {
  const double exact = SurrogateEval(space_, arch, spec_);
  if (proxy_noise_ == 0) return exact;
  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, proxy_noise_);
  return std::clamp(exact + noise(rng), 0.0, 1.0);
}

double SurrogateBackend::FullAccuracy(const Architecture& arch, std::uint64_t) const {
  return SurrogateEval(space_, arch, spec_);
}

Architecture SurrogateBackend::Exploit(const Subspace& sub, std::uint64_t) const {
  SurrogateSupernet sn(space_, sub, spec_);
  sn.Train(dnas_);
  return sn.DeriveBest();
}

TrainingBackend::TrainingBackend(const SearchSpace& space, Dataset ds, TrainConfig train, DnasConfig dnas)
    : space_(space), ds_(std::move(ds)), train_(train), dnas_(dnas) {
  ds_.Validate();
  train_.Validate();
  dnas_.Validate();
}

double TrainingBackend::ProxyAccuracy(const Architecture& arch, std::uint64_t seed) const {
  return TrainAndEval(space_, arch, ds_, train_, train_.proxy_epochs, seed);
}

double TrainingBackend::FullAccuracy(const Architecture& arch, std::uint64_t seed) const {
  return TrainAndEval(space_, arch, ds_, train_, train_.full_epochs, seed);
}

Architecture TrainingBackend::Exploit(const Subspace& sub, std::uint64_t seed) const {
  SuperNet sn = BuildSupernet(space_, sub, seed);
  AlternateTrain(sn, ds_, dnas_, seed + 1);
  return DeriveBest(sn);
}

std::optional<double> TrainingBackend::TestAccuracy(const Architecture& arch, std::uint64_t seed) const {
  if (ds_.test.empty()) return std::nullopt;
  auto net = nn::BuildChildNetwork(space_, arch, seed);
  Rng rng(seed ^ 0x5bd1e995ULL);
  TrainNetwork(net, ds_, train_, train_.full_epochs, rng);
  return EvaluateAccuracy(net, ds_, ds_.test);
}

std::unique_ptr<SearchBackend> MakeBackend(const RadarsConfig& cfg) {
  const auto& e = cfg.evaluator;
  if (e.kind == EvaluatorConfig::Kind::kSurrogate) {
    return std::make_unique<SurrogateBackend>(
        cfg.space, SurrogateSpec::Generate(cfg.space, e.surrogate_seed, e.interaction), e.proxy_noise,
        cfg.dnas);
  }
  Dataset ds = e.dataset.Load();
  Check(ds.images.dim(1) == cfg.space.layer(0).in_channels, ErrorKind::kConfig,
        "dataset channels do not match the space input");
  Check(ds.num_classes == cfg.space.num_classes(), ErrorKind::kConfig,
        "dataset classes do not match the space");
  return std::make_unique<TrainingBackend>(cfg.space, std::move(ds), cfg.train, cfg.dnas);
}

Orchestrator::Orchestrator(RadarsConfig cfg, std::shared_ptr<const SearchBackend> backend)
    : cfg_(std::move(cfg)), backend_(std::move(backend)), policy_(cfg_.space), rng_(0) {
  Check(backend_ != nullptr, ErrorKind::kInvalidArgument, "no search backend");
  cfg_.Validate();
  rng_.seed(Mix(cfg_.seed ^ Mix(kTagPolicy)));
}

std::uint64_t Orchestrator::SeedFor(std::uint64_t tag, std::uint64_t a, std::uint64_t b) const {
  return Mix(cfg_.seed ^ Mix(tag ^ Mix(a ^ Mix(b))));
}

void Orchestrator::ConsiderBest(const Architecture& arch, const FomRecord& fom) {
  std::lock_guard lock(mu_);
  if (!state_.best || fom.reward > state_.best->fom.reward ||
      (fom.reward == state_.best->fom.reward && arch < state_.best->arch)) {
    state_.best = BestRecord{arch, fom, std::nullopt};
  }
}

void Orchestrator::LogPhase(PhaseRecord rec) {
  std::lock_guard lock(mu_);
  state_.phase_log.push_back(std::move(rec));
}

bool Orchestrator::TargetReached() const {
  std::lock_guard lock(mu_);
  return state_.best && state_.best->fom.reward >= cfg_.reward.target;
}

void Orchestrator::ExplorationPhase() {
  const auto start = std::chrono::steady_clock::now();
  const int phase = ++explorations_;
  const int n = cfg_.episodes_per_phase;
  int base_episode;
  {
    std::lock_guard lock(mu_);
    base_episode = state_.episodes;
  }

  RewardBatch batch;
  double max_path = 0.0;
  for (int i = 0; i < n; ++i) {
    const int episode = base_episode + i + 1;
    auto pred = Predict(policy_, rng_);
    const double acc = backend_->ProxyAccuracy(pred.arch, SeedFor(kTagProxy, episode));
    const auto fom = MakeFom(acc, Aops(cfg_.space, pred.arch), cfg_.reward);
    state_.pool.Append(ResultEntry{pred.arch, fom.reward, fom.accuracy, fom.aops, false, episode});
    max_path = std::max(max_path, SinglePathMemory(cfg_.space, pred.arch, cfg_.cost));
    batch.emplace_back(std::move(pred.arch), fom.reward);
  }
  UpdatePolicy(policy_, batch, cfg_.controller);

  for (const auto& e : TopP(state_.pool.Snapshot(), cfg_.retrain_count)) {
    if (e.fully_trained) {
      ConsiderBest(e.arch, {e.accuracy, e.aops, e.reward});
      continue;
    }
    const double acc = backend_->FullAccuracy(e.arch, SeedFor(kTagFull, ArchKey(e.arch)));
    const auto fom = MakeFom(acc, e.aops, cfg_.reward);
    state_.pool.Append(ResultEntry{e.arch, fom.reward, fom.accuracy, fom.aops, true, e.episode_found});
    ConsiderBest(e.arch, fom);
  }

  {
    std::lock_guard lock(mu_);
    state_.episodes += n;
  }
  LogPhase({phase, "exploration", Seconds(start), max_path});
}

void Orchestrator::ExploitationPhase(const std::vector<ResultEntry>& snapshot) {
  const auto start = std::chrono::steady_clock::now();
  int iteration;
  {
    std::lock_guard lock(mu_);
    iteration = ++state_.iteration;
  }
  const auto top = TopP(snapshot, cfg_.retrain_count);
  auto sel = SelectSn(top, cfg_.space, cfg_.memory_budget, cfg_.cost, cfg_.skip_overflow);
  const double bound = cfg_.retrain_count * sel.max_single_path_bytes;

  Architecture derived = backend_->Exploit(sel.subspace, SeedFor(kTagExploit, iteration));
  FomRecord fom;
  const auto known = state_.pool.Find(derived);
  if (known && known->fully_trained) {
    fom = {known->accuracy, known->aops, known->reward};
  } else {
    const double acc = backend_->FullAccuracy(derived, SeedFor(kTagFull, ArchKey(derived)));
    fom = MakeFom(acc, Aops(cfg_.space, derived), cfg_.reward);
  }
  ConsiderBest(derived, fom);

  std::lock_guard lock(mu_);
  if (sel.memory_bytes > cfg_.memory_budget || sel.memory_bytes > bound) ++state_.memory_violations;
  state_.peak_modeled_bytes = std::max(state_.peak_modeled_bytes, sel.memory_bytes);
  state_.best_history.push_back(state_.best->fom.reward);
  state_.exploitations.push_back(
      ExploitRecord{iteration, sel.included, sel.subspace, sel.memory_bytes, bound, derived, fom});
  state_.phase_log.push_back({iteration, "exploitation", Seconds(start), sel.memory_bytes});
}

const RunState& Orchestrator::Run() {
  if (cfg_.max_iterations == 0) Fail(ErrorKind::kNoSearchPerformed, "Ep = 0: no iteration would run");
  if (!cfg_.pipelined) {
    while (state_.iteration < cfg_.max_iterations) {
      ExplorationPhase();
      ExploitationPhase(state_.pool.Snapshot());
      if (TargetReached()) break;
    }
  } else {
    ExplorationPhase();
    while (true) {
      const auto snapshot = state_.pool.Snapshot();
      const bool more = state_.iteration + 1 < cfg_.max_iterations;
      std::future<void> next;
      if (more) next = std::async(std::launch::async, [this] { ExplorationPhase(); });
      std::exception_ptr failure;
      try {
        ExploitationPhase(snapshot);
      } catch (...) {
        failure = std::current_exception();
      }
      if (next.valid()) next.get();
      if (failure) std::rethrow_exception(failure);
      if (!more || TargetReached()) break;
    }
  }
  if (state_.best) {
    state_.best->test_accuracy = backend_->TestAccuracy(state_.best->arch, SeedFor(kTagTest, 0));
  }
  return state_;
}

void WriteRunArtifacts(const std::string& dir, const RadarsConfig& cfg, const RunState& state) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  Check(!ec, ErrorKind::kIo, "cannot create " + dir + ": " + ec.message());
  const fs::path base(dir);
  {
    std::ofstream out(base / "config.json");
    Check(static_cast<bool>(out), ErrorKind::kIo, "cannot write config.json in " + dir);
    out << cfg.ToJson().dump(2) << "\n";
  }
  state.pool.DumpJsonl((base / "pool.jsonl").string());
  {
    Json best = Json::object();
    if (state.best) {
      const auto& b = *state.best;
      best = {{"arch", b.arch.ToJson()},
              {"arch_index", b.arch.ToIndexString()},
              {"description", b.arch.Describe(cfg.space)},
              {"accuracy", b.fom.accuracy},
              {"aops", b.fom.aops},
              {"reward", b.fom.reward}};
      if (b.test_accuracy) best["test_accuracy"] = *b.test_accuracy;
    }
    best["iterations"] = state.iteration;
    best["episodes"] = state.episodes;
    best["peak_modeled_bytes"] = state.peak_modeled_bytes;
    best["memory_violations"] = state.memory_violations;
    std::ofstream out(base / "best.json");
    Check(static_cast<bool>(out), ErrorKind::kIo, "cannot write best.json in " + dir);
    out << best.dump(2) << "\n";
  }
  CsvTable phases;
  phases.header = {"iteration", "phase", "seconds", "modeled_bytes"};
  for (const auto& p : state.phase_log) {
    phases.rows.push_back(
        {std::to_string(p.iteration), p.phase, FormatDouble(p.seconds), FormatDouble(p.modeled_bytes)});
  }
  phases.WriteFile((base / "phases.csv").string());
}

}  // namespace radars
