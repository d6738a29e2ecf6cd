#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "radars/config.h"
#include "radars/error.h"
#include "radars/orchestrator.h"
#include "radars/report.h"

namespace {

using radars::ErrorKind;

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
      return 2;
    case ErrorKind::kBudgetTooSmall:
      return 3;
    case ErrorKind::kSpaceTooLarge:
      return 4;
    default:
      return 1;
  }
}

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::string out_dir;
};

void Emit(const std::string& text, const std::string& out_dir, const std::string& file) {
  if (out_dir.empty()) {
    std::cout << text;
    return;
  }
  std::filesystem::create_directories(out_dir);
  const auto path = (std::filesystem::path(out_dir) / file).string();
  std::ofstream out(path, std::ios::binary);
  radars::Check(static_cast<bool>(out), ErrorKind::kIo, "cannot write " + path);
  out << text;
  std::cerr << "wrote " << path << "\n";
}

radars::RadarsConfig LoadConfig(const std::string& path, const GlobalOptions& g) {
  auto cfg = radars::RadarsConfig::LoadFile(path);
  if (g.seed) cfg.seed = *g.seed;
  return cfg;
}

void PrintReport(const radars::RadarsConfig& cfg, const radars::RunState& state) {
  std::map<std::string, double> seconds;
  for (const auto& p : state.phase_log) seconds[p.phase] += p.seconds;
  std::printf("iterations          %d\n", state.iteration);
  std::printf("episodes            %d\n", state.episodes);
  std::printf("pool size           %zu\n", state.pool.size());
  if (state.best) {
    const auto& b = *state.best;
    std::printf("best                %s\n", b.arch.Describe(cfg.space).c_str());
    std::printf("best (index)        %s\n", b.arch.ToIndexString().c_str());
    std::printf("top-1 (val)         %.4f\n", b.fom.accuracy);
    if (b.test_accuracy) std::printf("top-1 (test)        %.4f\n", *b.test_accuracy);
    std::printf("AOPS                %.6g\n", b.fom.aops);
    std::printf("reward              %.6f\n", b.fom.reward);
  }
  std::printf("exploration time    %.2f s\n", seconds["exploration"]);
  std::printf("exploitation time   %.2f s\n", seconds["exploitation"]);
  std::printf("peak modeled memory %.0f bytes (%.3f GB)\n", state.peak_modeled_bytes,
              state.peak_modeled_bytes / 1e9);
  std::printf("memory violations   %d\n", state.memory_violations);
}

int CmdSearch(const std::string& config_path, bool pipelined, const GlobalOptions& g) {
  auto cfg = LoadConfig(config_path, g);
  if (pipelined) cfg.pipelined = true;
  std::shared_ptr<const radars::SearchBackend> backend = radars::MakeBackend(cfg);
  radars::Orchestrator orch(cfg, backend);
  const auto& state = orch.Run();
  const std::string dir = g.out_dir.empty() ? "radars_run" : g.out_dir;
  radars::WriteRunArtifacts(dir, cfg, state);
  PrintReport(cfg, state);
  std::printf("artifacts           %s\n", dir.c_str());
  return state.memory_violations == 0 ? 0 : 1;
}

int CmdEstimateMem(const std::string& space_path, const radars::CostModelParams& cost, int p, bool json,
                   const GlobalOptions& g) {
  const auto space = radars::SearchSpace::LoadFile(space_path);
  const auto est = radars::EstimateMemory(space, cost, p);
  if (json) {
    Emit(radars::MemoryEstimateJson(est).dump(2) + "\n", g.out_dir, "memory.json");
  } else {
    Emit(radars::FormatMemoryEstimate(est), g.out_dir, "memory.txt");
  }
  return 0;
}

int CmdBruteForce(const std::string& space_path, std::uint64_t surrogate_seed, double interaction,
                  std::uint64_t limit, const radars::RewardParams& reward, const GlobalOptions& g) {
  const auto space = radars::SearchSpace::LoadFile(space_path);
  const auto spec = radars::SurrogateSpec::Generate(space, g.seed.value_or(surrogate_seed), interaction);
  const auto ranking = radars::BruteForceRanking(space, spec, reward, limit);
  Emit(radars::RankingTable(space, ranking).ToString(), g.out_dir, "ranking.csv");
  return 0;
}

int CmdReportPareto(const std::vector<std::string>& pools, const GlobalOptions& g) {
  const auto points = radars::ParetoFromPools(pools);
  Emit(radars::ParetoTable(points).ToString(), g.out_dir, "pareto.csv");
  return 0;
}

int CmdEval(const std::string& config_path, const std::string& arch_text, bool proxy, const GlobalOptions& g) {
  const auto cfg = LoadConfig(config_path, g);
  const auto arch = radars::Architecture::Parse(arch_text);
  radars::Check(arch.IsValidIn(cfg.space), ErrorKind::kInvalidArgument,
                "architecture " + arch_text + " is not in the search space");
  const auto backend = radars::MakeBackend(cfg);
  const double acc = proxy ? backend->ProxyAccuracy(arch, cfg.seed) : backend->FullAccuracy(arch, cfg.seed);
  const auto fom = radars::MakeFom(acc, radars::Aops(cfg.space, arch), cfg.reward);
  radars::Json out = {{"arch", arch.ToIndexString()},
                      {"description", arch.Describe(cfg.space)},
                      {"accuracy", fom.accuracy},
                      {"aops", fom.aops},
                      {"reward", fom.reward},
                      {"single_path_bytes", radars::SinglePathMemory(cfg.space, arch, cfg.cost)}};
  if (!proxy) {
    if (auto test = backend->TestAccuracy(arch, cfg.seed)) out["test_accuracy"] = *test;
  }
  Emit(out.dump(2) + "\n", g.out_dir, "eval.json");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Memory-bounded neural architecture search"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Override the run / surrogate seed");
  app.add_option("--out-dir", g.out_dir, "Directory for artifacts (stdout when omitted, except search)");

  std::string config_path;
  bool pipelined = false;
  auto* search = app.add_subcommand("search", "Run the interleaved RL + DNAS search");
  search->add_option("config", config_path, "Run configuration JSON")->required();
  search->add_flag("--pipelined", pipelined, "Overlap exploration t+1 with exploitation t");

  std::string space_path;
  radars::CostModelParams cost;
  int p = 6;
  bool json = false;
  auto* est = app.add_subcommand("estimate-mem", "Modeled SuperNet memory of a search space");
  est->add_option("space", space_path, "Search space JSON")->required();
  est->add_option("--batch", cost.batch, "Batch size B");
  est->add_option("--eta", cost.eta, "Weight-side multiplier");
  est->add_option("--theta", cost.theta, "Activation-side multiplier");
  est->add_option("--bytes", cost.bytes_per_value, "Bytes per stored value");
  est->add_option("-P,--retrain-count", p, "P for the P x single-path bound");
  est->add_flag("--json", json, "Emit JSON instead of a table");

  std::uint64_t surrogate_seed = 0;
  double interaction = 0.0;
  std::uint64_t limit = 1000000;
  radars::RewardParams reward;
  auto* brute = app.add_subcommand("brute-force", "Rank every architecture of a small space");
  brute->add_option("space", space_path, "Search space JSON")->required();
  brute->add_option("--surrogate-seed", surrogate_seed, "Surrogate landscape seed");
  brute->add_option("--interaction", interaction, "Pairwise interaction strength");
  brute->add_option("--limit", limit, "Refuse spaces larger than this");
  brute->add_option("--alpha", reward.alpha, "Accuracy weight in the reward");
  brute->add_option("--beta", reward.beta, "AOPS offset");
  brute->add_option("--gamma", reward.gamma, "AOPS scale");

  std::vector<std::string> pools;
  auto* pareto = app.add_subcommand("report-pareto", "AOPS/error points and their non-dominated flags");
  pareto->add_option("pools", pools, "pool.jsonl dumps")->required();

  std::string arch_text;
  bool proxy = false;
  auto* eval = app.add_subcommand("eval", "Train one architecture and report its figures of merit");
  eval->add_option("config", config_path, "Run configuration JSON")->required();
  eval->add_option("--arch", arch_text, "Architecture, e.g. 0,1,2|1,0,0")->required();
  eval->add_flag("--proxy", proxy, "Proxy training instead of full training");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (*seed_opt) g.seed = seed;

  try {
    if (*search) return CmdSearch(config_path, pipelined, g);
    if (*est) return CmdEstimateMem(space_path, cost, p, json, g);
    if (*brute) return CmdBruteForce(space_path, surrogate_seed, interaction, limit, reward, g);
    if (*pareto) return CmdReportPareto(pools, g);
    if (*eval) return CmdEval(config_path, arch_text, proxy, g);
  } catch (const radars::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCodeFor(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
