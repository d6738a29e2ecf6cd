#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>
#include <string>

#include "radars/config.h"
#include "radars/error.h"
#include "radars/metrics.h"
#include "radars/orchestrator.h"
#include "radars/report.h"

namespace py = pybind11;

namespace {

radars::RewardParams RewardFrom(double alpha, double beta, double gamma) {
  radars::RewardParams p;
  p.alpha = alpha;
  p.beta = beta;
  p.gamma = gamma;
  p.Validate();
  return p;
}

std::string Search(const std::string& config_path, std::optional<std::string> out_dir,
                   std::optional<std::uint64_t> seed, bool pipelined) {
  auto cfg = radars::RadarsConfig::LoadFile(config_path);
  if (seed) cfg.seed = *seed;
  if (pipelined) cfg.pipelined = true;
  std::shared_ptr<const radars::SearchBackend> backend = radars::MakeBackend(cfg);
  radars::Orchestrator orch(cfg, backend);
  radars::RunState state;
  {
    py::gil_scoped_release release;
    state = orch.Run();
  }
  if (out_dir) radars::WriteRunArtifacts(*out_dir, cfg, state);
  radars::Json out = {{"iterations", state.iteration},
                      {"episodes", state.episodes},
                      {"pool_size", state.pool.size()},
                      {"peak_modeled_bytes", state.peak_modeled_bytes},
                      {"memory_violations", state.memory_violations}};
  if (state.best) {
    out["arch"] = state.best->arch.ToIndexString();
    out["description"] = state.best->arch.Describe(cfg.space);
    out["accuracy"] = state.best->fom.accuracy;
    out["aops"] = state.best->fom.aops;
    out["reward"] = state.best->fom.reward;
    if (state.best->test_accuracy) out["test_accuracy"] = *state.best->test_accuracy;
  }
  return out.dump();
}

}  // namespace

PYBIND11_MODULE(_radars, m) {
  m.doc() = "Memory-bounded neural architecture search core";

  static py::exception<radars::Error> error(m, "RadarsError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const radars::Error& e) {
      py::set_error(error, e.what());
    }
  });

  m.def("reward", [](double acc, double aops, double alpha, double beta, double gamma) {
    return radars::Reward(acc, aops, RewardFrom(alpha, beta, gamma));
  }, py::arg("accuracy"), py::arg("aops"), py::arg("alpha") = 0.5, py::arg("beta") = 0.0, py::arg("gamma") = 1e9);

  m.def("aops", [](const std::string& space_path, const std::string& arch) {
    const auto space = radars::SearchSpace::LoadFile(space_path);
    return radars::Aops(space, radars::Architecture::Parse(arch));
  }, py::arg("space_path"), py::arg("arch"));

  m.def("space_size", [](const std::string& space_path) {
    return radars::SpaceSize(radars::SearchSpace::LoadFile(space_path));
  }, py::arg("space_path"));

  m.def("estimate_memory_json",
        [](const std::string& space_path, double eta, double theta, double batch, double bytes, int p) {
          const radars::CostModelParams cost{eta, theta, batch, bytes};
          cost.Validate();
          const auto est = radars::EstimateMemory(radars::SearchSpace::LoadFile(space_path), cost, p);
          return radars::MemoryEstimateJson(est).dump();
        },
        py::arg("space_path"), py::arg("eta") = 2.0, py::arg("theta") = 2.0, py::arg("batch") = 32.0,
        py::arg("bytes_per_value") = 4.0, py::arg("p") = 6);

  m.def("brute_force_csv",
        [](const std::string& space_path, std::uint64_t surrogate_seed, double interaction, double alpha,
           double beta, double gamma, std::uint64_t limit) {
          const auto space = radars::SearchSpace::LoadFile(space_path);
          const auto spec = radars::SurrogateSpec::Generate(space, surrogate_seed, interaction);
          const auto ranking = radars::BruteForceRanking(space, spec, RewardFrom(alpha, beta, gamma), limit);
          return radars::RankingTable(space, ranking).ToString();
        },
        py::arg("space_path"), py::arg("surrogate_seed") = 0, py::arg("interaction") = 0.0,
        py::arg("alpha") = 0.5, py::arg("beta") = 0.0, py::arg("gamma") = 1e9, py::arg("limit") = 1000000);

  m.def("pareto_csv", [](const std::vector<std::string>& pools) {
    return radars::ParetoTable(radars::ParetoFromPools(pools)).ToString();
  }, py::arg("pool_paths"));

  m.def("search_json", &Search, py::arg("config_path"), py::arg("out_dir") = std::nullopt,
        py::arg("seed") = std::nullopt, py::arg("pipelined") = false);
}
