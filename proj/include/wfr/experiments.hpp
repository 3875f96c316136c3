#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wfr/config.hpp"

namespace wfr {

std::string_view version();

struct ExperimentResult {
  std::vector<std::filesystem::path> files;  // everything written, summary.json last
  nlohmann::json summary;
};

// Runs cfg.experiment and writes its CSV/JSON files plus summary.json into
// cfg.output_dir. Outputs depend only on the config (summary.json's
// wall_time_s aside), not on the thread count.
ExperimentResult run_experiment(const RunConfig& cfg);

// Pieces of the experiments, reused by tests.
double max_adjoint_residual(std::size_t states, std::size_t trials, std::uint64_t seed);

}  // namespace wfr
