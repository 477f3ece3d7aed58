#pragma once

#include "config.hpp"
#include "report.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace heatlab::cli {

struct RunOptions {
    std::string out_dir = "out";
    int threads = 0;  // 0: all cores
    std::optional<std::uint64_t> seed;
    bool dry_run = false;  // validate the config only
};

std::vector<std::string> experiment_kinds();

/// Reads and validates the whole config (ConfigError before any work is
/// done), runs the experiment, writes its data artifacts under out_dir and
/// returns the report. The report itself is not written.
RunReport run_experiment(const Config& cfg, const RunOptions& opt);

/// run_experiment plus `report.json`; returns the process exit code
/// (0 pass, 1 check failure, 2 config error).
int run_command(const std::string& config_path, const RunOptions& opt);

/// Merged CSV table of several reports. Reports from grid_convergence runs
/// are merged into a convergence table with measured orders; anything else
/// is listed check by check. SchemaMismatch when schema versions differ.
std::string merge_reports(const std::vector<RunReport>& reports, const std::vector<std::string>& labels);

}  // namespace heatlab::cli
