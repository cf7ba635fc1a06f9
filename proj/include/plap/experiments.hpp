#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace plap {

/// One experiment run: id, global knobs, and free-form per-experiment
/// parameters (defaults filled in by the runner).
struct ExperimentConfig {
    std::string experiment;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    int replicates = 20;
    int threads = 1;
    nlohmann::json params = nlohmann::json::object();
};

ExperimentConfig config_from_json(const nlohmann::json& j);

struct Assertion {
    std::string name;
    bool pass = false;
    double value = 0.0;
};

struct ExperimentReport {
    std::vector<std::string> files;  ///< paths written, relative to out_dir
    std::vector<Assertion> assertions;
    double wall_time_s = 0.0;
};

/// Known experiment ids: graph-demo, limit-check, degeneracy, spectrum,
/// rates, amle-check, penalized-check. Writes CSV/SVG outputs plus a
/// manifest.json with config echo, checksums and assertion results.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// FNV-1a 64-bit checksum of a file, as 16 hex digits.
std::string file_checksum(const std::string& path);

/// Run body(0..n-1) on a small worker pool (serial when threads <= 1);
/// results must be written to pre-sized slots so order is preserved.
void parallel_for(int n, int threads, const std::function<void(int)>& body);

}  // namespace plap
