#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "landau/density.hpp"
#include "landau/model.hpp"

namespace landau {

struct DensitySection {
    Vec x0;
    std::vector<double> times;
    double grid_half_width = 3.0;
    int grid_points = 13;
    double eta = 0.0;  // <= 0: default bandwidth rule
    Mollifier::Kind kind = Mollifier::Kind::Bump;
};

struct ScalingSection {
    std::vector<double> deltas;
    int replicas = 200;
    int n_inner = 50;
};

struct ExperimentConfig {
    ModelSpec model;
    std::string experiment = "simulate";
    RecordingPlan recording;
    int replicas = 1;
    std::string out_dir = "out";
    bool strict = false;
    int workers = 0;  // 0 = leave the runtime default

    std::optional<DensitySection> density;
    std::optional<ScalingSection> scaling;

    nlohmann::json raw;

    // hash of the semantically meaningful fields (out_dir, strict and
    // workers excluded), canonical key order and number formatting
    std::string hash_hex() const;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

struct CheckResult {
    std::string name;
    bool pass;
    std::string detail;
};

struct RunManifest {
    std::string config_hash;
    uint64_t seed = 0;
    std::string version;
    std::string start_time;
    std::string end_time;
    std::vector<CheckResult> checks;
    std::vector<std::string> artifacts;

    bool all_pass() const;
    std::string to_json() const;
};

// Dispatches the configured experiment, writes artifacts + manifest under
// cfg.out_dir and returns the manifest.
RunManifest run_experiment(const ExperimentConfig& cfg);

extern const char* kVersion;

}  // namespace landau
