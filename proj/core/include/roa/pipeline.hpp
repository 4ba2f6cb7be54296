#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "roa/learner.hpp"
#include "roa/options.hpp"
#include "roa/system.hpp"
#include "roa/volume.hpp"

#include "json.hpp"

namespace roa {

struct ConfigError : std::runtime_error {
    std::string field;
    ConfigError(std::string f, const std::string& msg)
        : std::runtime_error(f + ": " + msg), field(std::move(f)) {}
};

struct RunConfig {
    nlohmann::json resolved;  // full config with defaults materialized

    std::string system_name;
    std::vector<std::string> variables, f_texts;
    Box domain;
    std::vector<double> equilibrium;  // empty: origin
    Matrix Q;                         // 0x0: identity

    bool has_local = false, has_reach = false, has_data = false;
    bool has_train = false, has_neural = false, has_compositional = false;
    int data_samples = 3000;
    double data_alpha = 0.1;
    TrainConfig train;
    std::string neural_target = "c2_P";
    std::vector<std::vector<int>> blocks;
    std::string comp_mode = "both";  // local | quadratic | both

    std::string out_dir = "out";
    std::uint64_t seed = 0;
    int jobs = 1;
    VerifyOptions verify;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const nlohmann::json& doc);

enum class FailKind { None, Verification, Budget };

struct StageReport {
    std::string name;
    std::string status;  // ok | skipped | resumed | failed
    double wall_time = 0.0;
    nlohmann::json details;
};

struct RunReport {
    bool success = true;
    FailKind fail_kind = FailKind::None;
    std::string error;
    bool globally_stable = false;
    std::optional<double> c1_P, c2_P, c1_V, c2_V;
    std::optional<double> comp_local_level, comp_quadratic_level;
    bool nesting_ok = true;
    std::vector<StageReport> stages;
    nlohmann::json resolved_config;

    nlohmann::json to_json() const;
};

// Executes the configured stages in order, persisting artifacts under
// out_dir. With resume, completed stages are skipped when their artifact
// exists and the stored config hash matches.
RunReport run_pipeline(const RunConfig& cfg, bool resume = false);

// 1e5-point DOA reference, cached as CSV under cfg.out_dir.
DoaSample load_or_build_doa(const RunConfig& cfg, const DynamicalSystem& sys,
                            int n_mc = 100000);

// FNV-1a over the canonical resolved-config dump.
std::uint64_t config_hash(const RunConfig& cfg);

// Write-temp-then-rename.
void atomic_write(const std::string& path, const std::string& content);

}  // namespace roa
