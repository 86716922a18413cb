#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "netcov/csv_io.hpp"
#include "netcov/grouping.hpp"
#include "netcov/simgen.hpp"
#include "netcov/tuning.hpp"

namespace netcov::cli {

namespace fs = std::filesystem;

inline constexpr const char* version = "0.1.0";

/// Simulation grid resolved from a dotted key/value config.
struct SweepConfig {
    std::uint64_t seed = 0;
    std::vector<Scheme> schemes{Scheme::ebg};
    std::vector<int> active_counts{1};
    std::vector<std::string> active_names;  // overrides presets when non-empty
    std::vector<Family> families{Family::gaussian};
    std::vector<double> alphas;             // empty: geometric grid from the SNR range
    int alpha_points = 20;
    double snr_min = 0.01;
    double snr_max = 10.0;
    int replicates = 10;
    ExperimentConfig base;
    TuningOptions tuning;
    std::vector<std::string> methods{"netcov", "lasso"};
    bool roc = false;
    bool keep_cells = false;

    /// Every key with its resolved value, for the run manifest.
    io::KeyValues resolved() const;
};

/// Parse a config; unknown keys and a missing seed are ConfigErrors.
SweepConfig parse_sweep_config(const io::KeyValues& kv);

/// One grid cell: scheme, active set, family, alpha (replicates are separate).
struct GridCell {
    std::string label;
    ExperimentConfig config;
    std::uint64_t seed = 0;
};

std::vector<GridCell> expand_grid(const SweepConfig& cfg);

struct FitOptions {
    Scheme scheme = Scheme::ebg;
    TuningOptions tuning;
    int split_communities = 0;
};

void cmd_simulate(const fs::path& config_file, const fs::path& out_dir, std::optional<std::uint64_t> seed_override);
void cmd_fit(const fs::path& data_dir, const FitOptions& options, const fs::path& out_dir);
void cmd_cpm(const fs::path& data_dir, const fs::path& out_dir, double alpha);
void cmd_evaluate(const fs::path& fit_dir, const fs::path& data_dir, const fs::path& out_dir);
void cmd_sweep(const fs::path& config_file, const fs::path& out_dir, std::optional<std::uint64_t> seed_override);

/// Map an exception to the documented exit code (2 config, 3 data, 4 numerical, 1 other).
int exit_code_for(const std::exception& e);

} // namespace netcov::cli
