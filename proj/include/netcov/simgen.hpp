#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "netcov/core_data.hpp"
#include "netcov/grouping.hpp"
#include "netcov/rng.hpp"

namespace netcov {

/// One cell of the simulation grid.
struct ExperimentConfig {
    Scheme scheme = Scheme::ebg;
    std::vector<std::string> active_groups{"(1,1)"};
    double alpha = 0.2;
    Family family = Family::gaussian;
    Index n_train = 1000;
    Index n_test = 1000;
    int communities = 10;
    int nodes_per_community = 5;
    int covariates = 1;
    std::uint64_t seed = 1;
    std::optional<std::filesystem::path> design_path;  // semi-synthetic when set
    int split_target = 0;                               // 0: keep the supplied communities
    int replicates = 1;

    void validate() const;
};

struct GroundTruth {
    VectorXd beta;
    double intercept = 0.0;
    std::vector<Index> support;
    std::vector<std::string> active_groups;
};

/// Named active-group presets: 1 or 5 groups for NBG and EBG.
std::vector<std::string> preset_active_groups(Scheme scheme, int count);

/// beta_j = alpha on the union of the named groups, 0 elsewhere.
GroundTruth make_beta(const GroupSpec& spec, const std::vector<std::string>& active_names, double alpha);

/**
 * Fully synthetic design: every unique entry of A and X iid N(0,1).
 * Test rows repeat the training design; responses are drawn separately.
 */
Dataset gen_design_synthetic(const ExperimentConfig& config, Rng& rng);

/// Gaussian: Z beta + N(0,1) noise. Binomial: Bernoulli(logit^{-1}(Z beta)).
VectorXd draw_response(const MatrixXd& Z, const GroundTruth& truth, Family family, Rng& rng);

/// SNR = Var(Z beta) with sigma^2 = 1 (gaussian) or Bayes error E[min(pi, 1-pi)] (binomial), over rows of Z.
double scenario_difficulty(const MatrixXd& Z, const GroundTruth& truth, Family family);

/// Center both splits with training column means.
void center_with_training_means(Dataset& data);

/// Read a core-data directory, optionally split communities, center, and draw responses.
Dataset gen_semisynthetic(const std::filesystem::path& dir, const ExperimentConfig& config, Rng& rng);

struct SimulatedCell {
    Dataset data;
    GroupSpec groups;
    GroundTruth truth;
    double difficulty = 0.0;
};

/// Generate one replicate of a cell; all randomness derives from `seed`.
SimulatedCell simulate_cell(const ExperimentConfig& config, std::uint64_t seed);

/// Geometric alpha grid with SNR from snr_lo to snr_hi for `support_size` unit-variance iid features.
std::vector<double> alpha_grid(int points, std::size_t support_size, double snr_lo = 0.01, double snr_hi = 10.0);

} // namespace netcov
