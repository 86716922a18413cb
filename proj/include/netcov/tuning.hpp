#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "netcov/core_data.hpp"
#include "netcov/grouping.hpp"
#include "netcov/pipeline.hpp"
#include "netcov/solver.hpp"

namespace netcov {

struct TuningOptions {
    int folds = 10;
    int grid_size = 100;
    double min_ratio = 0.05;
    std::uint64_t seed = 0;
    SolverOptions solver;
};

/// Training split handed to tuning: raw design rows, response, optional nuisance rows.
struct TrainingData {
    const MatrixXd& Z;
    const VectorXd& y;
    const MatrixXd* W = nullptr;
    Family family = Family::gaussian;
};

struct CVResult {
    std::vector<double> lambdas;
    std::vector<double> mean_deviance;   // per held-out observation, averaged over folds
    std::vector<double> standard_error;  // sd across folds / sqrt(folds)
    std::size_t index_min = 0;
    std::size_t index_1se = 0;
    std::vector<int> fold_of;            // fold label of each training row
    std::uint64_t fold_seed = 0;         // seed that produced fold_of
    std::vector<Standardization> fold_stats;

    double lambda_min() const { return lambdas[index_min]; }
    double lambda_1se() const { return lambdas[index_1se]; }
};

/// Seeded random permutation dealt round-robin into `folds` labels.
std::vector<int> assign_folds(Index n, int folds, std::uint64_t seed);

/// Index of the minimum, and of the largest lambda within one SE of it (grid descending).
std::pair<std::size_t, std::size_t> one_se_rule(std::span<const double> mean, std::span<const double> se);

CVResult cross_validate(const TrainingData& data, const GroupSpec& spec, const TuningOptions& options);

/// Full-training-set model at one lambda.
struct FitResult {
    double lambda = 0.0;
    double intercept = 0.0;               // standardized scale
    VectorXd beta_tilde;                  // solver coordinates
    VectorXd beta;                        // standardized-scale coefficients over p features
    LinearModel model;                    // raw-feature predictor
    std::vector<std::string> active_groups;
    double deviance = 0.0;
    double null_deviance = 0.0;
    double kkt_residual = 0.0;
    int iterations = 0;
};

FitResult fit_at(const PreparedProblem& prepared, const GroupLassoSolver& solver, double lambda);

FitResult select_and_refit(const TrainingData& data, const GroupSpec& spec, const CVResult& cv,
                           const SolverOptions& options = {});

/// Cross-validated fit plus the full-data path on the CV grid.
struct TunedFit {
    CVResult cv;
    PathFit path;
    FitResult fit;
};

TunedFit tune_and_fit(const TrainingData& data, const GroupSpec& spec, const TuningOptions& options);

} // namespace netcov
