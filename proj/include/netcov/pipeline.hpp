#pragma once

#include <optional>
#include <string>
#include <vector>

#include "netcov/core_data.hpp"
#include "netcov/grouping.hpp"
#include "netcov/preprocess.hpp"
#include "netcov/solver.hpp"

namespace netcov {

/**
 * Linear predictor on raw (untransformed) features:
 * eta = intercept + coef^T z + nuisance_coef^T w.
 */
struct LinearModel {
    Family family = Family::gaussian;
    double intercept = 0.0;
    VectorXd coef;
    VectorXd nuisance_coef;  // empty when no nuisance covariates were used

    VectorXd linear_predictor(const MatrixXd& Z, const MatrixXd* W = nullptr) const;
    /// Gaussian: eta. Binomial: success probability.
    VectorXd predict(const MatrixXd& Z, const MatrixXd* W = nullptr) const;
};

/**
 * Everything learned from a training split before solving: nuisance fit,
 * standardization, expansion and per-group orthonormal bases.
 *
 * The solver design is sqrt(N) * U so that (1/N) X_G^T X_G = I and lambda is
 * comparable across training sets of different size.
 */
struct PreparedProblem {
    Family family = Family::gaussian;
    std::optional<NuisanceModel> nuisance;
    Standardization stats;
    ExpansionMap map;
    Orthonormalized ortho;
    MatrixXd X;
    VectorXd y;
    std::vector<std::string> group_names;  // retained groups, solver order
    double design_scale = 1.0;

    PenalizedProblem problem() const;

    /// Standardized-scale coefficients over the p features.
    VectorXd feature_coefficients(const Eigen::Ref<const VectorXd>& beta_solver) const;

    /// Map a solver solution back to a model on raw features.
    LinearModel raw_model(double intercept, const Eigen::Ref<const VectorXd>& beta_solver) const;

    std::vector<std::string> active_names(const GroupLassoSolver& solver, const Eigen::Ref<const VectorXd>& beta) const;
};

PreparedProblem prepare(const MatrixXd& Z_train, const VectorXd& y_train, const MatrixXd* W_train,
                        const GroupSpec& spec, Family family);

/// Fill folded-back coefficients and active group names on every path entry.
void annotate_path(PathFit& path, const PreparedProblem& prepared, const GroupLassoSolver& solver);

} // namespace netcov
