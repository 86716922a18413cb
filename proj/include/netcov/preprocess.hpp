#pragma once

#include <span>
#include <vector>

#include "netcov/core_data.hpp"
#include "netcov/grouping.hpp"

namespace netcov {

/// Column means and 1/N standard deviations of the training rows; y stats only for gaussian.
Standardization fit_standardization(const MatrixXd& Z_train, const VectorXd& y_train, Family family);

/// (x - mean) / sd column-wise; zero-variance columns map to 0.
void apply_standardization(MatrixXd& Z, const Standardization& stats);
void apply_standardization(VectorXd& y, const Standardization& stats, Family family);

struct StandardizeResult {
    DesignMatrix design;          // every row transformed with training statistics
    VectorXd y;
    std::vector<Index> constant_columns;
};

/// Standardize using statistics of `train_rows` only. Binomial responses are left untouched.
StandardizeResult standardize(const DesignMatrix& design, const VectorXd& y, Family family,
                              std::span<const Index> train_rows);

/**
 * Least-squares fit of every feature column (and a gaussian response) on an
 * intercept plus q nuisance columns, learned from training rows.
 */
struct NuisanceModel {
    MatrixXd feature_coef;   // (q+1) x p
    VectorXd response_coef;  // q+1, zero for binomial responses
    bool residualize_response = true;
    Index rank = 0;

    /// [1 W] for the given nuisance rows.
    static MatrixXd augment(const MatrixXd& W);
};

NuisanceModel fit_nuisance(const MatrixXd& Z_train, const VectorXd& y_train, const MatrixXd& W_train, Family family);
void apply_nuisance(const NuisanceModel& model, MatrixXd& Z, VectorXd& y, const MatrixXd& W);

struct ResidualizeResult {
    MatrixXd Z;
    VectorXd y;
    NuisanceModel model;
};

/// Replace each column and the response by its residual from the nuisance regression.
ResidualizeResult residualize_nuisance(const MatrixXd& Z, const VectorXd& y, const MatrixXd& W,
                                       std::span<const Index> train_rows, Family family);

/// Truncated SVD of one group's column block, Z*_G = U_G diag(sigma) V_G^T.
struct GroupBasis {
    std::size_t group = 0;  // index into the ExpansionMap's groups
    Index start = 0;        // first column of this group in the orthonormal design
    MatrixXd V;
    VectorXd sigma;

    Index rank() const { return sigma.size(); }
};

struct OrthoBasis {
    std::vector<GroupBasis> groups;
    Index n_cols = 0;

    /// Column offsets of the retained groups in the orthonormal design, plus the end.
    std::vector<Index> boundaries() const;
};

struct Orthonormalized {
    MatrixXd U;               // [U_G : G], U_G^T U_G = I
    OrthoBasis basis;
    VectorXd multipliers;     // sqrt(rank) per retained group
};

/// Singular values below this fraction of the group's largest are discarded.
inline constexpr double rank_tolerance = 1e-10;

Orthonormalized orthonormalize(const MatrixXd& Z_star, const ExpansionMap& map);

/// Expanded-space coefficients: beta*_G = V_G sigma_G^{-1} beta~_G, zero for dropped groups.
VectorXd expanded_coefficients(const Eigen::Ref<const VectorXd>& beta_tilde, const OrthoBasis& basis,
                               const ExpansionMap& map);

/// Undo orthonormalization and duplication; returns coefficients over the p standardized features.
VectorXd back_transform(const Eigen::Ref<const VectorXd>& beta_tilde, const OrthoBasis& basis,
                        const ExpansionMap& map);

} // namespace netcov
