#pragma once

#include <optional>
#include <string>
#include <vector>

#include "netcov/core_data.hpp"
#include "netcov/solver.hpp"

namespace netcov {

/// |beta_j| above this counts as selected.
inline constexpr double selection_threshold = 1e-12;

/// Confusion counts against a true support; recall or precision is empty (NA) when undefined.
struct SupportReport {
    Index tp = 0;
    Index fp = 0;
    Index fn = 0;
    Index tn = 0;
    std::optional<double> recall;
    std::optional<double> precision;

    Index total() const { return tp + fp + fn + tn; }
};

SupportReport support_from_counts(Index tp, Index fp, Index fn, Index tn);

SupportReport support_metrics(const Eigen::Ref<const VectorXd>& beta_hat, const Eigen::Ref<const VectorXd>& beta_true);

/// Group-level analogue over group names.
SupportReport group_support_metrics(const std::vector<std::string>& selected, const std::vector<std::string>& truth,
                                    std::size_t total_groups);

struct PredictionReport {
    std::optional<double> correlation;  // continuous responses
    std::optional<double> accuracy;     // binary responses
};

/// Pearson correlation, or empty when either vector is constant or shorter than 2.
std::optional<double> pearson(const Eigen::Ref<const VectorXd>& a, const Eigen::Ref<const VectorXd>& b);

/// Binomial `y_hat` holds success probabilities, classified at 0.5.
PredictionReport prediction_metrics(const Eigen::Ref<const VectorXd>& y_hat, const Eigen::Ref<const VectorXd>& y_test,
                                    Family family);

struct RocPoint {
    double lambda = 0.0;
    double fpr = 0.0;                // FP / (FP + TN)
    double tpr = 0.0;                // TP / (TP + FN)
    std::optional<double> fdr;       // FP / (FP + TP), NA for an empty selection
};

/// One point per path entry, in path order (lambda descending). Uses the folded-back `beta`.
std::vector<RocPoint> roc_along_path(const PathFit& path, const Eigen::Ref<const VectorXd>& beta_true);

/**
 * Fraction of the distinct FPR values of `other` at which `curve`, linearly
 * interpolated and anchored at (0,0) and (1,1), has TPR >= that of `other`.
 */
double roc_dominance(const std::vector<RocPoint>& curve, const std::vector<RocPoint>& other);

} // namespace netcov
