#pragma once

#include <vector>

#include "netcov/core_data.hpp"

namespace netcov {

/// Marginal screening statistics of one edge feature.
struct EdgeScreen {
    Index feature = 0;
    double r = 0.0;
    double p_value = 1.0;
};

/**
 * Connectome predictive model: edges screened by Pearson correlation with the
 * response, summed per sign, and regressed on with OLS. Node covariates are
 * never read.
 */
struct CpmModel {
    Index p = 0;                       // feature count the model was trained on
    double threshold = 0.01;
    std::vector<Index> positive_edges;
    std::vector<Index> negative_edges;
    std::vector<EdgeScreen> screening;  // every edge, canonical order
    double intercept = 0.0;
    double slope_pos = 0.0;
    double slope_neg = 0.0;
};

/// Two-sided p-value of a Pearson correlation r over n samples (t test, n-2 df).
double correlation_p_value(double r, Index n);

CpmModel cpm_fit(const MatrixXd& Z_train, const VectorXd& y_train, const FeatureIndex& idx, double alpha = 0.01);

/// Per-row (positive, negative) summed edge weights.
MatrixXd cpm_scores(const CpmModel& model, const MatrixXd& Z);

VectorXd cpm_predict(const CpmModel& model, const MatrixXd& Z);

} // namespace netcov
