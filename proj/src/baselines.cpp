#include "netcov/baselines.hpp"

#include <cmath>

#include <boost/math/distributions/students_t.hpp>

#include "netcov/errors.hpp"

namespace netcov {

double correlation_p_value(double r, Index n)
{
    if (n <= 2) throw DataError("correlation test needs more than 2 samples");
    const double ar = std::abs(r);
    if (ar >= 1.0) return 0.0;
    const double df = static_cast<double>(n - 2);
    const double t = ar * std::sqrt(df / (1.0 - r * r));
    const boost::math::students_t dist(df);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, t));
}

CpmModel cpm_fit(const MatrixXd& Z_train, const VectorXd& y_train, const FeatureIndex& idx, double alpha)
{
    const Index N = Z_train.rows();
    if (N <= 2) throw DataError("CPM needs at least 3 training rows");
    if (y_train.size() != N) throw ShapeError("response length does not match design rows");
    if (Z_train.cols() != idx.p()) throw ShapeError("design width does not match the feature index");
    const VectorXd yc = y_train.array() - y_train.mean();
    const double syy = yc.squaredNorm();
    if (!(syy > 0.0)) throw DataError("CPM response has zero variance");

    CpmModel m;
    m.p = idx.p();
    m.threshold = alpha;
    m.screening.reserve(static_cast<std::size_t>(idx.n_edges()));
    for (Index j = 0; j < idx.n_edges(); ++j) {
        const auto col = Z_train.col(j);
        const double mean = col.mean();
        double sxy = 0.0, sxx = 0.0;
        for (Index i = 0; i < N; ++i) {
            const double dx = col(i) - mean;
            sxy += dx * yc(i);
            sxx += dx * dx;
        }
        EdgeScreen s{j, 0.0, 1.0};
        if (sxx > 0.0) {
            s.r = sxy / std::sqrt(sxx * syy);
            s.p_value = correlation_p_value(s.r, N);
        }
        if (s.p_value < alpha) (s.r > 0.0 ? m.positive_edges : m.negative_edges).push_back(j);
        m.screening.push_back(s);
    }

    const MatrixXd scores = cpm_scores(m, Z_train);
    // Empty sign sets keep a zero slope and drop out of the regression.
    std::vector<Index> used;
    if (!m.positive_edges.empty()) used.push_back(0);
    if (!m.negative_edges.empty()) used.push_back(1);
    MatrixXd D(N, static_cast<Index>(used.size()) + 1);
    D.col(0).setOnes();
    for (std::size_t k = 0; k < used.size(); ++k) D.col(static_cast<Index>(k) + 1) = scores.col(used[k]);
    const VectorXd coef = D.completeOrthogonalDecomposition().solve(y_train);
    m.intercept = coef(0);
    for (std::size_t k = 0; k < used.size(); ++k) {
        (used[k] == 0 ? m.slope_pos : m.slope_neg) = coef(static_cast<Index>(k) + 1);
    }
    return m;
}

MatrixXd cpm_scores(const CpmModel& model, const MatrixXd& Z)
{
    if (Z.cols() != model.p) throw ShapeError("design columns are not aligned with the CPM feature index");
    MatrixXd s = MatrixXd::Zero(Z.rows(), 2);
    for (Index j : model.positive_edges) s.col(0) += Z.col(j);
    for (Index j : model.negative_edges) s.col(1) += Z.col(j);
    return s;
}

VectorXd cpm_predict(const CpmModel& model, const MatrixXd& Z)
{
    const MatrixXd s = cpm_scores(model, Z);
    VectorXd yhat = model.slope_pos * s.col(0) + model.slope_neg * s.col(1);
    yhat.array() += model.intercept;
    return yhat;
}

} // namespace netcov
