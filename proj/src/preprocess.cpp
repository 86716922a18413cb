#include "netcov/preprocess.hpp"

#include <cmath>
#include <string>

#include "netcov/errors.hpp"
#include "netcov/log.hpp"

namespace netcov {

Standardization fit_standardization(const MatrixXd& Z_train, const VectorXd& y_train, Family family)
{
    const Index n = Z_train.rows();
    if (n < 2) throw DataError("standardization needs at least 2 training rows");
    Standardization s;
    s.column_means = Z_train.colwise().mean().transpose();
    s.column_sds.resize(Z_train.cols());
    for (Index j = 0; j < Z_train.cols(); ++j) {
        const double var = (Z_train.col(j).array() - s.column_means(j)).square().sum() / static_cast<double>(n);
        s.column_sds(j) = std::sqrt(var);
    }
    if (family == Family::gaussian) {
        s.y_mean = y_train.mean();
        s.y_sd = std::sqrt((y_train.array() - s.y_mean).square().sum() / static_cast<double>(n));
        if (!(s.y_sd > 0.0)) throw DataError("continuous response has zero variance on the training rows");
    }
    return s;
}

namespace {

// Columns whose spread is at rounding level relative to their magnitude are constant.
bool is_constant(double mean, double sd) { return !(sd > 1e-13 * std::max(1.0, std::abs(mean))); }

} // namespace

void apply_standardization(MatrixXd& Z, const Standardization& stats)
{
    if (Z.cols() != stats.column_means.size()) throw ShapeError("standardization statistics do not match design width");
    for (Index j = 0; j < Z.cols(); ++j) {
        const double m = stats.column_means(j);
        const double sd = stats.column_sds(j);
        if (is_constant(m, sd)) {
            Z.col(j).setZero();
        } else {
            Z.col(j) = (Z.col(j).array() - m) / sd;
        }
    }
}

void apply_standardization(VectorXd& y, const Standardization& stats, Family family)
{
    if (family == Family::gaussian) y = (y.array() - stats.y_mean) / stats.y_sd;
}

StandardizeResult standardize(const DesignMatrix& design, const VectorXd& y, Family family,
                              std::span<const Index> train_rows)
{
    if (y.size() != design.Z.rows()) throw ShapeError("response length does not match design rows");
    const MatrixXd Z_train = take_rows(design.Z, train_rows);
    const VectorXd y_train = take_rows(y, train_rows);
    StandardizeResult out;
    auto stats = fit_standardization(Z_train, y_train, family);
    out.design.Z = design.Z;
    apply_standardization(out.design.Z, stats);
    out.y = y;
    apply_standardization(out.y, stats, family);
    for (Index j = 0; j < design.Z.cols(); ++j) {
        if (is_constant(stats.column_means(j), stats.column_sds(j))) out.constant_columns.push_back(j);
    }
    if (!out.constant_columns.empty()) {
        warn(std::to_string(out.constant_columns.size()) + " constant training column(s) left at zero");
    }
    out.design.stats = std::move(stats);
    return out;
}

MatrixXd NuisanceModel::augment(const MatrixXd& W)
{
    MatrixXd M(W.rows(), W.cols() + 1);
    M.col(0).setOnes();
    M.rightCols(W.cols()) = W;
    return M;
}

NuisanceModel fit_nuisance(const MatrixXd& Z_train, const VectorXd& y_train, const MatrixXd& W_train, Family family)
{
    if (W_train.rows() != Z_train.rows() || y_train.size() != Z_train.rows()) {
        throw ShapeError("nuisance rows do not match design rows");
    }
    if (W_train.cols() >= Z_train.rows()) throw DataError("nuisance covariates outnumber training rows");
    const MatrixXd M = NuisanceModel::augment(W_train);
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(M);
    NuisanceModel model;
    model.rank = cod.rank();
    if (model.rank < M.cols()) warn("nuisance design is rank deficient; using the least-norm fit");
    model.feature_coef = cod.solve(Z_train);
    model.residualize_response = family == Family::gaussian;
    model.response_coef = model.residualize_response ? VectorXd(cod.solve(y_train)) : VectorXd::Zero(M.cols());
    return model;
}

void apply_nuisance(const NuisanceModel& model, MatrixXd& Z, VectorXd& y, const MatrixXd& W)
{
    const MatrixXd M = NuisanceModel::augment(W);
    if (M.cols() != model.feature_coef.rows()) throw ShapeError("nuisance column count differs from the fitted model");
    Z.noalias() -= M * model.feature_coef;
    if (model.residualize_response) y.noalias() -= M * model.response_coef;
}

ResidualizeResult residualize_nuisance(const MatrixXd& Z, const VectorXd& y, const MatrixXd& W,
                                       std::span<const Index> train_rows, Family family)
{
    if (W.rows() != Z.rows()) throw ShapeError("nuisance rows do not match design rows");
    ResidualizeResult out{Z, y, fit_nuisance(take_rows(Z, train_rows), take_rows(y, train_rows),
                                             take_rows(W, train_rows), family)};
    apply_nuisance(out.model, out.Z, out.y, W);
    return out;
}

std::vector<Index> OrthoBasis::boundaries() const
{
    std::vector<Index> out;
    out.reserve(groups.size() + 1);
    for (const auto& g : groups) out.push_back(g.start);
    out.push_back(n_cols);
    return out;
}

Orthonormalized orthonormalize(const MatrixXd& Z_star, const ExpansionMap& map)
{
    if (Z_star.cols() != map.p_star()) throw ShapeError("expanded design width does not match the expansion map");
    const Index N = Z_star.rows();
    std::vector<MatrixXd> us;
    Orthonormalized out;
    Index col = 0;
    for (std::size_t g = 0; g < map.n_groups(); ++g) {
        const auto block = Z_star.middleCols(map.group_start[g], map.group_size(g));
        Eigen::BDCSVD<MatrixXd> svd(block, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const VectorXd& s = svd.singularValues();
        Index r = 0;
        if (s.size() > 0 && s(0) > 0.0) {
            while (r < s.size() && s(r) > rank_tolerance * s(0)) ++r;
        }
        if (r == 0) {
            warn("dropping group " + std::to_string(g + 1) + " with a zero column block");
            continue;
        }
        out.basis.groups.push_back({g, col, svd.matrixV().leftCols(r), s.head(r)});
        us.push_back(svd.matrixU().leftCols(r));
        col += r;
    }
    out.basis.n_cols = col;
    out.U.resize(N, col);
    out.multipliers.resize(static_cast<Index>(us.size()));
    for (std::size_t i = 0; i < us.size(); ++i) {
        const auto& gb = out.basis.groups[i];
        out.U.middleCols(gb.start, gb.rank()) = us[i];
        out.multipliers(static_cast<Index>(i)) = std::sqrt(static_cast<double>(gb.rank()));
    }
    return out;
}

VectorXd expanded_coefficients(const Eigen::Ref<const VectorXd>& beta_tilde, const OrthoBasis& basis,
                               const ExpansionMap& map)
{
    if (beta_tilde.size() != basis.n_cols) throw ShapeError("orthonormal coefficient vector has the wrong length");
    VectorXd beta_star = VectorXd::Zero(map.p_star());
    for (const auto& gb : basis.groups) {
        const auto bt = beta_tilde.segment(gb.start, gb.rank());
        if (bt.isZero(0.0)) continue;
        beta_star.segment(map.group_start[gb.group], map.group_size(gb.group)) =
            gb.V * (bt.array() / gb.sigma.array()).matrix();
    }
    return beta_star;
}

VectorXd back_transform(const Eigen::Ref<const VectorXd>& beta_tilde, const OrthoBasis& basis,
                        const ExpansionMap& map)
{
    return fold_back(expanded_coefficients(beta_tilde, basis, map), map);
}

} // namespace netcov
