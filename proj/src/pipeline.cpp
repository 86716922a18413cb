#include "netcov/pipeline.hpp"

#include <cmath>

#include "netcov/errors.hpp"

namespace netcov {

VectorXd LinearModel::linear_predictor(const MatrixXd& Z, const MatrixXd* W) const
{
    if (Z.cols() != coef.size()) {
        throw ShapeError("design has " + std::to_string(Z.cols()) + " features but the model has " +
                         std::to_string(coef.size()));
    }
    VectorXd eta = Z * coef;
    eta.array() += intercept;
    if (nuisance_coef.size() > 0) {
        if (W == nullptr || W->cols() != nuisance_coef.size() || W->rows() != Z.rows()) {
            throw ShapeError("model expects nuisance covariates matching the design rows");
        }
        eta.noalias() += *W * nuisance_coef;
    }
    return eta;
}

VectorXd LinearModel::predict(const MatrixXd& Z, const MatrixXd* W) const
{
    VectorXd eta = linear_predictor(Z, W);
    if (family == Family::binomial) {
        for (Index i = 0; i < eta.size(); ++i) eta(i) = inverse_logit(eta(i));
    }
    return eta;
}

PenalizedProblem PreparedProblem::problem() const
{
    return PenalizedProblem{X, y, family, ortho.basis.boundaries(), ortho.multipliers};
}

VectorXd PreparedProblem::feature_coefficients(const Eigen::Ref<const VectorXd>& beta_solver) const
{
    return back_transform(design_scale * beta_solver, ortho.basis, map);
}

LinearModel PreparedProblem::raw_model(double intercept, const Eigen::Ref<const VectorXd>& beta_solver) const
{
    const VectorXd beta = feature_coefficients(beta_solver);
    // b_j = beta_j / sd_j; constant columns were zeroed and carry no weight.
    VectorXd b = VectorXd::Zero(beta.size());
    for (Index j = 0; j < beta.size(); ++j) {
        const double sd = stats.column_sds(j);
        if (sd > 1e-13 * std::max(1.0, std::abs(stats.column_means(j)))) b(j) = beta(j) / sd;
    }
    const double y_scale = family == Family::gaussian ? stats.y_sd : 1.0;
    const double y_shift = family == Family::gaussian ? stats.y_mean : 0.0;

    LinearModel m;
    m.family = family;
    m.coef = y_scale * b;
    m.intercept = y_shift + y_scale * (intercept - b.dot(stats.column_means));
    if (nuisance) {
        VectorXd h = -y_scale * (nuisance->feature_coef * b);
        if (nuisance->residualize_response) h += nuisance->response_coef;
        m.intercept += h(0);
        m.nuisance_coef = h.tail(h.size() - 1);
    }
    return m;
}

std::vector<std::string> PreparedProblem::active_names(const GroupLassoSolver& solver,
                                                       const Eigen::Ref<const VectorXd>& beta) const
{
    std::vector<std::string> out;
    for (std::size_t g : solver.active_groups(beta)) out.push_back(group_names[g]);
    return out;
}

PreparedProblem prepare(const MatrixXd& Z_train, const VectorXd& y_train, const MatrixXd* W_train,
                        const GroupSpec& spec, Family family)
{
    if (Z_train.cols() != spec.p) throw ShapeError("design width does not match the group specification");
    if (y_train.size() != Z_train.rows()) throw ShapeError("response length does not match design rows");
    PreparedProblem out;
    out.family = family;
    MatrixXd Z = Z_train;
    VectorXd y = y_train;
    if (W_train != nullptr && W_train->cols() > 0) {
        out.nuisance = fit_nuisance(Z, y, *W_train, family);
        apply_nuisance(*out.nuisance, Z, y, *W_train);
    }
    out.stats = fit_standardization(Z, y, family);
    apply_standardization(Z, out.stats);
    apply_standardization(y, out.stats, family);
    out.map = expand(spec);
    out.ortho = orthonormalize(expand_design(Z, out.map), out.map);
    if (out.ortho.basis.groups.empty()) throw DataError("every group has a zero column block");
    out.design_scale = std::sqrt(static_cast<double>(Z.rows()));
    out.X = out.design_scale * out.ortho.U;
    out.y = std::move(y);
    for (const auto& gb : out.ortho.basis.groups) out.group_names.push_back(spec.groups[gb.group].name);
    return out;
}

void annotate_path(PathFit& path, const PreparedProblem& prepared, const GroupLassoSolver& solver)
{
    for (auto& e : path.entries) {
        e.beta = prepared.feature_coefficients(e.beta_tilde);
        e.active_groups = prepared.active_names(solver, e.beta_tilde);
    }
}

} // namespace netcov
