#include "netcov/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "netcov/errors.hpp"
#include "netcov/parallel.hpp"
#include "netcov/rng.hpp"

namespace netcov {

std::vector<int> assign_folds(Index n, int folds, std::uint64_t seed)
{
    if (folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
    if (n < folds) throw DataError("fewer training rows than folds");
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});
    Rng rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> fold_of(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < perm.size(); ++i) fold_of[perm[i]] = static_cast<int>(i % folds);
    return fold_of;
}

std::pair<std::size_t, std::size_t> one_se_rule(std::span<const double> mean, std::span<const double> se)
{
    if (mean.empty() || mean.size() != se.size()) throw ConfigError("one-SE rule needs matching non-empty inputs");
    const auto it = std::min_element(mean.begin(), mean.end());
    const std::size_t i_min = static_cast<std::size_t>(it - mean.begin());
    const double bound = mean[i_min] + se[i_min];
    std::size_t i_1se = i_min;
    for (std::size_t k = 0; k <= i_min; ++k) {
        if (mean[k] <= bound) {
            i_1se = k;
            break;
        }
    }
    return {i_min, i_1se};
}

namespace {

bool single_class(const VectorXd& y)
{
    const double m = y.mean();
    return m <= 0.0 || m >= 1.0;
}

std::vector<int> draw_folds(const TrainingData& data, int folds, std::uint64_t seed, std::uint64_t& used_seed)
{
    const Index n = data.Z.rows();
    for (int attempt = 0; attempt < 2; ++attempt) {
        used_seed = attempt == 0 ? seed : derive_seed(seed, 0xf01d);
        auto fold_of = assign_folds(n, folds, used_seed);
        if (data.family != Family::binomial) return fold_of;
        bool ok = true;
        for (int f = 0; f < folds && ok; ++f) {
            std::vector<Index> rows;
            for (Index i = 0; i < n; ++i) {
                if (fold_of[i] != f) rows.push_back(i);
            }
            ok = !single_class(take_rows(data.y, rows));
        }
        if (ok) return fold_of;
    }
    throw DataError("a cross-validation fold has a single response class after re-drawing");
}

struct FoldOutcome {
    std::vector<double> deviance;  // per held-out observation, per lambda
    Standardization stats;
};

FoldOutcome run_fold(const TrainingData& data, const GroupSpec& spec, std::span<const double> grid,
                     const std::vector<int>& fold_of, int fold, const SolverOptions& solver_options)
{
    std::vector<Index> train, held;
    for (Index i = 0; i < data.Z.rows(); ++i) (fold_of[i] == fold ? held : train).push_back(i);
    const MatrixXd Z_tr = take_rows(data.Z, train);
    const VectorXd y_tr = take_rows(data.y, train);
    const MatrixXd Z_ho = take_rows(data.Z, held);
    const VectorXd y_ho = take_rows(data.y, held);
    std::optional<MatrixXd> W_tr, W_ho;
    if (data.W != nullptr) {
        W_tr = take_rows(*data.W, train);
        W_ho = take_rows(*data.W, held);
    }
    const auto prepared = prepare(Z_tr, y_tr, W_tr ? &*W_tr : nullptr, spec, data.family);
    const GroupLassoSolver solver(prepared.problem(), solver_options);
    const PathFit path = solver.fit_path(grid);

    FoldOutcome out;
    out.stats = prepared.stats;
    out.deviance.reserve(path.entries.size());
    for (const auto& e : path.entries) {
        const LinearModel m = prepared.raw_model(e.intercept, e.beta_tilde);
        const VectorXd eta = m.linear_predictor(Z_ho, W_ho ? &*W_ho : nullptr);
        out.deviance.push_back(deviance(data.family, y_ho, eta) / static_cast<double>(held.size()));
    }
    return out;
}

CVResult cross_validate_on_grid(const TrainingData& data, const GroupSpec& spec, std::vector<double> grid,
                                const TuningOptions& options)
{
    CVResult cv;
    cv.lambdas = std::move(grid);
    cv.fold_of = draw_folds(data, options.folds, options.seed, cv.fold_seed);
    std::vector<FoldOutcome> outcomes(static_cast<std::size_t>(options.folds));
    parallel_for(outcomes.size(), [&](std::size_t f) {
        outcomes[f] = run_fold(data, spec, cv.lambdas, cv.fold_of, static_cast<int>(f), options.solver);
    });
    const std::size_t L = cv.lambdas.size();
    const double F = options.folds;
    cv.mean_deviance.assign(L, 0.0);
    cv.standard_error.assign(L, 0.0);
    for (std::size_t k = 0; k < L; ++k) {
        double sum = 0.0;
        for (const auto& o : outcomes) sum += o.deviance[k];
        const double mean = sum / F;
        double ss = 0.0;
        for (const auto& o : outcomes) ss += (o.deviance[k] - mean) * (o.deviance[k] - mean);
        cv.mean_deviance[k] = mean;
        cv.standard_error[k] = std::sqrt(ss / (F - 1.0)) / std::sqrt(F);
    }
    std::tie(cv.index_min, cv.index_1se) = one_se_rule(cv.mean_deviance, cv.standard_error);
    for (auto& o : outcomes) cv.fold_stats.push_back(std::move(o.stats));
    return cv;
}

} // namespace

CVResult cross_validate(const TrainingData& data, const GroupSpec& spec, const TuningOptions& options)
{
    const auto prepared = prepare(data.Z, data.y, data.W, spec, data.family);
    const GroupLassoSolver solver(prepared.problem(), options.solver);
    return cross_validate_on_grid(data, spec, solver.lambda_grid(options.grid_size, options.min_ratio), options);
}

FitResult fit_at(const PreparedProblem& prepared, const GroupLassoSolver& solver, double lambda)
{
    const Solution s = solver.fit(lambda);
    FitResult r;
    r.lambda = lambda;
    r.intercept = s.intercept;
    r.beta_tilde = s.beta;
    r.beta = prepared.feature_coefficients(s.beta);
    r.model = prepared.raw_model(s.intercept, s.beta);
    r.active_groups = prepared.active_names(solver, s.beta);
    r.deviance = deviance(prepared.family, prepared.y, solver.linear_predictor(s.intercept, s.beta));
    const Solution null = solver.null_solution();
    r.null_deviance = deviance(prepared.family, prepared.y, solver.linear_predictor(null.intercept, null.beta));
    r.kkt_residual = s.kkt_residual;
    r.iterations = s.iterations;
    return r;
}

FitResult select_and_refit(const TrainingData& data, const GroupSpec& spec, const CVResult& cv,
                           const SolverOptions& options)
{
    const auto prepared = prepare(data.Z, data.y, data.W, spec, data.family);
    const GroupLassoSolver solver(prepared.problem(), options);
    return fit_at(prepared, solver, cv.lambda_1se());
}

TunedFit tune_and_fit(const TrainingData& data, const GroupSpec& spec, const TuningOptions& options)
{
    const auto prepared = prepare(data.Z, data.y, data.W, spec, data.family);
    const GroupLassoSolver solver(prepared.problem(), options.solver);
    auto grid = solver.lambda_grid(options.grid_size, options.min_ratio);
    TunedFit out;
    out.path = solver.fit_path(grid);
    annotate_path(out.path, prepared, solver);
    out.cv = cross_validate_on_grid(data, spec, std::move(grid), options);
    out.fit = fit_at(prepared, solver, out.cv.lambda_1se());
    return out;
}

} // namespace netcov
