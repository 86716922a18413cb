#include "netcov/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "netcov/errors.hpp"

namespace netcov {

namespace {

// log(1 + e^eta) without overflow.
double softplus(double eta) { return std::max(eta, 0.0) + std::log1p(std::exp(-std::abs(eta))); }

// Curvature bound of the binomial (1/N)-scaled deviance per observation: 2 * 1/4.
constexpr double binomial_curvature = 0.5;

} // namespace

double inverse_logit(double eta)
{
    if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
    const double e = std::exp(eta);
    return e / (1.0 + e);
}

double deviance(Family family, const Eigen::Ref<const VectorXd>& y, const Eigen::Ref<const VectorXd>& eta)
{
    if (y.size() != eta.size()) throw ShapeError("response and linear predictor lengths differ");
    double total = 0.0;
    if (family == Family::gaussian) {
        for (Index i = 0; i < y.size(); ++i) {
            const double r = y(i) - eta(i);
            total += r * r;
        }
        return 0.5 * total;
    }
    for (Index i = 0; i < y.size(); ++i) total += y(i) * eta(i) - softplus(eta(i));
    return -2.0 * total;
}

VectorXd group_update(const Eigen::Ref<const VectorXd>& z, double t)
{
    const double norm = z.norm();
    if (norm <= t) return VectorXd::Zero(z.size());
    return (1.0 - t / norm) * z;
}

std::vector<double> PathFit::lambdas() const
{
    std::vector<double> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.lambda);
    return out;
}

GroupLassoSolver::GroupLassoSolver(PenalizedProblem problem, SolverOptions options)
    : problem_(std::move(problem)), options_(options)
{
    const auto& X = problem_.X;
    const auto& starts = problem_.group_start;
    if (problem_.y.size() != X.rows()) throw ShapeError("response length does not match design rows");
    if (starts.empty() || starts.front() != 0 || starts.back() != X.cols()) {
        throw ShapeError("group boundaries do not cover the design columns");
    }
    if (static_cast<std::size_t>(problem_.multipliers.size()) + 1 != starts.size()) {
        throw ShapeError("one multiplier per group is required");
    }
    if (X.rows() < 1) throw DataError("empty design");
    if (problem_.family == Family::binomial) {
        for (Index i = 0; i < problem_.y.size(); ++i) {
            if (problem_.y(i) != 0.0 && problem_.y(i) != 1.0) throw DataError("binomial response must be 0/1");
        }
    }
    scale_.resize(problem_.multipliers.size());
    for (std::size_t g = 0; g + 1 < starts.size(); ++g) {
        const Index width = starts[g + 1] - starts[g];
        if (width <= 0) throw ShapeError("empty group in penalized problem");
        if (!(problem_.multipliers(static_cast<Index>(g)) > 0.0)) throw DataError("group multipliers must be positive");
        const auto block = X.middleCols(starts[g], width);
        const double s = block.squaredNorm() / static_cast<double>(width);
        if (!(s > 0.0)) throw DataError("group " + std::to_string(g + 1) + " has an all-zero column block");
        if (options_.check_orthogonality) {
            MatrixXd gram = block.transpose() * block;
            gram.diagonal().array() -= s;
            if (gram.cwiseAbs().maxCoeff() > 1e-8 * s) {
                throw DataError("group " + std::to_string(g + 1) + " is not orthonormalized");
            }
        }
        scale_(static_cast<Index>(g)) = s;
    }
}

double GroupLassoSolver::null_intercept() const
{
    const double ybar = problem_.y.mean();
    if (problem_.family == Family::gaussian) return ybar;
    if (ybar <= 0.0 || ybar >= 1.0) throw NumericalError("binomial response has a single class");
    return std::log(ybar / (1.0 - ybar));
}

Solution GroupLassoSolver::null_solution() const
{
    Solution s;
    s.intercept = null_intercept();
    s.beta = VectorXd::Zero(n_coefficients());
    s.converged = true;
    return s;
}

VectorXd GroupLassoSolver::linear_predictor(double intercept, const Eigen::Ref<const VectorXd>& beta) const
{
    VectorXd eta = problem_.X * beta;
    eta.array() += intercept;
    return eta;
}

VectorXd GroupLassoSolver::gradient(double intercept, const Eigen::Ref<const VectorXd>& beta) const
{
    const VectorXd eta = linear_predictor(intercept, beta);
    VectorXd r(eta.size());
    if (problem_.family == Family::gaussian) {
        r = problem_.y - eta;
    } else {
        for (Index i = 0; i < eta.size(); ++i) r(i) = 2.0 * (problem_.y(i) - inverse_logit(eta(i)));
    }
    const double n = static_cast<double>(n_samples());
    VectorXd g(n_coefficients() + 1);
    g(0) = -r.sum() / n;
    g.tail(n_coefficients()).noalias() = -(problem_.X.transpose() * r) / n;
    return g;
}

double GroupLassoSolver::smooth_loss(double intercept, const Eigen::Ref<const VectorXd>& beta) const
{
    return deviance(problem_.family, problem_.y, linear_predictor(intercept, beta)) / static_cast<double>(n_samples());
}

double GroupLassoSolver::penalty(const Eigen::Ref<const VectorXd>& beta, double lambda) const
{
    const auto& starts = problem_.group_start;
    double total = 0.0;
    for (std::size_t g = 0; g + 1 < starts.size(); ++g) {
        total += problem_.multipliers(static_cast<Index>(g)) * beta.segment(starts[g], starts[g + 1] - starts[g]).norm();
    }
    return lambda * total;
}

double GroupLassoSolver::objective(const Solution& s, double lambda) const
{
    return smooth_loss(s.intercept, s.beta) + penalty(s.beta, lambda);
}

double GroupLassoSolver::kkt_residual(double intercept, const Eigen::Ref<const VectorXd>& beta, double lambda) const
{
    const VectorXd g = gradient(intercept, beta);
    const auto& starts = problem_.group_start;
    const double min_mult = problem_.multipliers.minCoeff();
    double worst = lambda > 0.0 ? std::abs(g(0)) / (lambda * min_mult) : std::abs(g(0));
    for (std::size_t k = 0; k + 1 < starts.size(); ++k) {
        const Index w = starts[k + 1] - starts[k];
        const auto gk = g.segment(1 + starts[k], w);
        const auto bk = beta.segment(starts[k], w);
        const double bound = lambda * problem_.multipliers(static_cast<Index>(k));
        const double bnorm = bk.norm();
        double res;
        if (bound == 0.0) {
            res = gk.norm();
        } else if (bnorm > 0.0) {
            res = (gk + (bound / bnorm) * bk).norm() / bound;
        } else {
            res = std::max(0.0, gk.norm() - bound) / bound;
        }
        worst = std::max(worst, res);
    }
    return worst;
}

std::vector<std::size_t> GroupLassoSolver::active_groups(const Eigen::Ref<const VectorXd>& beta) const
{
    const auto& starts = problem_.group_start;
    std::vector<std::size_t> out;
    for (std::size_t g = 0; g + 1 < starts.size(); ++g) {
        if (!beta.segment(starts[g], starts[g + 1] - starts[g]).isZero(0.0)) out.push_back(g);
    }
    return out;
}

double GroupLassoSolver::lambda_max() const
{
    const double mu0 = null_intercept();
    if (problem_.family == Family::gaussian) {
        const double spread = (problem_.y.array() - mu0).abs().maxCoeff();
        if (!(spread > 0.0)) throw NumericalError("response is constant; lambda_max is undefined");
    }
    const VectorXd g = gradient(mu0, VectorXd::Zero(n_coefficients()));
    const auto& starts = problem_.group_start;
    double lmax = 0.0;
    for (std::size_t k = 0; k + 1 < starts.size(); ++k) {
        const double norm = g.segment(1 + starts[k], starts[k + 1] - starts[k]).norm();
        lmax = std::max(lmax, norm / problem_.multipliers(static_cast<Index>(k)));
    }
    if (!(lmax > 0.0)) throw NumericalError("response is orthogonal to every group; the lambda path degenerates");
    return lmax;
}

std::vector<double> GroupLassoSolver::lambda_grid(int size, double min_ratio) const
{
    if (size < 2) throw ConfigError("lambda grid needs at least 2 points");
    if (!(min_ratio > 0.0 && min_ratio < 1.0)) throw ConfigError("min_ratio must lie in (0, 1)");
    const double lmax = lambda_max();
    std::vector<double> grid(static_cast<std::size_t>(size));
    const double log_ratio = std::log(min_ratio);
    for (int k = 0; k < size; ++k) grid[k] = lmax * std::exp(log_ratio * k / (size - 1));
    grid.front() = lmax;
    grid.back() = lmax * min_ratio;
    return grid;
}

// Scratch buffers reused across sweeps, plus the iterate history for extrapolation.
struct GroupLassoSolver::Workspace {
    VectorXd r;
    VectorXd r0;
    VectorXd z;
    std::vector<VectorXd> history;  // [intercept, beta on the active coordinates] after each sweep
};

namespace {

// Sweeps between extrapolation attempts.
constexpr std::size_t anderson_depth = 5;

} // namespace

double GroupLassoSolver::sweep(double lambda, Solution& s, VectorXd& eta, std::span<const std::size_t> groups,
                               Workspace& ws) const
{
    const auto& X = problem_.X;
    const auto& y = problem_.y;
    const auto& starts = problem_.group_start;
    const double n = static_cast<double>(n_samples());
    const bool gaussian = problem_.family == Family::gaussian;
    // Working residual of the quadratic surrogate: exact for gaussian, MM bound for binomial.
    auto& r = ws.r;
    double curvature = 1.0;
    if (gaussian) {
        r = y - eta;
    } else {
        curvature = binomial_curvature;
        r.resize(eta.size());
        for (Index i = 0; i < eta.size(); ++i) r(i) = (2.0 / curvature) * (y(i) - inverse_logit(eta(i)));
    }

    const double shift = r.mean();
    s.intercept += shift;
    r.array() -= shift;
    ws.r0 = r;
    double max_change = std::abs(shift);

    for (std::size_t g : groups) {
        const Index start = starts[g];
        const Index width = starts[g + 1] - start;
        const double sg = scale_(static_cast<Index>(g));
        const double t = n * lambda * problem_.multipliers(static_cast<Index>(g)) / (curvature * sg);
        if (width == 1) {
            const auto xj = X.col(start);
            double& bj = s.beta(start);
            const double zj = xj.dot(r) / sg + bj;
            const double az = std::abs(zj);
            const double bnew = az <= t ? 0.0 : (1.0 - t / az) * zj;
            const double delta = bnew - bj;
            if (delta != 0.0) {
                r.noalias() -= delta * xj;
                bj = bnew;
                max_change = std::max(max_change, std::abs(delta));
            }
            continue;
        }
        const auto Xg = X.middleCols(start, width);
        auto bg = s.beta.segment(start, width);
        auto z = ws.z.head(width);
        z.noalias() = Xg.transpose() * r;
        z /= sg;
        z += bg;
        const double norm = z.norm();
        if (norm <= t) {
            z.setZero();
        } else {
            z *= 1.0 - t / norm;
        }
        // z now holds the new block; reuse it for the step.
        z -= bg;
        const double change = z.cwiseAbs().maxCoeff();
        if (change > 0.0) {
            r.noalias() -= Xg * z;
            bg += z;
            max_change = std::max(max_change, change);
        }
    }
    // eta moves by the intercept shift plus X * (change in beta) = r0 - r.
    eta.array() += shift;
    eta += ws.r0 - r;
    return max_change;
}

// Anderson extrapolation over the last few active-set sweeps; kept only if the objective drops.
bool GroupLassoSolver::extrapolate(double lambda, Solution& s, VectorXd& eta, const std::vector<Index>& coords,
                                   Workspace& ws) const
{
    auto& h = ws.history;
    const Index dim = static_cast<Index>(coords.size()) + 1;
    const Index m = static_cast<Index>(h.size()) - 1;
    MatrixXd R(dim, m);
    for (Index k = 0; k < m; ++k) R.col(k) = h[k + 1] - h[k];
    MatrixXd G = R.transpose() * R;
    G.diagonal().array() += 1e-10 * std::max(G.trace(), 1e-300);
    VectorXd c = G.ldlt().solve(VectorXd::Ones(m));
    const double total = c.sum();
    if (!std::isfinite(total) || std::abs(total) < 1e-300) {
        h.clear();
        return false;
    }
    c /= total;
    VectorXd x = VectorXd::Zero(dim);
    for (Index k = 0; k < m; ++k) x += c(k) * h[k + 1];
    h.clear();
    if (!x.allFinite()) return false;

    Solution cand = s;
    cand.intercept = x(0);
    for (std::size_t k = 0; k < coords.size(); ++k) cand.beta(coords[k]) = x(static_cast<Index>(k) + 1);
    VectorXd eta_c = VectorXd::Constant(n_samples(), cand.intercept);
    for (Index j : coords) {
        if (cand.beta(j) != 0.0) eta_c.noalias() += cand.beta(j) * problem_.X.col(j);
    }
    const double n = static_cast<double>(n_samples());
    const double f_now = deviance(problem_.family, problem_.y, eta) / n + penalty(s.beta, lambda);
    const double f_cand = deviance(problem_.family, problem_.y, eta_c) / n + penalty(cand.beta, lambda);
    if (!(f_cand < f_now)) return false;
    s = std::move(cand);
    eta = std::move(eta_c);
    return true;
}

Solution GroupLassoSolver::solve(double lambda, Solution s, int max_iter) const
{
    std::vector<std::size_t> all(n_groups());
    std::iota(all.begin(), all.end(), std::size_t{0});
    Workspace ws;
    Index widest = 0;
    for (std::size_t g = 0; g < n_groups(); ++g) widest = std::max(widest, problem_.group_start[g + 1] - problem_.group_start[g]);
    ws.z.resize(widest);
    VectorXd eta = linear_predictor(s.intercept, s.beta);
    double tol = options_.tolerance;
    int iter = 0;
    s.converged = false;
    while (iter < max_iter) {
        const double full_change = sweep(lambda, s, eta, all, ws);
        ++iter;
        if (full_change < tol) {
            s.kkt_residual = kkt_residual(s.intercept, s.beta, lambda);
            if (s.kkt_residual <= options_.kkt_tolerance) {
                s.converged = true;
                break;
            }
            tol = std::max(tol * 0.1, 1e-15);
            // Re-anchor eta against accumulated rounding before tightening.
            eta = linear_predictor(s.intercept, s.beta);
            continue;
        }
        const auto active = active_groups(s.beta);
        std::vector<Index> coords;
        for (std::size_t g : active)
            for (Index j = problem_.group_start[g]; j < problem_.group_start[g + 1]; ++j) coords.push_back(j);
        const auto snapshot = [&] {
            VectorXd x(static_cast<Index>(coords.size()) + 1);
            x(0) = s.intercept;
            for (std::size_t k = 0; k < coords.size(); ++k) x(static_cast<Index>(k) + 1) = s.beta(coords[k]);
            return x;
        };
        ws.history.clear();
        while (iter < max_iter) {
            const double change = sweep(lambda, s, eta, active, ws);
            ++iter;
            if (change < tol) break;
            ws.history.push_back(snapshot());
            if (ws.history.size() == anderson_depth + 1) extrapolate(lambda, s, eta, coords, ws);
        }
    }
    s.iterations = iter;
    if (!s.converged) {
        s.kkt_residual = kkt_residual(s.intercept, s.beta, lambda);
        throw ConvergenceError("group descent did not converge in " + std::to_string(max_iter) +
                                   " sweeps (lambda=" + std::to_string(lambda) +
                                   ", KKT residual=" + std::to_string(s.kkt_residual) + ")",
                               s, lambda);
    }
    return s;
}

Solution GroupLassoSolver::fit(double lambda, const Solution* warm_start) const
{
    if (!(lambda >= 0.0)) throw ConfigError("lambda must be non-negative");
    double lmax = -1.0;
    try {
        lmax = lambda_max();
    } catch (const NumericalError&) {
        // No sparse shortcut when lambda_max is undefined.
    }
    if (lmax > 0.0 && lambda >= lmax) {
        Solution s = null_solution();
        s.kkt_residual = kkt_residual(s.intercept, s.beta, lambda);
        return s;
    }
    Solution start;
    if (warm_start != nullptr) {
        if (warm_start->beta.size() != n_coefficients()) throw ShapeError("warm start has the wrong length");
        start = *warm_start;
    } else {
        start.beta = VectorXd::Zero(n_coefficients());
        start.intercept = problem_.family == Family::gaussian ? problem_.y.mean() : 0.0;
    }
    return solve(lambda, std::move(start), options_.max_iter);
}

PathFit GroupLassoSolver::fit_path(std::span<const double> lambdas) const
{
    for (std::size_t k = 1; k < lambdas.size(); ++k) {
        if (!(lambdas[k] < lambdas[k - 1])) throw ConfigError("lambda grid must be strictly decreasing");
    }
    PathFit path;
    path.lambda_max = lambda_max();
    Solution current = null_solution();
    for (double lambda : lambdas) {
        Solution next;
        try {
            next = fit(lambda, &current);
        } catch (const ConvergenceError&) {
            if (lambda >= path.lambda_max) throw;
            Solution start = current;
            next = solve(lambda, std::move(start), options_.max_iter * 10);
        }
        PathEntry e;
        e.lambda = lambda;
        e.intercept = next.intercept;
        e.beta_tilde = next.beta;
        e.deviance = deviance(problem_.family, problem_.y, linear_predictor(next.intercept, next.beta));
        e.iterations = next.iterations;
        e.kkt_residual = next.kkt_residual;
        path.entries.push_back(std::move(e));
        current = std::move(next);
    }
    return path;
}

PathFit GroupLassoSolver::fit_path(int grid_size, double min_ratio) const
{
    const auto grid = lambda_grid(grid_size, min_ratio);
    return fit_path(std::span<const double>(grid));
}

} // namespace netcov
