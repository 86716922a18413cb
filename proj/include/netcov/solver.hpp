#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "netcov/core_data.hpp"

namespace netcov {

/// Gaussian: 0.5 * RSS. Binomial: -2 * sum[y*eta - log(1 + e^eta)].
double deviance(Family family, const Eigen::Ref<const VectorXd>& y, const Eigen::Ref<const VectorXd>& eta);

/// Group soft-threshold: max(0, 1 - t/||z||) z, exactly zero when ||z|| <= t.
VectorXd group_update(const Eigen::Ref<const VectorXd>& z, double t);

/// Numerically stable logistic function.
double inverse_logit(double eta);

struct SolverOptions {
    int max_iter = 10000;            // sweeps, active-set and full sweeps alike
    double tolerance = 1e-7;         // max |change| of a coefficient between sweeps
    double kkt_tolerance = 1e-6;     // relative to lambda * multiplier
    bool check_orthogonality = true;
};

/**
 * Penalized problem over a design whose group blocks satisfy X_G^T X_G = s_G I.
 *
 * Minimizes (1/N) deviance(y, mu + X beta) + lambda * sum_G m_G ||beta_G||
 * with an unpenalized intercept mu. The design and response are referenced,
 * not copied, and must outlive the problem.
 */
struct PenalizedProblem {
    Eigen::Ref<const MatrixXd> X;
    Eigen::Ref<const VectorXd> y;
    Family family = Family::gaussian;
    std::vector<Index> group_start;  // group g spans [group_start[g], group_start[g+1])
    VectorXd multipliers;
};

struct Solution {
    double intercept = 0.0;
    VectorXd beta;
    int iterations = 0;
    double kkt_residual = 0.0;
    bool converged = false;
};

struct PathEntry {
    double lambda = 0.0;
    double intercept = 0.0;
    VectorXd beta_tilde;
    VectorXd beta;                       // folded back to feature space; filled by the pipeline
    std::vector<std::string> active_groups;
    double deviance = 0.0;               // training deviance
    int iterations = 0;
    double kkt_residual = 0.0;
};

struct PathFit {
    double lambda_max = 0.0;
    std::vector<PathEntry> entries;

    std::vector<double> lambdas() const;
};

/// Thrown when a fit exhausts max_iter; carries the last iterate.
struct ConvergenceError : std::runtime_error {
    ConvergenceError(const std::string& what, Solution last, double lambda)
        : std::runtime_error(what), last_iterate(std::move(last)), lambda(lambda)
    {}
    Solution last_iterate;
    double lambda;
};

class GroupLassoSolver
{
public:
    explicit GroupLassoSolver(PenalizedProblem problem, SolverOptions options = {});

    Index n_samples() const { return problem_.X.rows(); }
    Index n_coefficients() const { return problem_.X.cols(); }
    std::size_t n_groups() const { return multipliers().size(); }
    const std::vector<Index>& group_start() const { return problem_.group_start; }
    const VectorXd& multipliers() const { return problem_.multipliers; }
    Family family() const { return problem_.family; }
    const SolverOptions& options() const { return options_; }

    /// Intercept of the model with beta = 0: mean(y) or logit(mean(y)).
    double null_intercept() const;
    Solution null_solution() const;

    /// Smallest lambda whose solution is fully sparse. Throws NumericalError when undefined.
    double lambda_max() const;

    std::vector<double> lambda_grid(int size, double min_ratio) const;

    Solution fit(double lambda, const Solution* warm_start = nullptr) const;

    /// Path over a strictly decreasing grid with warm starts; non-convergence is retried once with 10x sweeps.
    PathFit fit_path(std::span<const double> lambdas) const;
    PathFit fit_path(int grid_size = 100, double min_ratio = 0.05) const;

    VectorXd linear_predictor(double intercept, const Eigen::Ref<const VectorXd>& beta) const;

    /// Gradient of (1/N) deviance: element 0 is d/dmu, then d/dbeta.
    VectorXd gradient(double intercept, const Eigen::Ref<const VectorXd>& beta) const;

    double smooth_loss(double intercept, const Eigen::Ref<const VectorXd>& beta) const;
    double penalty(const Eigen::Ref<const VectorXd>& beta, double lambda) const;
    double objective(const Solution& s, double lambda) const;

    /**
     * Largest stationarity violation over groups and the intercept.
     *
     * Active group: ||grad_G + lambda m_G beta_G/||beta_G|| || / (lambda m_G).
     * Inactive group: max(0, ||grad_G|| - lambda m_G) / (lambda m_G).
     * At lambda = 0 the unscaled gradient norms are used.
     */
    double kkt_residual(double intercept, const Eigen::Ref<const VectorXd>& beta, double lambda) const;

    std::vector<std::size_t> active_groups(const Eigen::Ref<const VectorXd>& beta) const;

private:
    struct Workspace;

    Solution solve(double lambda, Solution start, int max_iter) const;
    double sweep(double lambda, Solution& s, VectorXd& eta, std::span<const std::size_t> groups, Workspace& ws) const;
    bool extrapolate(double lambda, Solution& s, VectorXd& eta, const std::vector<Index>& coords, Workspace& ws) const;

    PenalizedProblem problem_;
    SolverOptions options_;
    VectorXd scale_;  // s_G
};

} // namespace netcov
