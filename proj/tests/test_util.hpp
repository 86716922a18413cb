#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "netcov/grouping.hpp"
#include "netcov/pipeline.hpp"
#include "netcov/rng.hpp"
#include "netcov/solver.hpp"

namespace netcov::testing {

/// Random grouping over p features; with overlap, about a third of the groups borrow features from a neighbour.
inline GroupSpec random_groups(Index p, bool overlap, Rng& rng)
{
    GroupSpec spec;
    spec.scheme = Scheme::nbg;
    spec.p = p;
    std::uniform_int_distribution<int> width(1, 5);
    Index j = 0;
    while (j < p) {
        const Index w = std::min<Index>(width(rng), p - j);
        Group g;
        g.name = std::to_string(spec.groups.size() + 1);
        for (Index k = 0; k < w; ++k) g.features.push_back(j + k);
        spec.groups.push_back(std::move(g));
        j += w;
    }
    if (overlap) {
        std::uniform_int_distribution<Index> feat(0, p - 1);
        for (std::size_t g = 0; g < spec.groups.size(); g += 3) {
            auto& f = spec.groups[g].features;
            for (int t = 0; t < 2; ++t) f.push_back(feat(rng));
            std::sort(f.begin(), f.end());
            f.erase(std::unique(f.begin(), f.end()), f.end());
        }
    }
    return spec;
}

struct RandomInstance {
    MatrixXd Z;
    VectorXd y;
    GroupSpec spec;
    Family family = Family::gaussian;
};

/// N x p Gaussian design with a sparse signal through the first few features.
inline RandomInstance random_instance(std::uint64_t seed, Family family, bool overlap, Index N = 50, Index p_max = 30)
{
    Rng rng(seed);
    std::uniform_int_distribution<Index> pick_p(5, p_max);
    std::normal_distribution<double> normal(0.0, 1.0);
    RandomInstance inst;
    inst.family = family;
    const Index p = pick_p(rng);
    inst.Z.resize(N, p);
    for (Index i = 0; i < N; ++i)
        for (Index j = 0; j < p; ++j) inst.Z(i, j) = normal(rng);
    VectorXd beta = VectorXd::Zero(p);
    for (Index j = 0; j < std::min<Index>(4, p); ++j) beta(j) = 0.8 * normal(rng);
    const VectorXd eta = inst.Z * beta;
    inst.y.resize(N);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (Index i = 0; i < N; ++i) {
        inst.y(i) = family == Family::gaussian ? eta(i) + normal(rng) : (unif(rng) < inverse_logit(eta(i)) ? 1.0 : 0.0);
    }
    if (family == Family::binomial && (inst.y.sum() < 2 || inst.y.sum() > N - 2)) inst.y.head(N / 2).setOnes();
    inst.spec = random_groups(p, overlap, rng);
    return inst;
}

/// (1/N) deviance gradient in [mu, beta] written out independently of the solver.
inline VectorXd oracle_gradient(const PenalizedProblem& pr, double mu, const VectorXd& beta)
{
    const double N = static_cast<double>(pr.X.rows());
    VectorXd eta = pr.X * beta;
    eta.array() += mu;
    VectorXd r(eta.size());
    for (Index i = 0; i < eta.size(); ++i) {
        r(i) = pr.family == Family::gaussian ? pr.y(i) - eta(i) : 2.0 * (pr.y(i) - 1.0 / (1.0 + std::exp(-eta(i))));
    }
    VectorXd g(beta.size() + 1);
    g(0) = -r.sum() / N;
    g.tail(beta.size()) = -(pr.X.transpose() * r) / N;
    return g;
}

inline double oracle_objective(const PenalizedProblem& pr, double mu, const VectorXd& beta, double lambda)
{
    const double N = static_cast<double>(pr.X.rows());
    VectorXd eta = pr.X * beta;
    eta.array() += mu;
    double loss = 0.0;
    for (Index i = 0; i < eta.size(); ++i) {
        if (pr.family == Family::gaussian) {
            loss += 0.5 * (pr.y(i) - eta(i)) * (pr.y(i) - eta(i));
        } else {
            const double sp = eta(i) > 0 ? eta(i) + std::log1p(std::exp(-eta(i))) : std::log1p(std::exp(eta(i)));
            loss += -2.0 * (pr.y(i) * eta(i) - sp);
        }
    }
    double pen = 0.0;
    for (std::size_t g = 0; g + 1 < pr.group_start.size(); ++g) {
        const Index a = pr.group_start[g], b = pr.group_start[g + 1];
        pen += pr.multipliers(static_cast<Index>(g)) * beta.segment(a, b - a).norm();
    }
    return loss / N + lambda * pen;
}

struct OracleResult {
    double mu = 0.0;
    VectorXd beta;
};

/// Accelerated proximal gradient with a fixed 1/L step; no code shared with the solver.
inline OracleResult proximal_gradient_oracle(const PenalizedProblem& pr, double lambda, int iterations = 100000)
{
    const Index N = pr.X.rows(), p = pr.X.cols();
    MatrixXd X1(N, p + 1);
    X1.col(0).setOnes();
    X1.rightCols(p) = pr.X;
    const double smax = Eigen::JacobiSVD<MatrixXd>(X1).singularValues()(0);
    const double curvature = pr.family == Family::gaussian ? 1.0 : 0.5;
    const double L = curvature * smax * smax / static_cast<double>(N);
    const double step = 1.0 / L;

    VectorXd x = VectorXd::Zero(p + 1), x_prev = x, v = x;
    double t = 1.0;
    double best = std::numeric_limits<double>::infinity();
    VectorXd best_x = x;
    for (int it = 0; it < iterations; ++it) {
        const VectorXd g = oracle_gradient(pr, v(0), v.tail(p));
        VectorXd z = v - step * g;
        for (std::size_t k = 0; k + 1 < pr.group_start.size(); ++k) {
            const Index a = pr.group_start[k] + 1, b = pr.group_start[k + 1] + 1;
            const double thr = step * lambda * pr.multipliers(static_cast<Index>(k));
            const double nz = z.segment(a, b - a).norm();
            z.segment(a, b - a) *= nz > thr ? 1.0 - thr / nz : 0.0;
        }
        x_prev = x;
        x = z;
        // Adaptive restart keeps the method monotone enough to converge tightly.
        const double obj = oracle_objective(pr, x(0), x.tail(p), lambda);
        if (obj < best) {
            best = obj;
            best_x = x;
        }
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        if ((v - x).dot(x - x_prev) > 0.0) {
            t = 1.0;
            v = x;
        } else {
            v = x + ((t - 1.0) / t_next) * (x - x_prev);
            t = t_next;
        }
    }
    return {best_x(0), best_x.tail(p)};
}

/// Stationarity residual relative to lambda * m_G, computed from the oracle gradient.
inline double oracle_kkt(const PenalizedProblem& pr, double mu, const VectorXd& beta, double lambda)
{
    const VectorXd g = oracle_gradient(pr, mu, beta);
    double worst = std::abs(g(0)) / std::max(lambda, 1e-300);
    for (std::size_t k = 0; k + 1 < pr.group_start.size(); ++k) {
        const Index a = pr.group_start[k], b = pr.group_start[k + 1];
        const double scale = lambda * pr.multipliers(static_cast<Index>(k));
        const VectorXd gg = g.segment(a + 1, b - a);
        const VectorXd bg = beta.segment(a, b - a);
        const double nb = bg.norm();
        const double res = nb > 0.0 ? (gg + scale * bg / nb).norm() : std::max(0.0, gg.norm() - scale);
        worst = std::max(worst, res / scale);
    }
    return worst;
}

} // namespace netcov::testing
