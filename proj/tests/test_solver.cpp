#include <doctest.h>

#include "netcov/errors.hpp"
#include "netcov/solver.hpp"
#include "test_util.hpp"

using namespace netcov;
using namespace netcov::testing;

TEST_SUITE("solver") {

TEST_CASE("group soft-threshold")
{
    VectorXd z(2);
    z << 3, 4;
    CHECK(group_update(z, 5.0).isZero());
    CHECK(group_update(z, 6.0).isZero());
    CHECK(group_update(z, 2.5).isApprox(z * 0.5));
}

TEST_CASE("deviance and stable logistic")
{
    VectorXd y(2), eta(2);
    y << 1, 0;
    eta << 800, -800;
    CHECK(deviance(Family::binomial, y, eta) == doctest::Approx(0.0));
    eta << 0, 0;
    CHECK(deviance(Family::binomial, y, eta) == doctest::Approx(4 * std::log(2.0)));
    CHECK(deviance(Family::gaussian, y, eta) == doctest::Approx(0.5));
    CHECK(inverse_logit(-1000.0) == 0.0);
    CHECK(inverse_logit(0.0) == 0.5);
}

TEST_CASE("lambda_max on a worked two-group example")
{
    // Orthonormal design scaled so X_G^T X_G = N I with N = 4.
    MatrixXd X(4, 2);
    X << 1, 1, 1, -1, -1, 1, -1, -1;
    VectorXd y(4);
    y << 0.6, 0.0, 0.0, 0.0;
    VectorXd m(2);
    m << 1, 1;
    const GroupLassoSolver s(PenalizedProblem{X, y, Family::gaussian, {0, 1, 2}, m});
    // Centered y = (0.45, -0.15, -0.15, -0.15); |X_j^T r| / N = 0.6 / 4.
    CHECK(s.lambda_max() == doctest::Approx(0.15));
    const auto sol = s.fit(0.15);
    CHECK(sol.beta.isZero(0.0));
    const auto sol2 = s.fit(0.1);
    CHECK(sol2.beta(0) == doctest::Approx(0.05));
    CHECK(sol2.beta(1) == doctest::Approx(0.05));
}

TEST_CASE("fits satisfy KKT and match the oracle")
{
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const Family fam = seed % 2 ? Family::gaussian : Family::binomial;
        const auto inst = random_instance(seed, fam, seed % 3 == 0);
        const PreparedProblem prep = prepare(inst.Z, inst.y, nullptr, inst.spec, fam);
        const GroupLassoSolver solver(prep.problem());
        const double lam = 0.3 * solver.lambda_max();
        const Solution s = solver.fit(lam);
        CHECK(s.converged);
        CHECK(oracle_kkt(prep.problem(), s.intercept, s.beta, lam) <= 1e-6);
        const auto o = proximal_gradient_oracle(prep.problem(), lam, 20000);
        const double f = solver.objective(s, lam);
        CHECK(f == doctest::Approx(oracle_objective(prep.problem(), o.mu, o.beta, lam)).epsilon(1e-6));
        CHECK(f == doctest::Approx(oracle_objective(prep.problem(), s.intercept, s.beta, lam)).epsilon(1e-12));
    }
}

TEST_CASE("singleton groups reduce to the lasso")
{
    const auto inst = random_instance(11, Family::gaussian, false);
    const GroupSpec spec = singleton_groups(inst.Z.cols());
    const PreparedProblem prep = prepare(inst.Z, inst.y, nullptr, spec, Family::gaussian);
    const GroupLassoSolver solver(prep.problem());
    for (Index j = 0; j < prep.ortho.multipliers.size(); ++j) CHECK(prep.ortho.multipliers(j) == 1.0);
    const double lam = 0.2 * solver.lambda_max();
    const Solution s = solver.fit(lam);
    // Lasso optimality per coordinate: |grad_j| <= lam, equality with opposite sign when active.
    const VectorXd g = oracle_gradient(prep.problem(), s.intercept, s.beta);
    for (Index j = 0; j < s.beta.size(); ++j) {
        if (s.beta(j) != 0.0) {
            CHECK(g(j + 1) == doctest::Approx(-lam * (s.beta(j) > 0 ? 1.0 : -1.0)).epsilon(1e-5));
        } else {
            CHECK(std::abs(g(j + 1)) <= lam * (1 + 1e-6));
        }
    }
}

TEST_CASE("objective decreases with more sweeps")
{
    const auto inst = random_instance(21, Family::binomial, true);
    const PreparedProblem prep = prepare(inst.Z, inst.y, nullptr, inst.spec, Family::binomial);
    const double lam_max = GroupLassoSolver(prep.problem()).lambda_max();
    const double lam = 0.1 * lam_max;
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= 40; ++it) {
        SolverOptions opt;
        opt.max_iter = it;
        const GroupLassoSolver s(prep.problem(), opt);
        Solution sol;
        try {
            sol = s.fit(lam);
        } catch (const ConvergenceError& e) {
            sol = e.last_iterate;
        }
        const double f = s.objective(sol, lam);
        CHECK(f <= prev + 1e-12);
        prev = f;
    }
}

TEST_CASE("non-convergence raises with the last iterate")
{
    const auto inst = random_instance(22, Family::gaussian, true);
    const PreparedProblem prep = prepare(inst.Z, inst.y, nullptr, inst.spec, Family::gaussian);
    SolverOptions opt;
    opt.max_iter = 1;
    const GroupLassoSolver s(prep.problem(), opt);
    CHECK_THROWS_AS(s.fit(0.01 * s.lambda_max()), ConvergenceError);
}

TEST_CASE("path: grid endpoints, warm starts, monotone sparsity at the top")
{
    const auto inst = random_instance(31, Family::gaussian, false);
    const PreparedProblem prep = prepare(inst.Z, inst.y, nullptr, inst.spec, Family::gaussian);
    const GroupLassoSolver s(prep.problem());
    const auto grid = s.lambda_grid(20, 0.05);
    REQUIRE(grid.size() == 20);
    CHECK(grid.front() == s.lambda_max());
    CHECK(grid.back() == doctest::Approx(0.05 * s.lambda_max()));
    for (std::size_t k = 1; k < grid.size(); ++k) CHECK(grid[k] < grid[k - 1]);
    const PathFit path = s.fit_path(grid);
    CHECK(path.entries.front().beta_tilde.isZero(0.0));
    CHECK(path.entries.back().deviance < path.entries.front().deviance);
    for (const auto& e : path.entries) CHECK(e.kkt_residual <= 1e-6);
}

TEST_CASE("gradient matches finite differences")
{
    const auto inst = random_instance(41, Family::binomial, true);
    const PreparedProblem prep = prepare(inst.Z, inst.y, nullptr, inst.spec, Family::binomial);
    const GroupLassoSolver s(prep.problem());
    Rng rng(3);
    std::normal_distribution<double> nd(0.0, 0.3);
    VectorXd beta(s.n_coefficients());
    for (Index j = 0; j < beta.size(); ++j) beta(j) = nd(rng);
    const double mu = 0.2;
    const VectorXd g = s.gradient(mu, beta);
    const double h = 1e-5;
    CHECK((s.smooth_loss(mu + h, beta) - s.smooth_loss(mu - h, beta)) / (2 * h) == doctest::Approx(g(0)).epsilon(1e-6));
    for (Index j = 0; j < beta.size(); ++j) {
        VectorXd bp = beta, bm = beta;
        bp(j) += h;
        bm(j) -= h;
        CHECK((s.smooth_loss(mu, bp) - s.smooth_loss(mu, bm)) / (2 * h) == doctest::Approx(g(j + 1)).epsilon(1e-6));
    }
}

TEST_CASE("non-orthogonal design is rejected")
{
    MatrixXd X(3, 2);
    X << 1, 1, 1, 0, 0, 1;
    VectorXd y(3);
    y << 1, 2, 3;
    VectorXd m(1);
    m << std::sqrt(2.0);
    CHECK_THROWS(GroupLassoSolver(PenalizedProblem{X, y, Family::gaussian, {0, 2}, m}));
}

}
