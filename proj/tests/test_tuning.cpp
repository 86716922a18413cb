#include <doctest.h>

#include <set>

#include "netcov/errors.hpp"
#include "netcov/tuning.hpp"
#include "test_util.hpp"

using namespace netcov;
using namespace netcov::testing;

TEST_SUITE("tuning") {

TEST_CASE("one-SE rule on a worked example")
{
    const std::vector<double> mean{10, 8, 7, 7.5};
    const std::vector<double> se{1, 1, 1, 1};
    const auto [imin, i1se] = one_se_rule(mean, se);
    CHECK(imin == 2);
    CHECK(i1se == 1);
    const std::vector<double> tight{0, 0, 0, 0};
    CHECK(one_se_rule(mean, tight).second == 2);
}

TEST_CASE("fold assignment is balanced and seeded")
{
    const auto f = assign_folds(23, 5, 99);
    std::vector<int> count(5, 0);
    for (int k : f) ++count[k];
    for (int c : count) CHECK((c == 4 || c == 5));
    CHECK(assign_folds(23, 5, 99) == f);
    CHECK(assign_folds(23, 5, 100) != f);
    CHECK_THROWS_AS(assign_folds(3, 5, 1), DataError);
}

TEST_CASE("cross-validation is deterministic and leak-free")
{
    const auto inst = random_instance(5, Family::gaussian, true, 80, 20);
    TuningOptions opt;
    opt.folds = 4;
    opt.grid_size = 15;
    opt.seed = 7;
    const TrainingData td{inst.Z, inst.y, nullptr, Family::gaussian};
    const CVResult a = cross_validate(td, inst.spec, opt);
    const CVResult b = cross_validate(td, inst.spec, opt);
    CHECK(a.mean_deviance == b.mean_deviance);
    CHECK(a.lambdas.size() == 15);
    CHECK(a.index_1se <= a.index_min);
    // Standardization statistics of each fold come from that fold's training rows only.
    REQUIRE(a.fold_stats.size() == 4);
    for (int k = 0; k < 4; ++k) {
        std::vector<Index> rows;
        for (Index i = 0; i < inst.Z.rows(); ++i)
            if (a.fold_of[i] != k) rows.push_back(i);
        const MatrixXd Zt = take_rows(inst.Z, rows);
        const VectorXd means = Zt.colwise().mean().transpose();
        CHECK((a.fold_stats[k].column_means - means).norm() < 1e-12);
    }
}

TEST_CASE("mutating a fold's held-out rows leaves its training statistics alone")
{
    const auto inst = random_instance(11, Family::gaussian, true, 60, 12);
    TuningOptions opt;
    opt.folds = 3;
    opt.grid_size = 10;
    opt.seed = 21;
    const TrainingData td{inst.Z, inst.y, nullptr, Family::gaussian};
    const CVResult a = cross_validate(td, inst.spec, opt);

    MatrixXd Z = inst.Z;
    VectorXd y = inst.y;
    for (Index i = 0; i < Z.rows(); ++i) {
        if (a.fold_of[i] != 0) continue;
        Z.row(i).array() += 100.0;
        y(i) = -50.0;
    }
    const TrainingData mutated{Z, y, nullptr, Family::gaussian};
    const CVResult b = cross_validate(mutated, inst.spec, opt);
    CHECK(b.fold_of == a.fold_of);
    CHECK(b.fold_stats[0].column_means == a.fold_stats[0].column_means);
    CHECK(b.fold_stats[0].column_sds == a.fold_stats[0].column_sds);
    CHECK(b.fold_stats[0].y_mean == a.fold_stats[0].y_mean);
    CHECK(b.fold_stats[0].y_sd == a.fold_stats[0].y_sd);
    // the other folds trained on the mutated rows
    CHECK(b.fold_stats[1].column_means != a.fold_stats[1].column_means);
}

TEST_CASE("tune_and_fit refits on the CV grid at the selected lambda")
{
    const auto inst = random_instance(6, Family::binomial, false, 120, 15);
    TuningOptions opt;
    opt.folds = 5;
    opt.grid_size = 20;
    opt.seed = 3;
    const TrainingData td{inst.Z, inst.y, nullptr, Family::binomial};
    const TunedFit t = tune_and_fit(td, inst.spec, opt);
    CHECK(t.fit.lambda == t.cv.lambda_1se());
    REQUIRE(t.path.entries.size() == t.cv.lambdas.size());
    CHECK(t.path.entries[t.cv.index_1se].beta.isApprox(t.fit.beta, 1e-6));
    CHECK(t.fit.kkt_residual <= 1e-6);
    CHECK(t.fit.deviance <= t.fit.null_deviance + 1e-12);
}

TEST_CASE("single-class training folds are reported")
{
    MatrixXd Z = MatrixXd::Random(12, 3);
    VectorXd y = VectorXd::Zero(12);
    y(0) = 1;
    TuningOptions opt;
    opt.folds = 3;
    opt.grid_size = 5;
    const TrainingData td{Z, y, nullptr, Family::binomial};
    // A single positive: some training fold always keeps it, but the held-out fold holding it
    // leaves a single-class training set.
    CHECK_THROWS_AS(cross_validate(td, singleton_groups(3), opt), DataError);
}

}
