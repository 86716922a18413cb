#include <doctest.h>

#include "netcov/errors.hpp"
#include "netcov/simgen.hpp"

using namespace netcov;

TEST_SUITE("simgen") {

TEST_CASE("presets and true coefficients")
{
    CHECK(preset_active_groups(Scheme::ebg, 5).size() == 5);
    CHECK(preset_active_groups(Scheme::nbg, 1) == std::vector<std::string>{"1"});
    CHECK_THROWS_AS(preset_active_groups(Scheme::ebg, 3), ConfigError);

    const FeatureIndex idx(12, 1);
    const CommunityMap cm = contiguous_communities({4, 4, 4});
    const GroupSpec ebg = ebg_groups(cm, idx);
    const GroundTruth t = make_beta(ebg, {"(1,1)"}, 0.3);
    // Cell (1,1): 6 edges; block 1: 4 covariates.
    CHECK(t.support.size() == 10);
    CHECK(t.beta.sum() == doctest::Approx(3.0));
    // Overlapping active groups share coordinates: still alpha, not 2 alpha.
    const GroundTruth t2 = make_beta(ebg, {"(1,1)", "(1,2)"}, 0.3);
    CHECK(t2.beta.maxCoeff() == 0.3);
}

TEST_CASE("synthetic cells are reproducible and sized as configured")
{
    ExperimentConfig c;
    c.communities = 3;
    c.nodes_per_community = 4;
    c.n_train = 50;
    c.n_test = 20;
    c.alpha = 0.5;
    const SimulatedCell a = simulate_cell(c, 42);
    const SimulatedCell b = simulate_cell(c, 42);
    CHECK(a.data.Z == b.data.Z);
    CHECK(a.data.y == b.data.y);
    CHECK(a.data.Z.rows() == 70);
    CHECK(a.data.Z.cols() == 66 + 12);
    CHECK(a.data.train_rows.size() == 50);
    CHECK(a.data.test_rows.size() == 20);
    CHECK(a.difficulty > 0.0);
    const SimulatedCell d = simulate_cell(c, 43);
    CHECK(d.data.y != a.data.y);
}

TEST_CASE("difficulty at beta = 0")
{
    MatrixXd Z = MatrixXd::Random(30, 4);
    GroundTruth t;
    t.beta = VectorXd::Zero(4);
    CHECK(scenario_difficulty(Z, t, Family::gaussian) == 0.0);
    CHECK(scenario_difficulty(Z, t, Family::binomial) == 0.5);
}

TEST_CASE("binomial responses are 0/1")
{
    ExperimentConfig c;
    c.family = Family::binomial;
    c.communities = 2;
    c.nodes_per_community = 3;
    c.n_train = 40;
    c.n_test = 0;
    const SimulatedCell s = simulate_cell(c, 1);
    for (Index i = 0; i < s.data.y.size(); ++i) CHECK((s.data.y(i) == 0.0 || s.data.y(i) == 1.0));
    CHECK(s.difficulty < 0.5);
}

TEST_CASE("alpha grid spans the SNR range")
{
    const auto g = alpha_grid(3, 10, 0.01, 100.0);
    REQUIRE(g.size() == 3);
    CHECK(g[0] * g[0] * 10 == doctest::Approx(0.01));
    CHECK(g[1] * g[1] * 10 == doctest::Approx(1.0));
    CHECK(g[2] * g[2] * 10 == doctest::Approx(100.0));
}

TEST_CASE("invalid configs")
{
    ExperimentConfig c;
    c.alpha = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.alpha = 1;
    c.scheme = Scheme::singleton;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

}
