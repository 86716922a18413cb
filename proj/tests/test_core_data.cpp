#include <doctest.h>

#include "netcov/core_data.hpp"
#include "netcov/errors.hpp"

using namespace netcov;

TEST_SUITE("core_data") {

TEST_CASE("feature index layout: edges first, then node-major covariates")
{
    const FeatureIndex idx(4, 2);
    CHECK(idx.n_edges() == 6);
    CHECK(idx.p() == 14);
    CHECK(idx.edge(0, 1) == 0);
    CHECK(idx.edge(0, 3) == 2);
    CHECK(idx.edge(1, 2) == 3);
    CHECK(idx.edge(2, 3) == 5);
    CHECK(idx.edge(3, 2) == 5);
    CHECK(idx.covariate(0, 0) == 6);
    CHECK(idx.covariate(1, 1) == 9);
    CHECK(idx.edge_endpoints(4) == std::pair{1, 3});
    CHECK(idx.covariate_owner(13) == std::pair{3, 1});
    for (Index c = 0; c < idx.n_edges(); ++c) {
        const auto [k, l] = idx.edge_endpoints(c);
        CHECK(idx.edge(k, l) == c);
    }
}

TEST_CASE("vectorize and devectorize round trip")
{
    const FeatureIndex idx(3, 1);
    Observation obs;
    obs.A = MatrixXd::Zero(3, 3);
    obs.A(0, 1) = obs.A(1, 0) = 1.5;
    obs.A(0, 2) = obs.A(2, 0) = -2.0;
    obs.A(1, 2) = obs.A(2, 1) = 0.25;
    obs.X = MatrixXd(3, 1);
    obs.X << 7, 8, 9;
    const VectorXd z = vectorize(obs, idx);
    REQUIRE(z.size() == 6);
    CHECK(z(0) == 1.5);
    CHECK(z(1) == -2.0);
    CHECK(z(2) == 0.25);
    CHECK(z(5) == 9);
    const Observation back = devectorize(z, idx);
    CHECK(back.A.isApprox(obs.A));
    CHECK(back.X.isApprox(obs.X));
}

TEST_CASE("vectorize rejects asymmetric or self-looped networks")
{
    const FeatureIndex idx(3, 0);
    Observation obs;
    obs.A = MatrixXd::Zero(3, 3);
    obs.A(0, 1) = 1.0;
    CHECK_THROWS_AS(vectorize(obs, idx), ShapeError);
    obs.A(1, 0) = 1.0;
    obs.A(2, 2) = 1.0;
    CHECK_THROWS_AS(vectorize(obs, idx), ShapeError);
}

TEST_CASE("community map validates labels")
{
    const std::vector<int> one_based{1, 2, 1, 3};
    const CommunityMap cm = CommunityMap::from_one_based(one_based);
    CHECK(cm.n_communities() == 3);
    CHECK(cm.members(0) == std::vector<int>{0, 2});
    CHECK(cm.sizes() == std::vector<int>{2, 1, 1});
    CHECK_THROWS_AS(CommunityMap(std::vector<int>{0, 2}), DataError);
}

TEST_CASE("family names")
{
    CHECK(parse_family("binomial") == Family::binomial);
    CHECK(to_string(Family::gaussian) == "gaussian");
    CHECK_THROWS_AS(parse_family("poisson"), ConfigError);
}

TEST_CASE("take_rows keeps order")
{
    MatrixXd m(3, 2);
    m << 1, 2, 3, 4, 5, 6;
    const std::vector<Index> rows{2, 0};
    const MatrixXd t = take_rows(m, rows);
    CHECK(t(0, 0) == 5);
    CHECK(t(1, 1) == 2);
}

}
