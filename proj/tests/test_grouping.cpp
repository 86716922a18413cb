#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "netcov/errors.hpp"
#include "netcov/grouping.hpp"

using namespace netcov;

namespace {

CommunityMap toy_map()
{
    // Nodes 0,1 in community 1; nodes 2,3,4 in community 2.
    return CommunityMap(std::vector<int>{0, 0, 1, 1, 1});
}

} // namespace

TEST_SUITE("grouping") {

TEST_CASE("blocks and cells partition the features")
{
    const FeatureIndex idx(5, 1);
    const auto cm = toy_map();
    const auto b = blocks(cm, idx);
    const auto c = cells(cm, idx);
    REQUIRE(b.size() == 2);
    REQUIRE(c.size() == 3);
    CHECK(b[0] == std::vector<Index>{idx.covariate(0, 0), idx.covariate(1, 0)});
    CHECK(c[0] == std::vector<Index>{idx.edge(0, 1)});
    CHECK(c[1].size() == 6);
    CHECK(c[2].size() == 3);
    std::set<Index> all;
    for (const auto& v : b) all.insert(v.begin(), v.end());
    for (const auto& v : c) all.insert(v.begin(), v.end());
    CHECK(static_cast<Index>(all.size()) == idx.p());
    CHECK(cell_position(1, 0, 2) == 1);
    CHECK(cell_position(1, 1, 2) == 2);
}

TEST_CASE("cell positions for K = 4")
{
    std::size_t expected = 0;
    for (int a = 0; a < 4; ++a)
        for (int b = a; b < 4; ++b) CHECK(cell_position(a, b, 4) == expected++);
}

TEST_CASE("NBG and EBG membership")
{
    const FeatureIndex idx(5, 1);
    const auto cm = toy_map();
    const GroupSpec nbg = nbg_groups(cm, idx);
    REQUIRE(nbg.size() == 2);
    CHECK(nbg.groups[0].name == "1");
    // Block 1 (2) + cell (1,1) (1) + cell (1,2) (6).
    CHECK(nbg.groups[0].features.size() == 9);
    CHECK(nbg.groups[1].features.size() == 3 + 3 + 6);
    const auto mult = nbg.multiplicity();
    CHECK(mult[idx.edge(0, 2)] == 2);
    CHECK(mult[idx.edge(0, 1)] == 1);

    const GroupSpec ebg = ebg_groups(cm, idx);
    REQUIRE(ebg.size() == 3);
    CHECK(ebg.groups[1].name == "(1,2)");
    CHECK(ebg.groups[1].features.size() == 6 + 2 + 3);
    CHECK(ebg.find("(2,1)") == 1);
    CHECK(ebg.find("(1,2)") == 1);
    CHECK_THROWS_AS(ebg.find("(1,9)"), ConfigError);
    // Node covariates of community 1 sit in (1,1) and (1,2).
    CHECK(ebg.multiplicity()[idx.covariate(0, 0)] == 2);
}

TEST_CASE("singletons and scheme names")
{
    const GroupSpec s = singleton_groups(4);
    CHECK(s.size() == 4);
    CHECK(s.groups[3].name == "4");
    CHECK(parse_scheme("lasso") == Scheme::singleton);
    CHECK(to_string(Scheme::singleton) == "lasso");
    CHECK_THROWS_AS(parse_scheme("xyz"), ConfigError);
}

TEST_CASE("expansion and fold-back")
{
    const FeatureIndex idx(5, 1);
    const GroupSpec nbg = nbg_groups(toy_map(), idx);
    const ExpansionMap map = expand(nbg);
    Index total = 0;
    for (const auto& g : nbg.groups) total += static_cast<Index>(g.features.size());
    CHECK(map.p_star() == total);
    MatrixXd Z = MatrixXd::Random(4, idx.p());
    const MatrixXd Zs = expand_design(Z, map);
    for (Index c = 0; c < map.p_star(); ++c) CHECK(Zs.col(c) == Z.col(map.expanded_to_original[c]));
    const VectorXd bstar = VectorXd::Random(map.p_star());
    const VectorXd b = fold_back(bstar, map);
    CHECK((Zs * bstar - Z * b).norm() < 1e-12);
}

TEST_CASE("empty groups are dropped")
{
    // One-node community: its EBG diagonal cell is empty, but the block is not.
    const FeatureIndex idx(3, 0);
    const CommunityMap cm(std::vector<int>{0, 1, 1});
    const GroupSpec ebg = ebg_groups(cm, idx);
    for (const auto& g : ebg.groups) CHECK(!g.features.empty());
    CHECK(ebg.size() == 2);
}

TEST_CASE("Power layout group sizes")
{
    const auto sizes = power_system_sizes();
    REQUIRE(sizes.size() == 13);
    int n = 0;
    for (int s : sizes) n += s;
    CHECK(n == 236);
    const CommunityMap cm = contiguous_communities(sizes);
    const FeatureIndex idx(236, 1);
    const GroupSpec nbg = nbg_groups(cm, idx);
    std::size_t smallest = nbg.groups[0].features.size();
    for (const auto& g : nbg.groups) smallest = std::min(smallest, g.features.size());
    CHECK(smallest == 938);
    CHECK(ebg_groups(cm, idx).size() == 91);
}

TEST_CASE("community splitting")
{
    const CommunityMap cm = contiguous_communities(power_system_sizes());
    const CommunityMap split = split_communities(cm, 5, 17);
    CHECK(split.n_communities() == 50);
    std::map<int, int> hist;
    for (int s : split.sizes()) ++hist[s];
    CHECK(hist == std::map<int, int>{{4, 15}, {5, 34}, {6, 1}});
    // Chunks never straddle original communities.
    for (int k = 0; k < split.n_communities(); ++k) {
        const auto m = split.members(k);
        for (int node : m) CHECK(cm.label(node) == cm.label(m.front()));
    }
    CHECK(split_communities(cm, 5, 17) == split);
    CHECK_FALSE(split_communities(cm, 5, 18) == split);
    CHECK_THROWS_AS(split_communities(cm, 1, 1), ConfigError);
}

}
