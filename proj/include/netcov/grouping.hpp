#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "netcov/core_data.hpp"

namespace netcov {

enum class Scheme { nbg, ebg, singleton };

std::string_view to_string(Scheme s);
/// Accepts nbg, ebg, lasso / singleton (case-sensitive, lower case).
Scheme parse_scheme(std::string_view s);

struct Group {
    std::string name;
    std::vector<Index> features;  // ascending, 0-based

    bool operator==(const Group&) const = default;
};

/// Ordered, possibly overlapping groups over features 0..p-1.
struct GroupSpec {
    Scheme scheme = Scheme::singleton;
    Index p = 0;
    std::vector<Group> groups;

    std::size_t size() const { return groups.size(); }
    /// Position of the named group; EBG names are accepted in either order, "(3,1)" == "(1,3)".
    std::size_t find(std::string_view name) const;
    /// Number of groups each feature belongs to.
    std::vector<int> multiplicity() const;
};

/// Names: NBG "k", EBG "(k,k')" with k<=k', singleton "j"; all 1-based.
std::string nbg_name(int community);
std::string ebg_name(int k1, int k2);

/// Index sets G_X^k: node-covariate coordinates of the nodes in community k.
std::vector<std::vector<Index>> blocks(const CommunityMap& cm, const FeatureIndex& idx);

/// Index sets G_A^{k,k'} for k<=k', ordered (1,1),(1,2),..,(1,K),(2,2),...
std::vector<std::vector<Index>> cells(const CommunityMap& cm, const FeatureIndex& idx);

/// Position of cell (k1,k2) (0-based communities, any order) in the cells() list.
std::size_t cell_position(int k1, int k2, int n_communities);

GroupSpec nbg_groups(const CommunityMap& cm, const FeatureIndex& idx);
GroupSpec ebg_groups(const CommunityMap& cm, const FeatureIndex& idx);
GroupSpec singleton_groups(Index p);
GroupSpec make_groups(Scheme scheme, const CommunityMap& cm, const FeatureIndex& idx);

/**
 * Map from the duplicated (non-overlapping) coordinate space back to features.
 *
 * Expanded coordinates are laid out group by group in GroupSpec order, each
 * group's features ascending. Group g occupies [group_start[g], group_start[g+1]).
 */
struct ExpansionMap {
    Index p = 0;
    std::vector<Index> expanded_to_original;
    std::vector<Index> group_start;

    Index p_star() const { return static_cast<Index>(expanded_to_original.size()); }
    std::size_t n_groups() const { return group_start.empty() ? 0 : group_start.size() - 1; }
    Index group_size(std::size_t g) const { return group_start[g + 1] - group_start[g]; }
};

ExpansionMap expand(const GroupSpec& spec);

/// Z* = [Z_G : G]; column block of group g equals Z restricted to G.
MatrixXd expand_design(const MatrixXd& Z, const ExpansionMap& map);

/// Sum the duplicates of every original coordinate.
VectorXd fold_back(const Eigen::Ref<const VectorXd>& beta_star, const ExpansionMap& map);

/**
 * Randomly break communities into near-equal chunks of about `target_size` nodes.
 *
 * A community of size c is shuffled and cut into m = ceil(c/target) chunks
 * whose sizes differ by at most one; when that would leave chunks smaller than
 * target-1, m falls back to floor(c/target). Output labels are renumbered in
 * order of first appearance by original community, then chunk.
 */
CommunityMap split_communities(const CommunityMap& cm, int target_size, std::uint64_t seed);

/// Node counts of the 13 Power-atlas systems after removing unassigned nodes (236 nodes).
std::vector<int> power_system_sizes();

/// Community map with contiguous runs of the given sizes.
CommunityMap contiguous_communities(const std::vector<int>& sizes);

} // namespace netcov
