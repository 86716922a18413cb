#include "netcov/grouping.hpp"

#include <algorithm>
#include <numeric>

#include "netcov/errors.hpp"
#include "netcov/log.hpp"
#include "netcov/rng.hpp"

namespace netcov {

std::string_view to_string(Scheme s)
{
    switch (s) {
    case Scheme::nbg: return "nbg";
    case Scheme::ebg: return "ebg";
    case Scheme::singleton: return "lasso";
    }
    return "?";
}

Scheme parse_scheme(std::string_view s)
{
    if (s == "nbg") return Scheme::nbg;
    if (s == "ebg") return Scheme::ebg;
    if (s == "lasso" || s == "singleton") return Scheme::singleton;
    throw ConfigError("unknown scheme '" + std::string(s) + "' (expected nbg, ebg or lasso)");
}

std::string nbg_name(int community) { return std::to_string(community + 1); }

std::string ebg_name(int k1, int k2)
{
    if (k1 > k2) std::swap(k1, k2);
    return "(" + std::to_string(k1 + 1) + "," + std::to_string(k2 + 1) + ")";
}

namespace {

std::string canonical_name(std::string_view name)
{
    std::string s;
    for (char ch : name) {
        if (ch != ' ' && ch != 'G' && ch != '^' && ch != '{' && ch != '}') s.push_back(ch);
    }
    if (s.size() > 2 && s.front() == '(' && s.back() == ')') {
        const auto comma = s.find(',');
        if (comma != std::string::npos) {
            try {
                const int a = std::stoi(s.substr(1, comma - 1));
                const int b = std::stoi(s.substr(comma + 1, s.size() - comma - 2));
                return ebg_name(a - 1, b - 1);
            } catch (const std::exception&) {
                return s;
            }
        }
    }
    if (s.size() > 2 && s.front() == '(' && s.back() == ')') return s.substr(1, s.size() - 2);
    return s;
}

// Drop empty groups; the group penalty is undefined at |G| = 0.
void drop_empty(GroupSpec& spec)
{
    auto it = std::remove_if(spec.groups.begin(), spec.groups.end(), [](const Group& g) {
        if (g.features.empty()) {
            warn("dropping empty group " + g.name);
            return true;
        }
        return false;
    });
    spec.groups.erase(it, spec.groups.end());
}

std::vector<Index> sorted_union(std::vector<Index> a, const std::vector<Index>& b)
{
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}

void check_compatible(const CommunityMap& cm, const FeatureIndex& idx)
{
    if (cm.n_nodes() != idx.n_nodes()) throw ShapeError("community map and feature index disagree on node count");
}

} // namespace

std::size_t GroupSpec::find(std::string_view name) const
{
    const std::string key = canonical_name(name);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (groups[g].name == key) return g;
    }
    throw ConfigError("unknown group name '" + std::string(name) + "'");
}

std::vector<int> GroupSpec::multiplicity() const
{
    std::vector<int> out(static_cast<std::size_t>(p), 0);
    for (const auto& g : groups) {
        for (Index j : g.features) ++out[j];
    }
    return out;
}

std::vector<std::vector<Index>> blocks(const CommunityMap& cm, const FeatureIndex& idx)
{
    check_compatible(cm, idx);
    std::vector<std::vector<Index>> out(cm.n_communities());
    for (int node = 0; node < idx.n_nodes(); ++node) {
        for (int j = 0; j < idx.n_covariates(); ++j) out[cm.label(node)].push_back(idx.covariate(node, j));
    }
    return out;
}

std::size_t cell_position(int k1, int k2, int n_communities)
{
    if (k1 > k2) std::swap(k1, k2);
    const std::size_t a = k1;
    const std::size_t K = n_communities;
    return a * K - a * (a - 1) / 2 + static_cast<std::size_t>(k2 - k1);
}

std::vector<std::vector<Index>> cells(const CommunityMap& cm, const FeatureIndex& idx)
{
    check_compatible(cm, idx);
    const int K = cm.n_communities();
    std::vector<std::vector<Index>> out(static_cast<std::size_t>(K) * (K + 1) / 2);
    Index c = 0;
    for (int k = 0; k < idx.n_nodes(); ++k) {
        for (int l = k + 1; l < idx.n_nodes(); ++l) out[cell_position(cm.label(k), cm.label(l), K)].push_back(c++);
    }
    return out;
}

GroupSpec nbg_groups(const CommunityMap& cm, const FeatureIndex& idx)
{
    const int K = cm.n_communities();
    const auto blk = blocks(cm, idx);
    const auto cel = cells(cm, idx);
    GroupSpec spec{Scheme::nbg, idx.p(), {}};
    for (int k = 0; k < K; ++k) {
        std::vector<Index> members = blk[k];
        for (int j = 0; j < K; ++j) members = sorted_union(std::move(members), cel[cell_position(j, k, K)]);
        spec.groups.push_back({nbg_name(k), std::move(members)});
    }
    drop_empty(spec);
    return spec;
}

GroupSpec ebg_groups(const CommunityMap& cm, const FeatureIndex& idx)
{
    const int K = cm.n_communities();
    const auto blk = blocks(cm, idx);
    const auto cel = cells(cm, idx);
    GroupSpec spec{Scheme::ebg, idx.p(), {}};
    for (int k = 0; k < K; ++k) {
        for (int l = k; l < K; ++l) {
            auto members = sorted_union(cel[cell_position(k, l, K)], blk[k]);
            if (l != k) members = sorted_union(std::move(members), blk[l]);
            spec.groups.push_back({ebg_name(k, l), std::move(members)});
        }
    }
    drop_empty(spec);
    return spec;
}

GroupSpec singleton_groups(Index p)
{
    GroupSpec spec{Scheme::singleton, p, {}};
    spec.groups.reserve(static_cast<std::size_t>(p));
    for (Index j = 0; j < p; ++j) spec.groups.push_back({std::to_string(j + 1), {j}});
    return spec;
}

GroupSpec make_groups(Scheme scheme, const CommunityMap& cm, const FeatureIndex& idx)
{
    switch (scheme) {
    case Scheme::nbg: return nbg_groups(cm, idx);
    case Scheme::ebg: return ebg_groups(cm, idx);
    case Scheme::singleton: return singleton_groups(idx.p());
    }
    throw ConfigError("unknown scheme");
}

ExpansionMap expand(const GroupSpec& spec)
{
    ExpansionMap map;
    map.p = spec.p;
    map.group_start.reserve(spec.groups.size() + 1);
    map.group_start.push_back(0);
    for (const auto& g : spec.groups) {
        for (Index j : g.features) {
            if (j < 0 || j >= spec.p) throw ShapeError("group member outside 0..p-1");
            map.expanded_to_original.push_back(j);
        }
        map.group_start.push_back(static_cast<Index>(map.expanded_to_original.size()));
    }
    return map;
}

MatrixXd expand_design(const MatrixXd& Z, const ExpansionMap& map)
{
    if (Z.cols() != map.p) throw ShapeError("design has " + std::to_string(Z.cols()) + " columns, expected " + std::to_string(map.p));
    MatrixXd out(Z.rows(), map.p_star());
    for (Index c = 0; c < map.p_star(); ++c) out.col(c) = Z.col(map.expanded_to_original[c]);
    return out;
}

VectorXd fold_back(const Eigen::Ref<const VectorXd>& beta_star, const ExpansionMap& map)
{
    if (beta_star.size() != map.p_star()) throw ShapeError("expanded coefficient vector has the wrong length");
    VectorXd beta = VectorXd::Zero(map.p);
    for (Index c = 0; c < map.p_star(); ++c) beta(map.expanded_to_original[c]) += beta_star(c);
    return beta;
}

CommunityMap split_communities(const CommunityMap& cm, int target_size, std::uint64_t seed)
{
    if (target_size < 2) throw ConfigError("split target size must be at least 2");
    Rng rng(seed);
    std::vector<int> labels(cm.n_nodes(), -1);
    int next = 0;
    for (int k = 0; k < cm.n_communities(); ++k) {
        auto nodes = cm.members(k);
        std::shuffle(nodes.begin(), nodes.end(), rng);
        const int c = static_cast<int>(nodes.size());
        int m = (c + target_size - 1) / target_size;
        if (m > 1 && c / m < target_size - 1) m = std::max(1, c / target_size);
        const int base = c / m;
        const int extra = c % m;
        std::size_t pos = 0;
        for (int chunk = 0; chunk < m; ++chunk) {
            const int len = base + (chunk < extra ? 1 : 0);
            for (int i = 0; i < len; ++i) labels[nodes[pos++]] = next;
            ++next;
        }
    }
    return CommunityMap(std::move(labels));
}

std::vector<int> power_system_sizes()
{
    // Sensomotor hand, sensomotor mouth, cingulo-opercular, auditory, default
    // mode, memory, visual, frontoparietal, salience, subcortical, ventral
    // attention, dorsal attention, cerebellar.
    return {30, 5, 14, 13, 58, 5, 31, 25, 18, 13, 9, 11, 4};
}

CommunityMap contiguous_communities(const std::vector<int>& sizes)
{
    std::vector<int> labels;
    for (std::size_t k = 0; k < sizes.size(); ++k) labels.insert(labels.end(), sizes[k], static_cast<int>(k));
    return CommunityMap(std::move(labels));
}

} // namespace netcov
