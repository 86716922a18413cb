#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace netcov {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Index = Eigen::Index;

enum class Family { gaussian, binomial };

std::string_view to_string(Family f);
Family parse_family(std::string_view s);

/**
 * Partition of nodes into K communities.
 *
 * Labels are stored 0-based (0..K-1); on disk they are 1-based. Nodes need not
 * be sorted by community; `ordering()` gives a stable permutation that makes
 * the labels contiguous and non-decreasing.
 */
class CommunityMap
{
public:
    CommunityMap() = default;

    /// Throws DataError unless labels cover 0..K-1 with every label used.
    explicit CommunityMap(std::vector<int> labels);

    /// Build from 1-based labels as stored in communities.csv.
    static CommunityMap from_one_based(std::span<const int> labels);

    int n_nodes() const { return static_cast<int>(labels_.size()); }
    int n_communities() const { return k_; }
    int label(int node) const { return labels_[node]; }
    const std::vector<int>& labels() const { return labels_; }

    std::vector<int> members(int community) const;
    std::vector<int> sizes() const;
    std::vector<int> ordering() const;

    bool operator==(const CommunityMap&) const = default;

private:
    std::vector<int> labels_;
    int k_ = 0;
};

/// One sample: symmetric zero-diagonal n×n edge weights, n×d node covariates, response.
struct Observation {
    MatrixXd A;
    MatrixXd X;
    double y = 0.0;
};

/**
 * Canonical bijection between features and coordinates 0..p-1.
 *
 * Edges (k,l), k<l, come first in lexicographic order, then node covariates
 * node-major: node 0 covariates 0..d-1, node 1, and so on.
 */
class FeatureIndex
{
public:
    FeatureIndex() = default;
    FeatureIndex(int n_nodes, int n_covariates);

    int n_nodes() const { return n_; }
    int n_covariates() const { return d_; }
    Index n_edges() const { return static_cast<Index>(n_) * (n_ - 1) / 2; }
    Index p() const { return n_edges() + static_cast<Index>(n_) * d_; }

    Index edge(int k, int l) const;
    Index covariate(int node, int j) const { return n_edges() + static_cast<Index>(node) * d_ + j; }

    bool is_edge(Index coord) const { return coord < n_edges(); }
    std::pair<int, int> edge_endpoints(Index coord) const;
    std::pair<int, int> covariate_owner(Index coord) const;

    std::vector<std::pair<int, int>> edge_order() const;
    std::vector<std::pair<int, int>> node_order() const;

    bool operator==(const FeatureIndex&) const = default;

private:
    int n_ = 0;
    int d_ = 0;
};

VectorXd vectorize(const Observation& obs, const FeatureIndex& idx);

/// Inverse of vectorize; the response is not part of the feature vector.
Observation devectorize(const Eigen::Ref<const VectorXd>& z, const FeatureIndex& idx, double y = 0.0);

/// Training-split standardization statistics (1/N variance convention).
struct Standardization {
    VectorXd column_means;
    VectorXd column_sds;
    double y_mean = 0.0;
    double y_sd = 1.0;
};

struct DesignMatrix {
    MatrixXd Z;
    std::optional<Standardization> stats;
};

/**
 * N samples of (network, covariates, response) on a shared node set, already
 * vectorized into rows of `Z`. Rows listed in `train_rows` are the training
 * split; `test_rows` may be empty.
 */
struct Dataset {
    FeatureIndex index;
    CommunityMap communities;
    MatrixXd Z;
    VectorXd y;
    Family family = Family::gaussian;
    std::optional<MatrixXd> nuisance;
    std::vector<Index> train_rows;
    std::vector<Index> test_rows;

    Index n_samples() const { return Z.rows(); }
};

DesignMatrix build_design(std::span<const Observation> observations, const FeatureIndex& idx);

/// Rows of `m` selected by `rows`, in the given order.
MatrixXd take_rows(const MatrixXd& m, std::span<const Index> rows);
VectorXd take_rows(const VectorXd& v, std::span<const Index> rows);

} // namespace netcov
