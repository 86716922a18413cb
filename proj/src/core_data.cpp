#include "netcov/core_data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "netcov/errors.hpp"

namespace netcov {

std::string_view to_string(Family f)
{
    return f == Family::gaussian ? "gaussian" : "binomial";
}

Family parse_family(std::string_view s)
{
    if (s == "gaussian") return Family::gaussian;
    if (s == "binomial") return Family::binomial;
    throw ConfigError("unknown family '" + std::string(s) + "' (expected gaussian or binomial)");
}

CommunityMap::CommunityMap(std::vector<int> labels) : labels_(std::move(labels))
{
    if (labels_.empty()) throw DataError("community map has no nodes");
    const int lo = *std::min_element(labels_.begin(), labels_.end());
    const int hi = *std::max_element(labels_.begin(), labels_.end());
    if (lo != 0) throw DataError("community labels must start at 1");
    std::vector<bool> used(hi + 1, false);
    for (int c : labels_) used[c] = true;
    for (int c = 0; c <= hi; ++c) {
        if (!used[c]) {
            throw DataError("community labels are not contiguous: label " + std::to_string(c + 1) + " unused");
        }
    }
    k_ = hi + 1;
}

CommunityMap CommunityMap::from_one_based(std::span<const int> labels)
{
    std::vector<int> zero(labels.begin(), labels.end());
    for (int& c : zero) --c;
    return CommunityMap(std::move(zero));
}

std::vector<int> CommunityMap::members(int community) const
{
    std::vector<int> out;
    for (int node = 0; node < n_nodes(); ++node) {
        if (labels_[node] == community) out.push_back(node);
    }
    return out;
}

std::vector<int> CommunityMap::sizes() const
{
    std::vector<int> out(k_, 0);
    for (int c : labels_) ++out[c];
    return out;
}

std::vector<int> CommunityMap::ordering() const
{
    std::vector<int> perm(labels_.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(), [this](int a, int b) { return labels_[a] < labels_[b]; });
    return perm;
}

FeatureIndex::FeatureIndex(int n_nodes, int n_covariates) : n_(n_nodes), d_(n_covariates)
{
    if (n_nodes < 2) throw ShapeError("a network needs at least 2 nodes");
    if (n_covariates < 0) throw ShapeError("negative covariate count");
}

Index FeatureIndex::edge(int k, int l) const
{
    if (k > l) std::swap(k, l);
    if (k == l || k < 0 || l >= n_) throw ShapeError("invalid edge endpoints");
    const Index kk = k;
    return kk * n_ - kk * (kk + 1) / 2 + (l - k - 1);
}

std::pair<int, int> FeatureIndex::edge_endpoints(Index coord) const
{
    if (coord < 0 || coord >= n_edges()) throw ShapeError("coordinate is not an edge");
    int k = 0;
    Index start = 0;
    while (start + (n_ - k - 1) <= coord) {
        start += n_ - k - 1;
        ++k;
    }
    return {k, static_cast<int>(k + 1 + (coord - start))};
}

std::pair<int, int> FeatureIndex::covariate_owner(Index coord) const
{
    if (coord < n_edges() || coord >= p()) throw ShapeError("coordinate is not a node covariate");
    const Index off = coord - n_edges();
    return {static_cast<int>(off / d_), static_cast<int>(off % d_)};
}

std::vector<std::pair<int, int>> FeatureIndex::edge_order() const
{
    std::vector<std::pair<int, int>> out;
    out.reserve(n_edges());
    for (int k = 0; k < n_; ++k) {
        for (int l = k + 1; l < n_; ++l) out.emplace_back(k, l);
    }
    return out;
}

std::vector<std::pair<int, int>> FeatureIndex::node_order() const
{
    std::vector<std::pair<int, int>> out;
    out.reserve(static_cast<std::size_t>(n_) * d_);
    for (int node = 0; node < n_; ++node) {
        for (int j = 0; j < d_; ++j) out.emplace_back(node, j);
    }
    return out;
}

VectorXd vectorize(const Observation& obs, const FeatureIndex& idx)
{
    const int n = idx.n_nodes();
    const int d = idx.n_covariates();
    if (obs.A.rows() != n || obs.A.cols() != n) throw ShapeError("adjacency matrix is not n x n");
    if (obs.X.rows() != n || obs.X.cols() != d) {
        if (!(d == 0 && obs.X.size() == 0)) throw ShapeError("covariate matrix is not n x d");
    }
    VectorXd z(idx.p());
    Index c = 0;
    for (int k = 0; k < n; ++k) {
        if (obs.A(k, k) != 0.0) throw ShapeError("adjacency matrix has a nonzero diagonal");
        for (int l = k + 1; l < n; ++l) {
            if (std::abs(obs.A(k, l) - obs.A(l, k)) > 1e-12) throw ShapeError("adjacency matrix is not symmetric");
            z(c++) = obs.A(k, l);
        }
    }
    for (int node = 0; node < n; ++node) {
        for (int j = 0; j < d; ++j) z(c++) = obs.X(node, j);
    }
    return z;
}

Observation devectorize(const Eigen::Ref<const VectorXd>& z, const FeatureIndex& idx, double y)
{
    if (z.size() != idx.p()) throw ShapeError("vector length does not match feature index");
    const int n = idx.n_nodes();
    const int d = idx.n_covariates();
    Observation obs{MatrixXd::Zero(n, n), MatrixXd(n, d), y};
    Index c = 0;
    for (int k = 0; k < n; ++k) {
        for (int l = k + 1; l < n; ++l) {
            obs.A(k, l) = z(c);
            obs.A(l, k) = z(c);
            ++c;
        }
    }
    for (int node = 0; node < n; ++node) {
        for (int j = 0; j < d; ++j) obs.X(node, j) = z(c++);
    }
    return obs;
}

DesignMatrix build_design(std::span<const Observation> observations, const FeatureIndex& idx)
{
    if (observations.empty()) throw DataError("dataset has no observations");
    DesignMatrix out{MatrixXd(static_cast<Index>(observations.size()), idx.p()), std::nullopt};
    for (std::size_t i = 0; i < observations.size(); ++i) {
        out.Z.row(static_cast<Index>(i)) = vectorize(observations[i], idx).transpose();
    }
    return out;
}

MatrixXd take_rows(const MatrixXd& m, std::span<const Index> rows)
{
    MatrixXd out(static_cast<Index>(rows.size()), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = m.row(rows[i]);
    return out;
}

VectorXd take_rows(const VectorXd& v, std::span<const Index> rows)
{
    VectorXd out(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Index>(i)) = v(rows[i]);
    return out;
}

} // namespace netcov
