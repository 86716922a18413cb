#include "netcov/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "netcov/errors.hpp"

namespace netcov {

SupportReport support_from_counts(Index tp, Index fp, Index fn, Index tn)
{
    SupportReport r{tp, fp, fn, tn, std::nullopt, std::nullopt};
    if (tp + fn > 0) r.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    if (tp + fp > 0) r.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    return r;
}

SupportReport support_metrics(const Eigen::Ref<const VectorXd>& beta_hat, const Eigen::Ref<const VectorXd>& beta_true)
{
    if (beta_hat.size() != beta_true.size()) throw ShapeError("estimated and true coefficients differ in length");
    Index tp = 0, fp = 0, fn = 0, tn = 0;
    for (Index j = 0; j < beta_hat.size(); ++j) {
        const bool selected = std::abs(beta_hat(j)) > selection_threshold;
        const bool truth = beta_true(j) != 0.0;
        if (selected && truth) ++tp;
        else if (selected) ++fp;
        else if (truth) ++fn;
        else ++tn;
    }
    return support_from_counts(tp, fp, fn, tn);
}

SupportReport group_support_metrics(const std::vector<std::string>& selected, const std::vector<std::string>& truth,
                                    std::size_t total_groups)
{
    const std::set<std::string> sel(selected.begin(), selected.end());
    const std::set<std::string> tru(truth.begin(), truth.end());
    Index tp = 0;
    for (const auto& g : sel) tp += tru.count(g) ? 1 : 0;
    const Index fp = static_cast<Index>(sel.size()) - tp;
    const Index fn = static_cast<Index>(tru.size()) - tp;
    const Index tn = static_cast<Index>(total_groups) - tp - fp - fn;
    if (tn < 0) throw DataError("group counts exceed the number of groups");
    return support_from_counts(tp, fp, fn, tn);
}

std::optional<double> pearson(const Eigen::Ref<const VectorXd>& a, const Eigen::Ref<const VectorXd>& b)
{
    if (a.size() != b.size()) throw ShapeError("vectors differ in length");
    if (a.size() < 2) return std::nullopt;
    const VectorXd ac = a.array() - a.mean();
    const VectorXd bc = b.array() - b.mean();
    const double saa = ac.squaredNorm();
    const double sbb = bc.squaredNorm();
    if (!(saa > 0.0) || !(sbb > 0.0)) return std::nullopt;
    return ac.dot(bc) / std::sqrt(saa * sbb);
}

PredictionReport prediction_metrics(const Eigen::Ref<const VectorXd>& y_hat, const Eigen::Ref<const VectorXd>& y_test,
                                    Family family)
{
    if (y_hat.size() != y_test.size()) throw ShapeError("prediction and response lengths differ");
    PredictionReport r;
    if (family == Family::gaussian) {
        r.correlation = pearson(y_hat, y_test);
        return r;
    }
    if (y_test.size() == 0) return r;
    Index correct = 0;
    for (Index i = 0; i < y_test.size(); ++i) {
        const double cls = y_hat(i) > 0.5 ? 1.0 : 0.0;
        correct += cls == y_test(i) ? 1 : 0;
    }
    r.accuracy = static_cast<double>(correct) / static_cast<double>(y_test.size());
    return r;
}

std::vector<RocPoint> roc_along_path(const PathFit& path, const Eigen::Ref<const VectorXd>& beta_true)
{
    std::vector<RocPoint> out;
    out.reserve(path.entries.size());
    for (const auto& e : path.entries) {
        const auto s = support_metrics(e.beta, beta_true);
        RocPoint pt;
        pt.lambda = e.lambda;
        pt.tpr = s.tp + s.fn > 0 ? static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fn) : 0.0;
        pt.fpr = s.fp + s.tn > 0 ? static_cast<double>(s.fp) / static_cast<double>(s.fp + s.tn) : 0.0;
        if (s.tp + s.fp > 0) pt.fdr = static_cast<double>(s.fp) / static_cast<double>(s.tp + s.fp);
        out.push_back(pt);
    }
    return out;
}

namespace {

// Upper envelope per distinct FPR, sorted by FPR.
std::map<double, double> envelope(const std::vector<RocPoint>& pts)
{
    std::map<double, double> m;
    for (const auto& p : pts) {
        auto [it, inserted] = m.emplace(p.fpr, p.tpr);
        if (!inserted) it->second = std::max(it->second, p.tpr);
    }
    return m;
}

double interpolate(const std::map<double, double>& curve, double x)
{
    auto hi = curve.lower_bound(x);
    if (hi == curve.end()) return curve.rbegin()->second;
    if (hi->first == x || hi == curve.begin()) return hi->second;
    auto lo = std::prev(hi);
    const double w = (x - lo->first) / (hi->first - lo->first);
    return lo->second + w * (hi->second - lo->second);
}

} // namespace

double roc_dominance(const std::vector<RocPoint>& curve, const std::vector<RocPoint>& other)
{
    if (other.empty()) throw DataError("empty comparison curve");
    auto a = envelope(curve);
    a.emplace(0.0, 0.0);
    auto top = a.emplace(1.0, 1.0);
    top.first->second = std::max(top.first->second, 1.0);
    const auto b = envelope(other);
    std::size_t wins = 0;
    for (const auto& [x, y] : b) wins += interpolate(a, x) >= y - 1e-12 ? 1 : 0;
    return static_cast<double>(wins) / static_cast<double>(b.size());
}

} // namespace netcov
