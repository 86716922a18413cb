#include "netcov/simgen.hpp"

#include <algorithm>
#include <cmath>

#include "netcov/dataset_io.hpp"
#include "netcov/errors.hpp"
#include "netcov/solver.hpp"

namespace netcov {

void ExperimentConfig::validate() const
{
    if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
    if (scheme == Scheme::singleton) throw ConfigError("simulation scheme must be nbg or ebg");
    if (active_groups.empty()) throw ConfigError("at least one active group is required");
    if (n_train < 2) throw ConfigError("n_train must be at least 2");
    if (n_test < 0) throw ConfigError("n_test must be non-negative");
    if (!design_path) {
        if (communities < 1 || nodes_per_community < 1) throw ConfigError("community sizes must be positive");
        if (communities * nodes_per_community < 2) throw ConfigError("synthetic networks need at least 2 nodes");
        if (covariates < 0) throw ConfigError("covariates must be non-negative");
    }
    if (split_target == 1 || split_target < 0) throw ConfigError("split target must be 0 (off) or at least 2");
    if (replicates < 1) throw ConfigError("replicates must be at least 1");
}

std::vector<std::string> preset_active_groups(Scheme scheme, int count)
{
    if (count != 1 && count != 5) throw ConfigError("presets exist for 1 or 5 active groups");
    if (scheme == Scheme::nbg) {
        if (count == 1) return {"1"};
        return {"1", "2", "3", "4", "5"};
    }
    if (scheme == Scheme::ebg) {
        if (count == 1) return {"(1,1)"};
        return {"(1,1)", "(1,3)", "(2,3)", "(4,4)", "(5,6)"};
    }
    throw ConfigError("presets exist for nbg and ebg only");
}

GroundTruth make_beta(const GroupSpec& spec, const std::vector<std::string>& active_names, double alpha)
{
    GroundTruth t;
    t.beta = VectorXd::Zero(spec.p);
    for (const auto& name : active_names) {
        const auto& g = spec.groups[spec.find(name)];
        t.active_groups.push_back(g.name);
        for (Index j : g.features) t.beta(j) = alpha;
    }
    for (Index j = 0; j < spec.p; ++j) {
        if (t.beta(j) != 0.0) t.support.push_back(j);
    }
    return t;
}

Dataset gen_design_synthetic(const ExperimentConfig& config, Rng& rng)
{
    Dataset data;
    const int n = config.communities * config.nodes_per_community;
    data.index = FeatureIndex(n, config.covariates);
    std::vector<int> sizes(static_cast<std::size_t>(config.communities), config.nodes_per_community);
    data.communities = contiguous_communities(sizes);
    data.family = config.family;
    const Index N = config.n_train;
    const Index p = data.index.p();
    data.Z.resize(N + config.n_test, p);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Index i = 0; i < N; ++i) {
        for (Index j = 0; j < p; ++j) data.Z(i, j) = normal(rng);
    }
    for (Index i = 0; i < config.n_test; ++i) data.Z.row(N + i) = data.Z.row(i % N);
    data.y = VectorXd::Zero(N + config.n_test);
    for (Index i = 0; i < N; ++i) data.train_rows.push_back(i);
    for (Index i = 0; i < config.n_test; ++i) data.test_rows.push_back(N + i);
    return data;
}

VectorXd draw_response(const MatrixXd& Z, const GroundTruth& truth, Family family, Rng& rng)
{
    if (Z.cols() != truth.beta.size()) throw ShapeError("design width does not match the true coefficients");
    VectorXd eta = Z * truth.beta;
    eta.array() += truth.intercept;
    VectorXd y(eta.size());
    if (family == Family::gaussian) {
        std::normal_distribution<double> noise(0.0, 1.0);
        for (Index i = 0; i < y.size(); ++i) y(i) = eta(i) + noise(rng);
    } else {
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (Index i = 0; i < y.size(); ++i) y(i) = unif(rng) < inverse_logit(eta(i)) ? 1.0 : 0.0;
    }
    return y;
}

double scenario_difficulty(const MatrixXd& Z, const GroundTruth& truth, Family family)
{
    if (Z.cols() != truth.beta.size()) throw ShapeError("design width does not match the true coefficients");
    VectorXd eta = Z * truth.beta;
    eta.array() += truth.intercept;
    const double N = static_cast<double>(eta.size());
    if (family == Family::gaussian) {
        const double mean = eta.mean();
        return (eta.array() - mean).square().sum() / N;
    }
    double total = 0.0;
    for (Index i = 0; i < eta.size(); ++i) {
        const double pi = inverse_logit(eta(i));
        total += std::min(pi, 1.0 - pi);
    }
    return total / N;
}

void center_with_training_means(Dataset& data)
{
    const MatrixXd train = take_rows(data.Z, data.train_rows);
    const Eigen::RowVectorXd means = train.colwise().mean();
    data.Z.rowwise() -= means;
}

namespace {

void fill_responses(Dataset& data, const GroundTruth& truth, Rng& rng)
{
    const MatrixXd Z_train = take_rows(data.Z, data.train_rows);
    const VectorXd y_train = draw_response(Z_train, truth, data.family, rng);
    for (std::size_t i = 0; i < data.train_rows.size(); ++i) data.y(data.train_rows[i]) = y_train(static_cast<Index>(i));
    if (!data.test_rows.empty()) {
        const MatrixXd Z_test = take_rows(data.Z, data.test_rows);
        const VectorXd y_test = draw_response(Z_test, truth, data.family, rng);
        for (std::size_t i = 0; i < data.test_rows.size(); ++i) data.y(data.test_rows[i]) = y_test(static_cast<Index>(i));
    }
}

SimulatedCell simulate_with(const ExperimentConfig& config, Rng& rng)
{
    config.validate();
    SimulatedCell cell;
    if (config.design_path) {
        cell.data = io::read_dataset(*config.design_path);
        cell.data.family = config.family;
        if (config.split_target >= 2) {
            cell.data.communities = split_communities(cell.data.communities, config.split_target, rng());
        }
        center_with_training_means(cell.data);
        cell.data.y = VectorXd::Zero(cell.data.n_samples());
    } else {
        cell.data = gen_design_synthetic(config, rng);
    }
    cell.groups = make_groups(config.scheme, cell.data.communities, cell.data.index);
    cell.truth = make_beta(cell.groups, config.active_groups, config.alpha);
    fill_responses(cell.data, cell.truth, rng);
    cell.difficulty = scenario_difficulty(take_rows(cell.data.Z, cell.data.train_rows), cell.truth, config.family);
    return cell;
}

} // namespace

Dataset gen_semisynthetic(const std::filesystem::path& dir, const ExperimentConfig& config, Rng& rng)
{
    ExperimentConfig c = config;
    c.design_path = dir;
    return simulate_with(c, rng).data;
}

SimulatedCell simulate_cell(const ExperimentConfig& config, std::uint64_t seed)
{
    Rng rng(seed);
    return simulate_with(config, rng);
}

std::vector<double> alpha_grid(int points, std::size_t support_size, double snr_lo, double snr_hi)
{
    if (points < 1) throw ConfigError("alpha grid needs at least one point");
    if (support_size == 0) throw ConfigError("empty support");
    if (!(snr_lo > 0.0 && snr_hi >= snr_lo)) throw ConfigError("invalid SNR range");
    std::vector<double> out;
    const double s = static_cast<double>(support_size);
    for (int k = 0; k < points; ++k) {
        const double frac = points == 1 ? 0.0 : static_cast<double>(k) / (points - 1);
        const double snr = snr_lo * std::pow(snr_hi / snr_lo, frac);
        out.push_back(std::sqrt(snr / s));
    }
    return out;
}

} // namespace netcov
