#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "netcov/baselines.hpp"
#include "netcov/dataset_io.hpp"
#include "netcov/errors.hpp"
#include "netcov/metrics.hpp"
#include "netcov/parallel.hpp"
#include "netcov/rng.hpp"

namespace netcov::cli {

namespace {

using io::CsvWriter;
using io::KeyValues;

std::string trim(std::string s)
{
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string join(const std::vector<std::string>& items, const std::string& sep)
{
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
    return out;
}

std::string fmt(double x) { return io::format_double(x); }

std::string fmt(const std::optional<double>& x) { return x ? fmt(*x) : std::string("NA"); }

double to_double(const std::string& key, const std::string& v)
{
    try {
        return io::parse_double(v);
    } catch (const DataError&) {
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    }
}

long long to_int(const std::string& key, const std::string& v)
{
    try {
        return io::parse_int(v);
    } catch (const DataError&) {
        throw ConfigError(key + ": expected an integer, got '" + v + "'");
    }
}

bool to_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::string scheme_list(const std::vector<Scheme>& v)
{
    std::vector<std::string> s;
    for (auto x : v) s.emplace_back(to_string(x));
    return join(s, ", ");
}

std::string family_list(const std::vector<Family>& v)
{
    std::vector<std::string> s;
    for (auto x : v) s.emplace_back(to_string(x));
    return join(s, ", ");
}

template <class T>
std::string number_list(const std::vector<T>& v)
{
    std::vector<std::string> s;
    for (auto x : v) {
        if constexpr (std::is_floating_point_v<T>) {
            s.push_back(fmt(x));
        } else {
            s.push_back(std::to_string(x));
        }
    }
    return join(s, ", ");
}

void write_run_manifest(const fs::path& dir, const std::string& subcommand, KeyValues entries,
                        std::chrono::steady_clock::time_point started)
{
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    KeyValues kv{{"subcommand", subcommand}, {"version", version}};
    kv.insert(kv.end(), entries.begin(), entries.end());
    kv.emplace_back("wall_clock_seconds", fmt(secs));
    io::write_file_atomic(dir / "run_manifest", io::format_key_values(kv));
}

void write_groups(const fs::path& path, const GroupSpec& spec)
{
    CsvWriter w;
    for (const auto& g : spec.groups) {
        for (Index j : g.features) w.field(g.name).field(static_cast<long long>(j + 1)).end_row();
    }
    w.save(path);
}

void write_truth(const fs::path& dir, const SimulatedCell& cell, const ExperimentConfig& cfg, std::uint64_t seed)
{
    CsvWriter t;
    for (Index j = 0; j < cell.truth.beta.size(); ++j) t.field(static_cast<long long>(j + 1)).field(cell.truth.beta(j)).end_row();
    t.save(dir / "truth.csv");
    CsvWriter s;
    s.field("alpha").field("difficulty").field("measure").field("seed").end_row();
    s.field(cfg.alpha).field(cell.difficulty).field(cfg.family == Family::gaussian ? "snr" : "bayes_error")
        .field(std::to_string(seed)).end_row();
    s.save(dir / "scenario.csv");
}

KeyValues truth_manifest(const SimulatedCell& cell, const ExperimentConfig& cfg)
{
    return {{"truth.scheme", std::string(to_string(cfg.scheme))},
            {"truth.active_groups", join(cell.truth.active_groups, "; ")},
            {"truth.alpha", fmt(cfg.alpha)}};
}

struct TrainSplit {
    MatrixXd Z;
    VectorXd y;
    std::optional<MatrixXd> W;
};

TrainSplit training_split(const Dataset& data)
{
    if (data.train_rows.empty()) throw DataError("dataset has no training rows");
    TrainSplit s{take_rows(data.Z, data.train_rows), take_rows(data.y, data.train_rows), std::nullopt};
    if (data.nuisance) s.W = take_rows(*data.nuisance, data.train_rows);
    return s;
}

TunedFit run_tuned(const Dataset& data, const GroupSpec& spec, const TuningOptions& options)
{
    const TrainSplit tr = training_split(data);
    const TrainingData td{tr.Z, tr.y, tr.W ? &*tr.W : nullptr, data.family};
    return tune_and_fit(td, spec, options);
}

std::optional<VectorXd> test_predictions(const LinearModel& model, const Dataset& data)
{
    if (data.test_rows.empty()) return std::nullopt;
    const MatrixXd Z = take_rows(data.Z, data.test_rows);
    std::optional<MatrixXd> W;
    if (data.nuisance) W = take_rows(*data.nuisance, data.test_rows);
    return model.predict(Z, W ? &*W : nullptr);
}

/// One row of metrics.csv.
struct MetricsRow {
    std::string scheme = "NA";
    Family family = Family::gaussian;
    std::optional<double> alpha;
    std::optional<double> difficulty;
    std::string method;
    std::optional<SupportReport> support;
    std::optional<SupportReport> groups;
    PredictionReport prediction;
    double lambda = 0.0;
    std::size_t n_active_groups = 0;
    std::string cell;
    int replicate = -1;
};

void metrics_header(CsvWriter& w, bool with_cell)
{
    if (with_cell) w.field("cell").field("replicate");
    for (const char* h : {"scheme", "family", "alpha", "difficulty", "method", "recall", "precision", "group_recall",
                          "group_precision", "correlation", "accuracy", "lambda", "n_active_groups"}) {
        w.field(h);
    }
    w.end_row();
}

void metrics_row(CsvWriter& w, const MetricsRow& r, bool with_cell)
{
    if (with_cell) w.field(r.cell).field(r.replicate);
    w.field(r.scheme).field(to_string(r.family)).field(fmt(r.alpha)).field(fmt(r.difficulty)).field(r.method);
    w.field(fmt(r.support ? r.support->recall : std::nullopt));
    w.field(fmt(r.support ? r.support->precision : std::nullopt));
    w.field(fmt(r.groups ? r.groups->recall : std::nullopt));
    w.field(fmt(r.groups ? r.groups->precision : std::nullopt));
    w.field(fmt(r.prediction.correlation)).field(fmt(r.prediction.accuracy));
    w.field(r.lambda).field(r.n_active_groups).end_row();
}

void roc_header(CsvWriter& w, bool with_cell)
{
    if (with_cell) w.field("cell").field("replicate");
    for (const char* h : {"method", "lambda_index", "lambda", "fpr", "tpr", "fdr"}) w.field(h);
    w.end_row();
}

void roc_rows(CsvWriter& w, const std::string& method, const std::vector<RocPoint>& pts, const std::string& cell,
              int replicate, bool with_cell)
{
    for (std::size_t k = 0; k < pts.size(); ++k) {
        if (with_cell) w.field(cell).field(replicate);
        w.field(method).field(k + 1).field(pts[k].lambda).field(pts[k].fpr).field(pts[k].tpr).field(fmt(pts[k].fdr)).end_row();
    }
}

void write_fit_outputs(const fs::path& out, const TunedFit& tuned, const GroupSpec& spec, const Dataset& data,
                       Scheme scheme)
{
    fs::create_directories(out);
    write_groups(out / "groups.csv", spec);

    CsvWriter cv;
    cv.field("lambda_index").field("lambda").field("mean_deviance").field("standard_error").field("is_min").field("is_1se").end_row();
    for (std::size_t k = 0; k < tuned.cv.lambdas.size(); ++k) {
        cv.field(k + 1).field(tuned.cv.lambdas[k]).field(tuned.cv.mean_deviance[k]).field(tuned.cv.standard_error[k]);
        cv.field(k == tuned.cv.index_min ? 1 : 0).field(k == tuned.cv.index_1se ? 1 : 0).end_row();
    }
    cv.save(out / "cv.csv");

    // Norms use the folded-back coefficients on the standardized scale.
    CsvWriter path;
    path.field("lambda_index").field("lambda").field("group").field("active").field("norm").end_row();
    for (std::size_t k = 0; k < tuned.path.entries.size(); ++k) {
        const auto& e = tuned.path.entries[k];
        const std::set<std::string> active(e.active_groups.begin(), e.active_groups.end());
        for (const auto& grp : spec.groups) {
            double sq = 0.0;
            for (Index j : grp.features) sq += e.beta(j) * e.beta(j);
            path.field(k + 1).field(e.lambda).field(grp.name).field(active.count(grp.name) ? 1 : 0);
            path.field(std::sqrt(sq)).end_row();
        }
    }
    path.save(out / "path.csv");

    for (std::size_t k = 0; k < tuned.path.entries.size(); ++k) {
        io::write_vector(out / ("coef_" + std::to_string(k + 1) + ".csv"), tuned.path.entries[k].beta);
    }
    io::write_vector(out / "beta.csv", tuned.fit.beta);
    io::write_vector(out / "coef.csv", tuned.fit.model.coef);
    if (tuned.fit.model.nuisance_coef.size() > 0) io::write_vector(out / "nuisance_coef.csv", tuned.fit.model.nuisance_coef);

    CsvWriter act;
    for (const auto& g : tuned.fit.active_groups) act.field(g).end_row();
    act.save(out / "active_groups.csv");

    if (auto pred = test_predictions(tuned.fit.model, data)) io::write_vector(out / "predictions.csv", *pred);

    KeyValues model{{"method", std::string(to_string(scheme))},
                    {"family", std::string(to_string(data.family))},
                    {"p", std::to_string(data.index.p())},
                    {"n", std::to_string(data.index.n_nodes())},
                    {"d", std::to_string(data.index.n_covariates())},
                    {"n_groups", std::to_string(spec.size())},
                    {"intercept", fmt(tuned.fit.model.intercept)},
                    {"lambda", fmt(tuned.fit.lambda)},
                    {"lambda_min", fmt(tuned.cv.lambda_min())},
                    {"lambda_max", fmt(tuned.path.lambda_max)},
                    {"kkt_residual", fmt(tuned.fit.kkt_residual)},
                    {"iterations", std::to_string(tuned.fit.iterations)},
                    {"n_active_groups", std::to_string(tuned.fit.active_groups.size())},
                    {"nuisance", tuned.fit.model.nuisance_coef.size() > 0 ? "true" : "false"}};
    io::write_file_atomic(out / "model", io::format_key_values(model));
}

} // namespace

io::KeyValues SweepConfig::resolved() const
{
    KeyValues kv{{"seed", std::to_string(seed)},
                 {"experiment.scheme", scheme_list(schemes)},
                 {"experiment.active_groups", number_list(active_counts)},
                 {"experiment.active_names", join(active_names, "; ")},
                 {"experiment.family", family_list(families)},
                 {"experiment.alpha", number_list(alphas)},
                 {"experiment.alpha_points", std::to_string(alpha_points)},
                 {"experiment.snr_min", fmt(snr_min)},
                 {"experiment.snr_max", fmt(snr_max)},
                 {"experiment.replicates", std::to_string(replicates)},
                 {"experiment.n_train", std::to_string(base.n_train)},
                 {"experiment.n_test", std::to_string(base.n_test)},
                 {"experiment.communities", std::to_string(base.communities)},
                 {"experiment.nodes_per_community", std::to_string(base.nodes_per_community)},
                 {"experiment.covariates", std::to_string(base.covariates)},
                 {"experiment.design", base.design_path ? base.design_path->string() : std::string{}},
                 {"experiment.split_target", std::to_string(base.split_target)},
                 {"solver.folds", std::to_string(tuning.folds)},
                 {"solver.grid_size", std::to_string(tuning.grid_size)},
                 {"solver.min_ratio", fmt(tuning.min_ratio)},
                 {"solver.max_iter", std::to_string(tuning.solver.max_iter)},
                 {"solver.tolerance", fmt(tuning.solver.tolerance)},
                 {"sweep.methods", join(methods, ", ")},
                 {"sweep.roc", roc ? "true" : "false"},
                 {"sweep.keep_cells", keep_cells ? "true" : "false"}};
    return kv;
}

SweepConfig parse_sweep_config(const io::KeyValues& kv)
{
    SweepConfig c;
    static const std::set<std::string> known{
        "seed", "experiment.preset", "experiment.scheme", "experiment.active_groups", "experiment.active_names",
        "experiment.family", "experiment.alpha", "experiment.alpha_points", "experiment.snr_min",
        "experiment.snr_max", "experiment.replicates", "experiment.n_train", "experiment.n_test",
        "experiment.communities", "experiment.nodes_per_community", "experiment.covariates", "experiment.design",
        "experiment.split_target", "solver.folds", "solver.grid_size", "solver.min_ratio", "solver.max_iter",
        "solver.tolerance", "sweep.methods", "sweep.roc", "sweep.keep_cells"};
    // run_manifest bookkeeping, so a manifest can be replayed as a config
    static const std::set<std::string> metadata{"subcommand", "version", "config", "output", "cells",
                                                "wall_clock_seconds"};
    std::vector<std::string> unknown;
    for (const auto& [k, v] : kv) {
        if (!known.count(k) && !metadata.count(k)) unknown.push_back(k);
    }
    if (!unknown.empty()) throw ConfigError("unknown config keys: " + join(unknown, ", "));

    if (const auto* preset = io::find_key(kv, "experiment.preset")) {
        if (*preset == "experiment1") {
            c.schemes = {Scheme::nbg, Scheme::ebg};
            c.active_counts = {1, 5};
            c.families = {Family::gaussian, Family::binomial};
            c.alpha_points = 20;
            c.replicates = 10;
        } else if (*preset != "none") {
            throw ConfigError("unknown preset '" + *preset + "' (expected experiment1 or none)");
        }
    }
    bool have_seed = false;
    for (const auto& [key, value] : kv) {
        if (key == "seed") {
            c.seed = static_cast<std::uint64_t>(to_int(key, value));
            have_seed = true;
        } else if (key == "experiment.scheme") {
            c.schemes.clear();
            for (const auto& s : split_list(value, ',')) {
                const Scheme sc = parse_scheme(s);
                if (sc == Scheme::singleton) throw ConfigError("experiment.scheme must be nbg or ebg");
                c.schemes.push_back(sc);
            }
        } else if (key == "experiment.active_groups") {
            c.active_counts.clear();
            for (const auto& s : split_list(value, ',')) c.active_counts.push_back(static_cast<int>(to_int(key, s)));
        } else if (key == "experiment.active_names") {
            c.active_names = split_list(value, ';');
        } else if (key == "experiment.family") {
            c.families.clear();
            for (const auto& s : split_list(value, ',')) c.families.push_back(parse_family(s));
        } else if (key == "experiment.alpha") {
            c.alphas.clear();
            for (const auto& s : split_list(value, ',')) c.alphas.push_back(to_double(key, s));
        } else if (key == "experiment.alpha_points") {
            c.alpha_points = static_cast<int>(to_int(key, value));
        } else if (key == "experiment.snr_min") {
            c.snr_min = to_double(key, value);
        } else if (key == "experiment.snr_max") {
            c.snr_max = to_double(key, value);
        } else if (key == "experiment.replicates") {
            c.replicates = static_cast<int>(to_int(key, value));
        } else if (key == "experiment.n_train") {
            c.base.n_train = to_int(key, value);
        } else if (key == "experiment.n_test") {
            c.base.n_test = to_int(key, value);
        } else if (key == "experiment.communities") {
            c.base.communities = static_cast<int>(to_int(key, value));
        } else if (key == "experiment.nodes_per_community") {
            c.base.nodes_per_community = static_cast<int>(to_int(key, value));
        } else if (key == "experiment.covariates") {
            c.base.covariates = static_cast<int>(to_int(key, value));
        } else if (key == "experiment.design") {
            if (!value.empty()) c.base.design_path = fs::path(value);
        } else if (key == "experiment.split_target") {
            c.base.split_target = static_cast<int>(to_int(key, value));
        } else if (key == "solver.folds") {
            c.tuning.folds = static_cast<int>(to_int(key, value));
        } else if (key == "solver.grid_size") {
            c.tuning.grid_size = static_cast<int>(to_int(key, value));
        } else if (key == "solver.min_ratio") {
            c.tuning.min_ratio = to_double(key, value);
        } else if (key == "solver.max_iter") {
            c.tuning.solver.max_iter = static_cast<int>(to_int(key, value));
        } else if (key == "solver.tolerance") {
            c.tuning.solver.tolerance = to_double(key, value);
        } else if (key == "sweep.methods") {
            c.methods = split_list(value, ',');
            for (const auto& m : c.methods) {
                if (m != "netcov" && m != "lasso" && m != "nbg" && m != "ebg") {
                    throw ConfigError("sweep.methods entries must be netcov, nbg, ebg or lasso");
                }
            }
        } else if (key == "sweep.roc") {
            c.roc = to_bool(key, value);
        } else if (key == "sweep.keep_cells") {
            c.keep_cells = to_bool(key, value);
        }
    }
    if (!have_seed) throw ConfigError("config must set 'seed' (runs are always seeded)");
    if (c.schemes.empty() || c.families.empty() || c.active_counts.empty()) {
        throw ConfigError("scheme, family and active_groups lists must be non-empty");
    }
    if (!c.active_names.empty() && c.schemes.size() != 1) {
        throw ConfigError("experiment.active_names requires a single scheme");
    }
    if (c.alpha_points < 1) throw ConfigError("experiment.alpha_points must be positive");
    if (c.replicates < 1) throw ConfigError("experiment.replicates must be positive");
    if (c.tuning.folds < 2) throw ConfigError("solver.folds must be at least 2");
    c.base.replicates = c.replicates;
    c.tuning.seed = c.seed;
    return c;
}

std::vector<GridCell> expand_grid(const SweepConfig& cfg)
{
    std::vector<GridCell> cells;
    for (Scheme scheme : cfg.schemes) {
        const std::vector<int> counts = cfg.active_names.empty() ? cfg.active_counts : std::vector<int>{0};
        for (int count : counts) {
            for (Family family : cfg.families) {
                ExperimentConfig ec = cfg.base;
                ec.scheme = scheme;
                ec.family = family;
                ec.active_groups = cfg.active_names.empty() ? preset_active_groups(scheme, count) : cfg.active_names;
                std::vector<double> alphas = cfg.alphas;
                if (alphas.empty()) {
                    // Support size is a property of the layout; probe it with a one-row design.
                    ExperimentConfig probe = ec;
                    std::size_t support = 0;
                    if (probe.design_path) {
                        const Dataset d = io::read_dataset(*probe.design_path);
                        CommunityMap cm = d.communities;
                        const GroupSpec spec = make_groups(scheme, cm, d.index);
                        support = make_beta(spec, ec.active_groups, 1.0).support.size();
                    } else {
                        const int n = ec.communities * ec.nodes_per_community;
                        const FeatureIndex idx(n, ec.covariates);
                        std::vector<int> sizes(static_cast<std::size_t>(ec.communities), ec.nodes_per_community);
                        const GroupSpec spec = make_groups(scheme, contiguous_communities(sizes), idx);
                        support = make_beta(spec, ec.active_groups, 1.0).support.size();
                    }
                    alphas = alpha_grid(cfg.alpha_points, support, cfg.snr_min, cfg.snr_max);
                }
                const std::string groups_label =
                    cfg.active_names.empty() ? std::to_string(count) + "grp" : std::to_string(ec.active_groups.size()) + "named";
                for (std::size_t a = 0; a < alphas.size(); ++a) {
                    GridCell cell;
                    ec.alpha = alphas[a];
                    cell.config = ec;
                    char idx[32];
                    std::snprintf(idx, sizeof idx, "a%02zu", a + 1);
                    cell.label = std::string(to_string(scheme)) + "_" + groups_label + "_" +
                                 std::string(to_string(family)) + "_" + idx;
                    cell.seed = derive_seed(cfg.seed, cells.size());
                    cells.push_back(std::move(cell));
                }
            }
        }
    }
    return cells;
}

void cmd_simulate(const fs::path& config_file, const fs::path& out_dir, std::optional<std::uint64_t> seed_override)
{
    const auto started = std::chrono::steady_clock::now();
    KeyValues kv = io::read_key_values(config_file);
    if (seed_override) kv.emplace_back("seed", std::to_string(*seed_override));
    const SweepConfig cfg = parse_sweep_config(kv);
    const auto cells = expand_grid(cfg);
    const bool single = cells.size() == 1 && cfg.replicates == 1;
    fs::create_directories(out_dir);
    const std::size_t jobs = cells.size() * static_cast<std::size_t>(cfg.replicates);
    parallel_for(jobs, [&](std::size_t job) {
        const auto& cell = cells[job / cfg.replicates];
        const int rep = static_cast<int>(job % cfg.replicates);
        const std::uint64_t seed = derive_seed(cell.seed, static_cast<std::uint64_t>(rep));
        const SimulatedCell sim = simulate_cell(cell.config, seed);
        const fs::path dir = single ? out_dir : out_dir / cell.label / ("rep_" + std::to_string(rep + 1));
        io::write_dataset(dir, sim.data, truth_manifest(sim, cell.config));
        write_truth(dir, sim, cell.config, seed);
        write_groups(dir / "groups.csv", sim.groups);
    });
    KeyValues entries = cfg.resolved();
    entries.emplace_back("config", config_file.string());
    entries.emplace_back("output", out_dir.string());
    entries.emplace_back("cells", std::to_string(cells.size()));
    write_run_manifest(out_dir, "simulate", entries, started);
}

void cmd_fit(const fs::path& data_dir, const FitOptions& options, const fs::path& out_dir)
{
    const auto started = std::chrono::steady_clock::now();
    Dataset data = io::read_dataset(data_dir);
    if (options.split_communities > 0) {
        data.communities = split_communities(data.communities, options.split_communities,
                                             derive_seed(options.tuning.seed, 0x5b117));
    }
    const GroupSpec spec = make_groups(options.scheme, data.communities, data.index);
    const TunedFit tuned = run_tuned(data, spec, options.tuning);
    write_fit_outputs(out_dir, tuned, spec, data, options.scheme);
    if (options.split_communities > 0) io::write_communities(out_dir / "communities.csv", data.communities);
    write_run_manifest(out_dir, "fit",
                       {{"data", data_dir.string()},
                        {"output", out_dir.string()},
                        {"scheme", std::string(to_string(options.scheme))},
                        {"seed", std::to_string(options.tuning.seed)},
                        {"folds", std::to_string(options.tuning.folds)},
                        {"grid_size", std::to_string(options.tuning.grid_size)},
                        {"min_ratio", fmt(options.tuning.min_ratio)},
                        {"max_iter", std::to_string(options.tuning.solver.max_iter)},
                        {"tolerance", fmt(options.tuning.solver.tolerance)},
                        {"split_communities", std::to_string(options.split_communities)},
                        {"communities", std::to_string(data.communities.n_communities())}},
                       started);
}

void cmd_cpm(const fs::path& data_dir, const fs::path& out_dir, double alpha)
{
    const auto started = std::chrono::steady_clock::now();
    const Dataset data = io::read_dataset(data_dir);
    if (data.family != Family::gaussian) throw DataError("CPM supports continuous (gaussian) responses only");
    const TrainSplit tr = training_split(data);
    const CpmModel model = cpm_fit(tr.Z, tr.y, data.index, alpha);
    fs::create_directories(out_dir);

    std::set<Index> pos(model.positive_edges.begin(), model.positive_edges.end());
    std::set<Index> neg(model.negative_edges.begin(), model.negative_edges.end());
    CsvWriter edges;
    edges.field("edge_index").field("k").field("l").field("r").field("p").field("sign").end_row();
    for (const auto& s : model.screening) {
        const auto [k, l] = data.index.edge_endpoints(s.feature);
        const int sign = pos.count(s.feature) ? 1 : (neg.count(s.feature) ? -1 : 0);
        edges.field(static_cast<long long>(s.feature + 1)).field(k + 1).field(l + 1).field(s.r).field(s.p_value).field(sign).end_row();
    }
    edges.save(out_dir / "cpm_edges.csv");

    MetricsRow row;
    row.family = data.family;
    row.method = "cpm";
    row.lambda = alpha;
    row.n_active_groups = model.positive_edges.size() + model.negative_edges.size();
    if (!data.test_rows.empty()) {
        const VectorXd pred = cpm_predict(model, take_rows(data.Z, data.test_rows));
        io::write_vector(out_dir / "predictions.csv", pred);
        row.prediction = prediction_metrics(pred, take_rows(data.y, data.test_rows), data.family);
    }
    CsvWriter m;
    metrics_header(m, false);
    metrics_row(m, row, false);
    m.save(out_dir / "metrics.csv");

    const KeyValues cpm_model{{"method", "cpm"},
                              {"threshold", fmt(alpha)},
                              {"intercept", fmt(model.intercept)},
                              {"slope_pos", fmt(model.slope_pos)},
                              {"slope_neg", fmt(model.slope_neg)},
                              {"n_positive", std::to_string(model.positive_edges.size())},
                              {"n_negative", std::to_string(model.negative_edges.size())}};
    io::write_file_atomic(out_dir / "model", io::format_key_values(cpm_model));
    write_run_manifest(out_dir, "cpm", {{"data", data_dir.string()}, {"output", out_dir.string()}, {"alpha", fmt(alpha)}},
                       started);
}

void cmd_evaluate(const fs::path& fit_dir, const fs::path& data_dir, const fs::path& out_dir)
{
    const auto started = std::chrono::steady_clock::now();
    if (!fs::exists(fit_dir / "model") || !fs::exists(fit_dir / "coef.csv")) {
        throw DataError("fit directory " + fit_dir.string() + " lacks model or coef.csv");
    }
    const KeyValues model_kv = io::read_key_values(fit_dir / "model");
    const auto get = [&](const char* key) -> std::string {
        const std::string* v = io::find_key(model_kv, key);
        if (v == nullptr) throw DataError(std::string("model file lacks '") + key + "'");
        return *v;
    };
    const Dataset data = io::read_dataset(data_dir);
    LinearModel model;
    model.family = parse_family(get("family"));
    model.intercept = io::parse_double(get("intercept"));
    model.coef = io::read_vector(fit_dir / "coef.csv");
    const Index p = io::parse_int(get("p"));
    if (p != data.index.p() || model.coef.size() != p) {
        throw ShapeError("fit has p=" + std::to_string(p) + " but the dataset has p=" + std::to_string(data.index.p()));
    }
    if (fs::exists(fit_dir / "nuisance_coef.csv")) model.nuisance_coef = io::read_vector(fit_dir / "nuisance_coef.csv");

    MetricsRow row;
    row.family = data.family;
    row.method = get("method");
    row.lambda = io::parse_double(get("lambda"));
    std::vector<std::string> active;
    if (fs::exists(fit_dir / "active_groups.csv")) {
        for (const auto& r : io::read_csv(fit_dir / "active_groups.csv")) active.push_back(r.at(0));
    }
    row.n_active_groups = active.size();
    if (auto pred = test_predictions(model, data)) {
        row.prediction = prediction_metrics(*pred, take_rows(data.y, data.test_rows), data.family);
    }

    fs::create_directories(out_dir);
    const bool has_truth = fs::exists(data_dir / "truth.csv");
    CsvWriter roc;
    roc_header(roc, false);
    if (has_truth) {
        VectorXd truth = VectorXd::Zero(p);
        for (const auto& r : io::read_csv(data_dir / "truth.csv")) {
            const long long j = io::parse_int(r.at(0));
            if (j < 1 || j > p) throw ShapeError("truth.csv feature index out of range");
            truth(j - 1) = io::parse_double(r.at(1));
        }
        const VectorXd beta = fs::exists(fit_dir / "beta.csv") ? io::read_vector(fit_dir / "beta.csv") : model.coef;
        row.support = support_metrics(beta, truth);
        const KeyValues manifest = io::read_key_values(data_dir / "manifest");
        if (const auto* s = io::find_key(manifest, "truth.scheme")) row.scheme = *s;
        if (const auto* g = io::find_key(manifest, "truth.active_groups")) {
            if (row.method == row.scheme) {
                row.groups = group_support_metrics(active, split_list(*g, ';'),
                                                   static_cast<std::size_t>(io::parse_int(get("n_groups"))));
            }
        }
        if (fs::exists(data_dir / "scenario.csv")) {
            const auto sc = io::read_csv(data_dir / "scenario.csv");
            if (sc.size() >= 2) {
                row.alpha = io::parse_double(sc[1].at(0));
                row.difficulty = io::parse_double(sc[1].at(1));
            }
        }
        // ROC along the stored path.
        PathFit path;
        const auto cv = io::read_csv(fit_dir / "cv.csv");
        for (std::size_t k = 1; k < cv.size(); ++k) {
            const fs::path coef = fit_dir / ("coef_" + std::to_string(k) + ".csv");
            if (!fs::exists(coef)) throw DataError("missing " + coef.string());
            PathEntry e;
            e.lambda = io::parse_double(cv[k].at(1));
            e.beta = io::read_vector(coef);
            if (e.beta.size() != p) throw ShapeError(coef.filename().string() + " has the wrong length");
            path.entries.push_back(std::move(e));
        }
        roc_rows(roc, row.method, roc_along_path(path, truth), "", 0, false);
    }
    CsvWriter m;
    metrics_header(m, false);
    metrics_row(m, row, false);
    m.save(out_dir / "metrics.csv");
    if (has_truth) roc.save(out_dir / "roc.csv");
    write_run_manifest(out_dir, "evaluate",
                       {{"fit", fit_dir.string()}, {"data", data_dir.string()}, {"output", out_dir.string()}}, started);
}

void cmd_sweep(const fs::path& config_file, const fs::path& out_dir, std::optional<std::uint64_t> seed_override)
{
    const auto started = std::chrono::steady_clock::now();
    KeyValues kv = io::read_key_values(config_file);
    if (seed_override) kv.emplace_back("seed", std::to_string(*seed_override));
    const SweepConfig cfg = parse_sweep_config(kv);
    const auto cells = expand_grid(cfg);
    const std::size_t jobs = cells.size() * static_cast<std::size_t>(cfg.replicates);
    std::vector<std::string> metric_chunks(jobs), roc_chunks(jobs);
    fs::create_directories(out_dir);

    parallel_for(jobs, [&](std::size_t job) {
        const auto& cell = cells[job / cfg.replicates];
        const int rep = static_cast<int>(job % cfg.replicates);
        const std::uint64_t seed = derive_seed(cell.seed, static_cast<std::uint64_t>(rep));
        const SimulatedCell sim = simulate_cell(cell.config, seed);
        const fs::path cell_dir = out_dir / "cells" / cell.label / ("rep_" + std::to_string(rep + 1));
        if (cfg.keep_cells) {
            io::write_dataset(cell_dir / "data", sim.data, truth_manifest(sim, cell.config));
            write_truth(cell_dir / "data", sim, cell.config, seed);
        }
        CsvWriter mw, rw;
        TuningOptions tuning = cfg.tuning;
        tuning.seed = derive_seed(seed, 0xc7);
        for (const auto& method : cfg.methods) {
            const Scheme scheme = method == "lasso" ? Scheme::singleton
                                  : method == "netcov" ? cell.config.scheme
                                                       : parse_scheme(method);
            const GroupSpec spec = scheme == cell.config.scheme ? sim.groups
                                                                : make_groups(scheme, sim.data.communities, sim.data.index);
            const TunedFit tuned = run_tuned(sim.data, spec, tuning);
            MetricsRow row;
            row.cell = cell.label;
            row.replicate = rep + 1;
            row.scheme = std::string(to_string(cell.config.scheme));
            row.family = cell.config.family;
            row.alpha = cell.config.alpha;
            row.difficulty = sim.difficulty;
            row.method = std::string(to_string(scheme));
            row.lambda = tuned.fit.lambda;
            row.n_active_groups = tuned.fit.active_groups.size();
            row.support = support_metrics(tuned.fit.beta, sim.truth.beta);
            if (scheme == cell.config.scheme) {
                row.groups = group_support_metrics(tuned.fit.active_groups, sim.truth.active_groups, spec.size());
            }
            if (auto pred = test_predictions(tuned.fit.model, sim.data)) {
                row.prediction = prediction_metrics(*pred, take_rows(sim.data.y, sim.data.test_rows), sim.data.family);
            }
            metrics_row(mw, row, true);
            if (cfg.roc) roc_rows(rw, row.method, roc_along_path(tuned.path, sim.truth.beta), cell.label, rep + 1, true);
            if (cfg.keep_cells) write_fit_outputs(cell_dir / row.method, tuned, spec, sim.data, scheme);
        }
        metric_chunks[job] = mw.str();
        roc_chunks[job] = rw.str();
    });

    CsvWriter header;
    metrics_header(header, true);
    std::string metrics = header.str();
    for (const auto& c : metric_chunks) metrics += c;
    io::write_file_atomic(out_dir / "metrics.csv", metrics);
    if (cfg.roc) {
        CsvWriter rh;
        roc_header(rh, true);
        std::string roc = rh.str();
        for (const auto& c : roc_chunks) roc += c;
        io::write_file_atomic(out_dir / "roc.csv", roc);
    }
    KeyValues entries = cfg.resolved();
    entries.emplace_back("config", config_file.string());
    entries.emplace_back("output", out_dir.string());
    entries.emplace_back("cells", std::to_string(cells.size()));
    write_run_manifest(out_dir, "sweep", entries, started);
}

int exit_code_for(const std::exception& e)
{
    if (dynamic_cast<const ConfigError*>(&e)) return 2;
    if (dynamic_cast<const DataError*>(&e)) return 3;
    if (dynamic_cast<const NumericalError*>(&e) || dynamic_cast<const ConvergenceError*>(&e)) return 4;
    return 1;
}

} // namespace netcov::cli
