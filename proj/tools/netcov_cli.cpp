#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "netcov/errors.hpp"

using namespace netcov;
using namespace netcov::cli;

int main(int argc, char** argv)
{
    CLI::App app{"netcov: group-lasso prediction from networks plus node covariates"};
    app.set_version_flag("--version", std::string(version));
    app.require_subcommand(1);

    std::string config, data, out, fit_dir, scheme = "ebg";
    std::optional<std::uint64_t> seed;
    std::uint64_t fit_seed = 1;
    FitOptions fit;
    double cpm_alpha = 0.01;

    auto* sim = app.add_subcommand("simulate", "Generate simulated datasets from a config");
    sim->add_option("--config", config, "key = value config file")->required()->check(CLI::ExistingFile);
    sim->add_option("--out", out, "output directory")->required();
    sim->add_option("--seed", seed, "override the config seed");

    auto* fitc = app.add_subcommand("fit", "Tune by cross-validation and fit one grouping scheme");
    fitc->add_option("--data", data, "dataset directory")->required()->check(CLI::ExistingDirectory);
    fitc->add_option("--scheme", scheme, "nbg, ebg or lasso")->check(CLI::IsMember({"nbg", "ebg", "lasso", "singleton"}));
    fitc->add_option("--out", out, "output directory")->required();
    fitc->add_option("--seed", fit_seed, "fold assignment seed");
    fitc->add_option("--folds", fit.tuning.folds, "cross-validation folds")->check(CLI::Range(2, 1000000));
    fitc->add_option("--grid-size", fit.tuning.grid_size, "lambda grid points")->check(CLI::Range(1, 1000000));
    fitc->add_option("--min-ratio", fit.tuning.min_ratio, "lambda_min / lambda_max")->check(CLI::Range(1e-12, 1.0));
    fitc->add_option("--max-iter", fit.tuning.solver.max_iter, "solver iteration cap")->check(CLI::PositiveNumber);
    fitc->add_option("--tolerance", fit.tuning.solver.tolerance, "solver tolerance")->check(CLI::PositiveNumber);
    fitc->add_option("--split-communities", fit.split_communities, "split communities to this target size (0 = off)")
        ->check(CLI::NonNegativeNumber);

    auto* cpm = app.add_subcommand("cpm", "Connectome-based predictive modelling baseline");
    cpm->add_option("--data", data, "dataset directory")->required()->check(CLI::ExistingDirectory);
    cpm->add_option("--out", out, "output directory")->required();
    cpm->add_option("--alpha", cpm_alpha, "edge screening p-value threshold")->check(CLI::Range(0.0, 1.0));

    auto* eval = app.add_subcommand("evaluate", "Score a fit against a dataset and its truth");
    eval->add_option("--fit", fit_dir, "fit output directory")->required()->check(CLI::ExistingDirectory);
    eval->add_option("--data", data, "dataset directory")->required()->check(CLI::ExistingDirectory);
    eval->add_option("--out", out, "output directory")->required();

    auto* sweep = app.add_subcommand("sweep", "Simulate, fit and evaluate a whole grid");
    sweep->add_option("--config", config, "key = value config file")->required()->check(CLI::ExistingFile);
    sweep->add_option("--out", out, "output directory")->required();
    sweep->add_option("--seed", seed, "override the config seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) {
            cmd_simulate(config, out, seed);
        } else if (fitc->parsed()) {
            fit.scheme = parse_scheme(scheme);
            fit.tuning.seed = fit_seed;
            if (fit.split_communities == 1) throw ConfigError("--split-communities must be 0 or at least 2");
            cmd_fit(data, fit, out);
        } else if (cpm->parsed()) {
            cmd_cpm(data, out, cpm_alpha);
        } else if (eval->parsed()) {
            cmd_evaluate(fit_dir, data, out);
        } else if (sweep->parsed()) {
            cmd_sweep(config, out, seed);
        }
    } catch (const std::exception& e) {
        std::cerr << "netcov: " << e.what() << "\n";
        return exit_code_for(e);
    }
    return 0;
}
