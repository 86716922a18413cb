#include <doctest.h>

#include <filesystem>

#include "commands.hpp"
#include "netcov/errors.hpp"

using namespace netcov;
using namespace netcov::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("netcov_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_config(const fs::path& dir, const std::string& text)
{
    io::write_file_atomic(dir / "run.cfg", text);
    return dir / "run.cfg";
}

const char* small_config = R"(seed = 5
experiment.scheme = ebg
experiment.active_groups = 1
experiment.family = gaussian
experiment.alpha = 0.5
experiment.replicates = 1
experiment.n_train = 120
experiment.n_test = 40
experiment.communities = 3
experiment.nodes_per_community = 3
solver.grid_size = 15
solver.folds = 4
)";

} // namespace

TEST_SUITE("cli") {

TEST_CASE("config parsing")
{
    const auto cfg = parse_sweep_config(io::parse_key_values(small_config));
    CHECK(cfg.seed == 5);
    CHECK(cfg.tuning.folds == 4);
    CHECK(expand_grid(cfg).size() == 1);
    CHECK_THROWS_AS(parse_sweep_config(io::parse_key_values("experiment.alpha = 1")), ConfigError);
    CHECK_THROWS_AS(parse_sweep_config(io::parse_key_values("seed = 1\nfoo = 2")), ConfigError);
    CHECK_THROWS_AS(parse_sweep_config(io::parse_key_values("seed = 1\nexperiment.alpha = x")), ConfigError);
    const auto preset = parse_sweep_config(io::parse_key_values("seed = 1\nexperiment.preset = experiment1"));
    CHECK(expand_grid(preset).size() == 2 * 2 * 2 * 20);
}

TEST_CASE("simulate, fit, evaluate and cpm")
{
    const fs::path dir = scratch("pipeline");
    const fs::path cfg = write_config(dir, small_config);
    cmd_simulate(cfg, dir / "data", std::nullopt);
    CHECK(fs::exists(dir / "data" / "truth.csv"));
    FitOptions fo;
    fo.tuning.grid_size = 15;
    fo.tuning.folds = 4;
    fo.tuning.seed = 1;
    cmd_fit(dir / "data", fo, dir / "fit");
    for (const char* f : {"cv.csv", "path.csv", "coef.csv", "beta.csv", "model", "coef_15.csv", "run_manifest"})
        CHECK(fs::exists(dir / "fit" / f));
    cmd_evaluate(dir / "fit", dir / "data", dir / "eval");
    const auto rows = io::read_csv(dir / "eval" / "metrics.csv");
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][4] == "ebg");
    CHECK(rows[1][5] == "1");  // recall at alpha 0.5
    CHECK(io::read_csv(dir / "eval" / "roc.csv").size() == 16);
    cmd_cpm(dir / "data", dir / "cpm", 0.01);
    CHECK(io::read_csv(dir / "cpm" / "cpm_edges.csv").size() == 1 + 36);
}

TEST_CASE("a sweep replays from its run_manifest")
{
    const fs::path dir = scratch("replay");
    const fs::path cfg = write_config(dir, small_config);
    cmd_sweep(cfg, dir / "first", std::nullopt);
    cmd_sweep(dir / "first" / "run_manifest", dir / "second", std::nullopt);
    CHECK(io::read_file(dir / "first" / "metrics.csv") == io::read_file(dir / "second" / "metrics.csv"));
}

TEST_CASE("evaluate rejects a fit from a different feature space")
{
    const fs::path dir = scratch("mismatch");
    cmd_simulate(write_config(dir, small_config), dir / "a", std::nullopt);
    std::string other = small_config;
    other.replace(other.find("nodes_per_community = 3"), 23, "nodes_per_community = 4");
    cmd_simulate(write_config(dir, other), dir / "b", std::nullopt);
    FitOptions fo;
    fo.tuning.grid_size = 5;
    fo.tuning.folds = 3;
    cmd_fit(dir / "a", fo, dir / "fit");
    CHECK_THROWS_AS(cmd_evaluate(dir / "fit", dir / "b", dir / "eval"), ShapeError);
}

TEST_CASE("binomial data is refused by cpm")
{
    const fs::path dir = scratch("cpmbin");
    std::string cfg = small_config;
    cfg.replace(cfg.find("family = gaussian"), 17, "family = binomial");
    cmd_simulate(write_config(dir, cfg), dir / "data", std::nullopt);
    CHECK_THROWS_AS(cmd_cpm(dir / "data", dir / "cpm", 0.01), DataError);
}

TEST_CASE("exit codes")
{
    CHECK(exit_code_for(ConfigError("x")) == 2);
    CHECK(exit_code_for(ShapeError("x")) == 3);
    CHECK(exit_code_for(NumericalError("x")) == 4);
    CHECK(exit_code_for(std::runtime_error("x")) == 1);
}

}
