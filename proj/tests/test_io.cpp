#include <doctest.h>

#include <filesystem>

#include "netcov/dataset_io.hpp"
#include "netcov/errors.hpp"
#include "netcov/simgen.hpp"

using namespace netcov;
namespace fs = std::filesystem;

namespace {
fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("netcov_test_" + name);
    fs::remove_all(p);
    return p;
}
} // namespace

TEST_SUITE("io") {

TEST_CASE("number formatting round-trips")
{
    for (double x : {0.1, -3.0, 1e-300, 123456789.125, 2.0 / 3.0}) CHECK(io::parse_double(io::format_double(x)) == x);
    CHECK(io::format_double(std::nan("")) == "NA");
    CHECK(io::format_double(0.0) == "0");
    CHECK_THROWS_AS(io::parse_double("abc"), DataError);
    CHECK(io::parse_int("42") == 42);
}

TEST_CASE("key-value parsing")
{
    const auto kv = io::parse_key_values("# comment\na = 1\n b=two words \n\n");
    REQUIRE(kv.size() == 2);
    CHECK(kv[1].second == "two words");
    CHECK(*io::find_key(kv, "a") == "1");
    CHECK(io::find_key(kv, "c") == nullptr);
    CHECK_THROWS_AS(io::parse_key_values("no equals sign"), ConfigError);
}

TEST_CASE("csv quoting")
{
    const fs::path dir = scratch("csv");
    fs::create_directories(dir);
    io::CsvWriter w;
    w.field("a,b").field("say \"hi\"").field(1.5).end_row();
    w.save(dir / "x.csv");
    const auto rows = io::read_csv(dir / "x.csv");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0][0] == "a,b");
    CHECK(rows[0][1] == "say \"hi\"");
    CHECK(rows[0][2] == "1.5");
}

TEST_CASE("dataset round trip with split and nuisance")
{
    ExperimentConfig c;
    c.communities = 2;
    c.nodes_per_community = 3;
    c.n_train = 10;
    c.n_test = 5;
    SimulatedCell s = simulate_cell(c, 3);
    s.data.nuisance = MatrixXd::Random(15, 2);
    const fs::path dir = scratch("ds");
    io::write_dataset(dir, s.data);
    const Dataset back = io::read_dataset(dir);
    CHECK(back.Z.isApprox(s.data.Z, 1e-15));
    CHECK(back.y == s.data.y);
    CHECK(back.communities == s.data.communities);
    CHECK(back.train_rows == s.data.train_rows);
    CHECK(back.test_rows == s.data.test_rows);
    REQUIRE(back.nuisance);
    CHECK(back.nuisance->isApprox(*s.data.nuisance, 1e-15));

    // Interleaved split goes through split.csv.
    s.data.train_rows = {0, 2, 4};
    s.data.test_rows = {1, 3};
    io::write_dataset(dir, s.data);
    const Dataset b2 = io::read_dataset(dir);
    CHECK(b2.train_rows == s.data.train_rows);
    CHECK(b2.test_rows == s.data.test_rows);
}

TEST_CASE("malformed datasets are data errors")
{
    const fs::path dir = scratch("bad");
    CHECK_THROWS_AS(io::read_dataset(dir), DataError);
    ExperimentConfig c;
    c.communities = 2;
    c.nodes_per_community = 2;
    c.n_train = 5;
    c.n_test = 0;
    io::write_dataset(dir, simulate_cell(c, 1).data);
    io::write_file_atomic(dir / "y.csv", "1\n2\n");
    CHECK_THROWS_AS(io::read_dataset(dir), DataError);
}

}
