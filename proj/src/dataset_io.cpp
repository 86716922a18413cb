#include "netcov/dataset_io.hpp"

#include "netcov/errors.hpp"

namespace netcov::io {

namespace {

long long manifest_int(const KeyValues& kv, std::string_view key)
{
    const std::string* v = find_key(kv, key);
    if (v == nullptr) throw DataError("manifest is missing '" + std::string(key) + "'");
    return parse_int(*v);
}

} // namespace

CommunityMap read_communities(const fs::path& path, int n_nodes)
{
    const auto rows = read_csv(path);
    if (static_cast<int>(rows.size()) != n_nodes) {
        throw DataError("communities.csv has " + std::to_string(rows.size()) + " rows, expected " +
                        std::to_string(n_nodes));
    }
    std::vector<int> labels(static_cast<std::size_t>(n_nodes), 0);
    for (const auto& row : rows) {
        if (row.size() != 2) throw DataError("communities.csv rows must be node_id,community_id");
        const long long node = parse_int(row[0]);
        const long long comm = parse_int(row[1]);
        if (node < 1 || node > n_nodes) throw DataError("communities.csv: node id out of range");
        if (labels[node - 1] != 0) throw DataError("communities.csv: node " + std::to_string(node) + " listed twice");
        if (comm < 1) throw DataError("communities.csv: community ids start at 1");
        labels[node - 1] = static_cast<int>(comm);
    }
    return CommunityMap::from_one_based(labels);
}

void write_communities(const fs::path& path, const CommunityMap& cm)
{
    CsvWriter w;
    for (int node = 0; node < cm.n_nodes(); ++node) w.field(node + 1).field(cm.label(node) + 1).end_row();
    w.save(path);
}

Dataset read_dataset(const fs::path& dir)
{
    if (!fs::is_directory(dir)) throw DataError("dataset directory not found: " + dir.string());
    KeyValues manifest;
    try {
        manifest = read_key_values(dir / "manifest");
    } catch (const ConfigError& e) {
        throw DataError(std::string("dataset manifest: ") + e.what());
    }
    const auto n = static_cast<int>(manifest_int(manifest, "n"));
    const auto d = static_cast<int>(manifest_int(manifest, "d"));
    const auto N = static_cast<Index>(manifest_int(manifest, "N"));
    const std::string* fam = find_key(manifest, "family");
    if (fam == nullptr) throw DataError("manifest is missing 'family'");

    Dataset data;
    data.family = parse_family(*fam);
    data.index = FeatureIndex(n, d);
    const MatrixXd A = read_matrix(dir / "A.csv");
    if (A.rows() != N || A.cols() != data.index.n_edges()) {
        throw ShapeError("A.csv must be " + std::to_string(N) + " x " + std::to_string(data.index.n_edges()));
    }
    MatrixXd X(N, static_cast<Index>(n) * d);
    if (d > 0) {
        X = read_matrix(dir / "X.csv");
        if (X.rows() != N || X.cols() != static_cast<Index>(n) * d) {
            throw ShapeError("X.csv must be " + std::to_string(N) + " x " + std::to_string(n * d));
        }
    }
    data.Z.resize(N, data.index.p());
    data.Z.leftCols(A.cols()) = A;
    data.Z.rightCols(X.cols()) = X;
    data.y = read_vector(dir / "y.csv");
    if (data.y.size() != N) throw ShapeError("y.csv must have " + std::to_string(N) + " rows");
    if (data.family == Family::binomial) {
        for (Index i = 0; i < N; ++i) {
            if (data.y(i) != 0.0 && data.y(i) != 1.0) throw DataError("binomial responses must be 0 or 1");
        }
    }
    data.communities = read_communities(dir / "communities.csv", n);
    if (fs::exists(dir / "nuisance.csv")) {
        MatrixXd W = read_matrix(dir / "nuisance.csv");
        if (W.rows() != N) throw ShapeError("nuisance.csv must have " + std::to_string(N) + " rows");
        data.nuisance = std::move(W);
    }
    if (fs::exists(dir / "split.csv")) {
        const auto rows = read_csv(dir / "split.csv");
        if (static_cast<Index>(rows.size()) != N) throw ShapeError("split.csv must have one row per observation");
        for (Index i = 0; i < N; ++i) {
            const auto& tag = rows[i].at(0);
            if (tag == "train") {
                data.train_rows.push_back(i);
            } else if (tag == "test") {
                data.test_rows.push_back(i);
            } else if (tag != "unused") {
                throw DataError("split.csv entries must be train, test or unused");
            }
        }
    } else {
        Index n_train = N;
        if (find_key(manifest, "n_train") != nullptr) n_train = manifest_int(manifest, "n_train");
        if (n_train < 1 || n_train > N) throw DataError("manifest n_train out of range");
        for (Index i = 0; i < N; ++i) (i < n_train ? data.train_rows : data.test_rows).push_back(i);
    }
    return data;
}

void write_dataset(const fs::path& dir, const Dataset& data, const KeyValues& extra_manifest)
{
    fs::create_directories(dir);
    const Index edges = data.index.n_edges();
    write_matrix(dir / "A.csv", data.Z.leftCols(edges));
    if (data.index.n_covariates() > 0) write_matrix(dir / "X.csv", data.Z.rightCols(data.Z.cols() - edges));
    write_vector(dir / "y.csv", data.y);
    write_communities(dir / "communities.csv", data.communities);
    if (data.nuisance) write_matrix(dir / "nuisance.csv", *data.nuisance);

    bool leading_train = true;
    for (std::size_t i = 0; i < data.train_rows.size(); ++i) {
        if (data.train_rows[i] != static_cast<Index>(i)) leading_train = false;
    }
    leading_train = leading_train && data.train_rows.size() + data.test_rows.size() ==
                                         static_cast<std::size_t>(data.n_samples());
    KeyValues manifest{{"n", std::to_string(data.index.n_nodes())},
                       {"d", std::to_string(data.index.n_covariates())},
                       {"N", std::to_string(data.n_samples())},
                       {"family", std::string(to_string(data.family))},
                       {"variance_convention", "1/N"}};
    if (leading_train) {
        manifest.emplace_back("n_train", std::to_string(data.train_rows.size()));
    } else {
        std::vector<std::string> tag(static_cast<std::size_t>(data.n_samples()), "unused");
        for (Index i : data.train_rows) tag[i] = "train";
        for (Index i : data.test_rows) tag[i] = "test";
        CsvWriter w;
        for (const auto& t : tag) w.field(t).end_row();
        w.save(dir / "split.csv");
    }
    manifest.insert(manifest.end(), extra_manifest.begin(), extra_manifest.end());
    write_file_atomic(dir / "manifest", format_key_values(manifest));
}

} // namespace netcov::io
