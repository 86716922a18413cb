#pragma once

#include <filesystem>

#include "netcov/core_data.hpp"
#include "netcov/csv_io.hpp"

namespace netcov::io {

/**
 * Dataset directory layout:
 *   A.csv            N x n(n-1)/2 edge weights, canonical edge order
 *   X.csv            N x n*d node covariates, node-major (absent or empty when d = 0)
 *   y.csv            N x 1 response
 *   communities.csv  node_id (1..n), community_id (1..K)
 *   manifest         key = value: n, d, N, family, optional n_train
 *   nuisance.csv     optional N x q
 *   split.csv        optional N x 1 of "train"/"test"; overrides n_train
 * Without split information every row is a training row.
 */
Dataset read_dataset(const fs::path& dir);

void write_dataset(const fs::path& dir, const Dataset& data, const KeyValues& extra_manifest = {});

CommunityMap read_communities(const fs::path& path, int n_nodes);
void write_communities(const fs::path& path, const CommunityMap& cm);

} // namespace netcov::io
