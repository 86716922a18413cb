#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "netcov/core_data.hpp"

namespace netcov::io {

namespace fs = std::filesystem;

/// Shortest round-trip decimal form; NaN prints as "NA".
std::string format_double(double x);
double parse_double(std::string_view s);
long long parse_int(std::string_view s);

/// Headerless comma-separated rows; double-quoted fields may contain commas.
std::vector<std::vector<std::string>> read_csv(const fs::path& path);

MatrixXd read_matrix(const fs::path& path);
/// Reads a single-column file (or a single row) as a vector.
VectorXd read_vector(const fs::path& path);

/// Accumulates CSV text; fields with commas or quotes are quoted.
class CsvWriter
{
public:
    CsvWriter& field(std::string_view s);
    CsvWriter& field(double x);
    CsvWriter& field(long long x);
    CsvWriter& field(int x) { return field(static_cast<long long>(x)); }
    CsvWriter& field(std::size_t x) { return field(static_cast<long long>(x)); }
    CsvWriter& end_row();

    const std::string& str() const { return buf_; }
    void save(const fs::path& path) const;

private:
    std::string buf_;
    bool row_open_ = false;
};

void write_matrix(const fs::path& path, const MatrixXd& m);
void write_vector(const fs::path& path, const VectorXd& v);

/// Write to a sibling temporary file, then rename into place.
void write_file_atomic(const fs::path& path, std::string_view contents);
std::string read_file(const fs::path& path);

/// Ordered `key = value` lines; '#' starts a comment.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

KeyValues parse_key_values(std::string_view text);
KeyValues read_key_values(const fs::path& path);
std::string format_key_values(const KeyValues& kv);
const std::string* find_key(const KeyValues& kv, std::string_view key);

} // namespace netcov::io
