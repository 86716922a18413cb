#include "netcov/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "netcov/errors.hpp"

namespace netcov::io {

std::string format_double(double x)
{
    if (std::isnan(x)) return "NA";
    if (x == 0.0) return "0";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

} // namespace

double parse_double(std::string_view s)
{
    s = trim(s);
    if (s == "NA" || s == "nan" || s == "NaN") return std::nan("");
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double x = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw DataError("not a number: '" + std::string(s) + "'");
    }
    return x;
}

long long parse_int(std::string_view s)
{
    s = trim(s);
    long long x = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw DataError("not an integer: '" + std::string(s) + "'");
    }
    return x;
}

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path)
{
    const std::string text = read_file(path);
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string cell;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cell.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell.push_back(c);
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
            any = true;
        } else if (c == ',') {
            row.push_back(std::move(cell));
            cell.clear();
            any = true;
        } else if (c == '\n') {
            if (any || !cell.empty()) {
                row.push_back(std::move(cell));
                rows.push_back(std::move(row));
            }
            row.clear();
            cell.clear();
            any = false;
        } else if (c != '\r') {
            cell.push_back(c);
        }
    }
    if (quoted) throw DataError("unterminated quote in " + path.string());
    if (any || !cell.empty()) {
        row.push_back(std::move(cell));
        rows.push_back(std::move(row));
    }
    return rows;
}

MatrixXd read_matrix(const fs::path& path)
{
    const auto rows = read_csv(path);
    if (rows.empty()) return MatrixXd(0, 0);
    const std::size_t cols = rows.front().size();
    MatrixXd m(static_cast<Index>(rows.size()), static_cast<Index>(cols));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols) {
            throw DataError(path.filename().string() + ": row " + std::to_string(i + 1) + " has " +
                            std::to_string(rows[i].size()) + " fields, expected " + std::to_string(cols));
        }
        for (std::size_t j = 0; j < cols; ++j) {
            m(static_cast<Index>(i), static_cast<Index>(j)) = parse_double(rows[i][j]);
        }
    }
    return m;
}

VectorXd read_vector(const fs::path& path)
{
    MatrixXd m = read_matrix(path);
    if (m.cols() == 1) return m.col(0);
    if (m.rows() == 1) return m.row(0).transpose();
    if (m.size() == 0) return VectorXd(0);
    throw DataError(path.filename().string() + " must have a single column");
}

CsvWriter& CsvWriter::field(std::string_view s)
{
    if (row_open_) buf_.push_back(',');
    row_open_ = true;
    if (s.find_first_of(",\"\n") == std::string_view::npos) {
        buf_.append(s);
        return *this;
    }
    buf_.push_back('"');
    for (char c : s) {
        if (c == '"') buf_.push_back('"');
        buf_.push_back(c);
    }
    buf_.push_back('"');
    return *this;
}

CsvWriter& CsvWriter::field(double x) { return field(std::string_view(format_double(x))); }

CsvWriter& CsvWriter::field(long long x) { return field(std::string_view(std::to_string(x))); }

CsvWriter& CsvWriter::end_row()
{
    buf_.push_back('\n');
    row_open_ = false;
    return *this;
}

void CsvWriter::save(const fs::path& path) const { write_file_atomic(path, buf_); }

void write_matrix(const fs::path& path, const MatrixXd& m)
{
    CsvWriter w;
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) w.field(m(i, j));
        w.end_row();
    }
    w.save(path);
}

void write_vector(const fs::path& path, const VectorXd& v)
{
    CsvWriter w;
    for (Index i = 0; i < v.size(); ++i) w.field(v(i)).end_row();
    w.save(path);
}

void write_file_atomic(const fs::path& path, std::string_view contents)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw DataError("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

KeyValues parse_key_values(std::string_view text)
{
    KeyValues kv;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        const auto key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        kv.emplace_back(std::string(key), std::string(trim(line.substr(eq + 1))));
    }
    return kv;
}

KeyValues read_key_values(const fs::path& path)
{
    std::string text;
    try {
        text = read_file(path);
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
    return parse_key_values(text);
}

std::string format_key_values(const KeyValues& kv)
{
    std::string out;
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
    return out;
}

const std::string* find_key(const KeyValues& kv, std::string_view key)
{
    const std::string* found = nullptr;
    for (const auto& [k, v] : kv) {
        if (k == key) found = &v;
    }
    return found;
}

} // namespace netcov::io
