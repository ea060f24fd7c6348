#include "tl1mc/io.hpp"

#include "tl1mc/errors.hpp"
#include "tl1mc/format.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace tl1mc::io {

namespace {

std::vector<std::string_view> split_fields(std::string_view line, char sep)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        if (sep == ' ') {
            while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) {
                ++i;
            }
            if (i >= line.size()) {
                break;
            }
            std::size_t j = i;
            while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') {
                ++j;
            }
            out.push_back(line.substr(i, j - i));
            i = j;
        } else {
            std::size_t j = line.find(sep, i);
            if (j == std::string_view::npos) {
                j = line.size();
            }
            std::string_view f = line.substr(i, j - i);
            while (!f.empty() && (f.back() == '\r' || f.back() == ' ')) {
                f.remove_suffix(1);
            }
            while (!f.empty() && f.front() == ' ') {
                f.remove_prefix(1);
            }
            out.push_back(f);
            i = j + 1;
        }
    }
    return out;
}

bool is_blank(std::string_view line)
{
    return std::all_of(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

double to_double(std::string_view s, long line)
{
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ParseError("expected a number, got '" + std::string(s) + "'", line);
    }
    return v;
}

long long to_integer(std::string_view s, long line)
{
    long long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ParseError("expected an integer, got '" + std::string(s) + "'", line);
    }
    return v;
}

std::ifstream open_in(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw InvalidArgument("cannot open '" + path.string() + "' for reading");
    }
    return in;
}

std::ofstream open_out(const std::filesystem::path& path)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) {
        throw InvalidArgument("cannot open '" + path.string() + "' for writing");
    }
    return out;
}

// Reads "rows cols [n]" headers and "row col value" triples.
struct TripletFile {
    Index rows = 0;
    Index cols = 0;
    std::vector<Entry> entries;
};

TripletFile read_triplets(std::istream& is)
{
    TripletFile out;
    std::string line;
    long lineno = 0;
    bool header = false;
    long long expected = -1;
    while (std::getline(is, line)) {
        ++lineno;
        if (is_blank(line)) {
            continue;
        }
        const auto f = split_fields(line, ' ');
        if (!header) {
            if (f.size() != 3) {
                throw ParseError("observation header must be 'rows cols n'", lineno);
            }
            out.rows = to_integer(f[0], lineno);
            out.cols = to_integer(f[1], lineno);
            expected = to_integer(f[2], lineno);
            if (out.rows <= 0 || out.cols <= 0 || expected < 0) {
                throw ParseError("invalid observation header", lineno);
            }
            header = true;
            continue;
        }
        if (f.size() != 3) {
            throw ParseError("expected 'row col value'", lineno);
        }
        out.entries.push_back({to_integer(f[0], lineno), to_integer(f[1], lineno), to_double(f[2], lineno)});
    }
    if (!header) {
        throw ParseError("missing observation header");
    }
    if (static_cast<long long>(out.entries.size()) != expected) {
        throw ParseError("header announces " + std::to_string(expected) + " entries, found " +
                         std::to_string(out.entries.size()));
    }
    return out;
}

} // namespace

void write_matrix(std::ostream& os, const DenseMatrix& m, MatrixFormat format)
{
    const char sep = format == MatrixFormat::Csv ? ',' : ' ';
    if (format == MatrixFormat::Text) {
        os << m.rows() << ' ' << m.cols() << '\n';
    }
    for (Index r = 0; r < m.rows(); ++r) {
        for (Index c = 0; c < m.cols(); ++c) {
            if (c > 0) {
                os << sep;
            }
            os << format_double(m(r, c));
        }
        os << '\n';
    }
}

DenseMatrix read_matrix(std::istream& is, MatrixFormat format)
{
    std::string line;
    long lineno = 0;
    std::vector<std::vector<double>> rows;
    Index want_rows = -1;
    Index want_cols = -1;
    while (std::getline(is, line)) {
        ++lineno;
        if (is_blank(line)) {
            continue;
        }
        const auto f = split_fields(line, format == MatrixFormat::Csv ? ',' : ' ');
        if (format == MatrixFormat::Text && want_rows < 0) {
            if (f.size() != 2) {
                throw ParseError("matrix header must be 'rows cols'", lineno);
            }
            want_rows = to_integer(f[0], lineno);
            want_cols = to_integer(f[1], lineno);
            if (want_rows <= 0 || want_cols <= 0) {
                throw ParseError("matrix dimensions must be positive", lineno);
            }
            continue;
        }
        std::vector<double> row;
        row.reserve(f.size());
        for (auto field : f) {
            row.push_back(to_double(field, lineno));
        }
        if (want_cols < 0) {
            want_cols = static_cast<Index>(row.size());
        }
        if (static_cast<Index>(row.size()) != want_cols) {
            throw ParseError("row has " + std::to_string(row.size()) + " values, expected " +
                                 std::to_string(want_cols),
                             lineno);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw ParseError("matrix file has no rows");
    }
    if (want_rows >= 0 && static_cast<Index>(rows.size()) != want_rows) {
        throw ParseError("header announces " + std::to_string(want_rows) + " rows, found " +
                         std::to_string(rows.size()));
    }
    DenseMatrix m(static_cast<Index>(rows.size()), want_cols);
    for (Index r = 0; r < m.rows(); ++r) {
        for (Index c = 0; c < m.cols(); ++c) {
            m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        }
    }
    require_finite(m, "read_matrix");
    return m;
}

void write_matrix_file(const std::filesystem::path& path, const DenseMatrix& m, MatrixFormat format)
{
    auto out = open_out(path);
    write_matrix(out, m, format);
}

DenseMatrix read_matrix_file(const std::filesystem::path& path, MatrixFormat format)
{
    auto in = open_in(path);
    return read_matrix(in, format);
}

void write_observations(std::ostream& os, const ObservationSet& obs)
{
    os << obs.rows() << ' ' << obs.cols() << ' ' << obs.size() << '\n';
    for (const auto& e : obs.samples()) {
        os << e.row << ' ' << e.col << ' ' << format_double(e.value) << '\n';
    }
}

ObservationSet read_observations(std::istream& is)
{
    TripletFile t = read_triplets(is);
    return ObservationSet(t.rows, t.cols, std::move(t.entries));
}

void write_observations_file(const std::filesystem::path& path, const ObservationSet& obs)
{
    auto out = open_out(path);
    write_observations(out, obs);
}

ObservationSet read_observations_file(const std::filesystem::path& path)
{
    auto in = open_in(path);
    return read_observations(in);
}

void write_entries_file(const std::filesystem::path& path, Index rows, Index cols, const std::vector<Entry>& entries)
{
    auto out = open_out(path);
    out << rows << ' ' << cols << ' ' << entries.size() << '\n';
    for (const auto& e : entries) {
        out << e.row << ' ' << e.col << ' ' << format_double(e.value) << '\n';
    }
}

std::vector<Entry> read_entries_file(const std::filesystem::path& path)
{
    auto in = open_in(path);
    TripletFile t = read_triplets(in);
    for (const auto& e : t.entries) {
        if (e.row < 0 || e.row >= t.rows || e.col < 0 || e.col >= t.cols) {
            throw ParseError("entry (" + std::to_string(e.row) + ", " + std::to_string(e.col) + ") out of bounds");
        }
    }
    return std::move(t.entries);
}

namespace {

std::vector<Entry> parse_movielens_stream(std::istream& is, const char* name, RatingDataset& ds)
{
    std::vector<Entry> out;
    std::set<std::pair<Index, Index>> seen;
    std::string line;
    long lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (is_blank(line)) {
            continue;
        }
        const auto f = split_fields(line, ' ');
        if (f.size() != 4) {
            throw ParseError(std::string(name) + ": expected 'user item rating timestamp'", lineno);
        }
        const long long user = to_integer(f[0], lineno);
        const long long item = to_integer(f[1], lineno);
        const double rating = to_double(f[2], lineno);
        to_integer(f[3], lineno);
        if (user < 1 || item < 1) {
            throw ParseError(std::string(name) + ": ids are 1-based", lineno);
        }
        if (!(rating >= 1.0 && rating <= ds.scale_max)) {
            throw InvalidArgument(std::string(name) + ": rating " + format_double(rating) + " outside [1, " +
                                  format_double(ds.scale_max) + "] at line " + std::to_string(lineno));
        }
        if (!seen.emplace(user - 1, item - 1).second) {
            throw ParseError(std::string(name) + ": duplicate (user, item) pair", lineno);
        }
        out.push_back({static_cast<Index>(user - 1), static_cast<Index>(item - 1), rating});
        ds.n_users = std::max<Index>(ds.n_users, user);
        ds.n_items = std::max<Index>(ds.n_items, item);
        ++ds.accepted_lines;
    }
    if (out.empty()) {
        ds.warnings.push_back(std::string(name) + " contains no ratings");
    }
    return out;
}

std::vector<Entry> parse_coat_stream(std::istream& is, const char* name, RatingDataset& ds, Index& rows,
                                     Index& cols)
{
    std::vector<Entry> out;
    std::string line;
    long lineno = 0;
    Index r = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (is_blank(line)) {
            continue;
        }
        const auto f = split_fields(line, ' ');
        if (cols < 0) {
            cols = static_cast<Index>(f.size());
        }
        if (static_cast<Index>(f.size()) != cols) {
            throw ParseError(std::string(name) + ": row " + std::to_string(r) + " has " + std::to_string(f.size()) +
                                 " columns, expected " + std::to_string(cols),
                             lineno);
        }
        for (Index c = 0; c < cols; ++c) {
            const double v = to_double(f[static_cast<std::size_t>(c)], lineno);
            if (!(v >= 0.0 && v <= ds.scale_max)) {
                throw InvalidArgument(std::string(name) + ": rating " + format_double(v) + " outside [0, " +
                                      format_double(ds.scale_max) + "] at line " + std::to_string(lineno));
            }
            if (v != 0.0) {
                out.push_back({r, c, v});
            }
        }
        ++r;
        ++ds.accepted_lines;
    }
    rows = std::max(rows, r);
    if (out.empty()) {
        ds.warnings.push_back(std::string(name) + " contains no ratings");
    }
    return out;
}

} // namespace

RatingDataset parse_movielens(std::istream& train, std::istream& test)
{
    RatingDataset ds;
    ds.scale_max = 5.0;
    ds.train = parse_movielens_stream(train, "train", ds);
    ds.test = parse_movielens_stream(test, "test", ds);
    return ds;
}

RatingDataset parse_movielens_files(const std::filesystem::path& train, const std::filesystem::path& test)
{
    auto a = open_in(train);
    auto b = open_in(test);
    return parse_movielens(a, b);
}

RatingDataset parse_coat(std::istream& train, std::istream& test)
{
    RatingDataset ds;
    ds.scale_max = 5.0;
    Index rows_train = 0, rows_test = 0;
    Index cols_train = -1, cols_test = -1;
    ds.train = parse_coat_stream(train, "train", ds, rows_train, cols_train);
    ds.test = parse_coat_stream(test, "test", ds, rows_test, cols_test);
    if (cols_train >= 0 && cols_test >= 0 && (cols_train != cols_test || rows_train != rows_test)) {
        throw ParseError("train and test matrices have different shapes");
    }
    ds.n_users = std::max(rows_train, rows_test);
    ds.n_items = std::max<Index>(std::max<Index>(cols_train, cols_test), 0);
    return ds;
}

RatingDataset parse_coat_files(const std::filesystem::path& train, const std::filesystem::path& test)
{
    auto a = open_in(train);
    auto b = open_in(test);
    return parse_coat(a, b);
}

std::pair<std::vector<Entry>, std::vector<Entry>> split_test(const RatingDataset& dataset, double fraction,
                                                             std::uint64_t seed)
{
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw InvalidArgument("split_test: fraction must lie in (0, 1)");
    }
    if (dataset.test.empty()) {
        throw InvalidArgument("split_test: empty test set");
    }
    std::vector<std::size_t> order(dataset.test.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(derive_seed(seed, Stream::Split));
    // Explicit Fisher-Yates; std::shuffle's draw pattern is library-specific.
    for (std::size_t i = order.size(); i > 1; --i) {
        std::uniform_int_distribution<std::size_t> pick(0, i - 1);
        std::swap(order[i - 1], order[pick(rng)]);
    }
    const auto n_val = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(order.size())));
    std::vector<Entry> validation, evaluation;
    for (std::size_t i = 0; i < order.size(); ++i) {
        (i < n_val ? validation : evaluation).push_back(dataset.test[order[i]]);
    }
    return {std::move(validation), std::move(evaluation)};
}

ScenarioSpec scenario_from_json(const nlohmann::json& j)
{
    try {
        ScenarioSpec s;
        s.m1 = j.at("m1").get<Index>();
        s.m2 = j.contains("m2") ? j.at("m2").get<Index>() : s.m1;
        s.rank = j.at("rank").get<Index>();
        s.scheme = scheme_from_int(j.value("scheme", 1));
        s.sampling_ratio = j.at("sr").get<double>();
        if (j.contains("snr") && !j.at("snr").is_null()) {
            s.snr_db = j.at("snr").get<double>();
        }
        s.seed = j.value("seed", std::uint64_t{0});
        s.validate();
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("scenario config: ") + e.what());
    }
}

TuningGrid grid_from_json(const nlohmann::json& j)
{
    try {
        TuningGrid g = TuningGrid::defaults();
        if (j.contains("lambda_multipliers")) {
            g.lambda_multipliers = j.at("lambda_multipliers").get<std::vector<double>>();
        }
        if (j.contains("a_values")) {
            g.a_values = j.at("a_values").get<std::vector<double>>();
        }
        g.fixed.max_iters = j.value("max_iters", g.fixed.max_iters);
        g.fixed.tol = j.value("tol", g.fixed.tol);
        g.fixed.tau = j.value("tau", g.fixed.tau);
        g.validate();
        return g;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("grid config: ") + e.what());
    }
}

nlohmann::json read_json_file(const std::filesystem::path& path)
{
    auto in = open_in(path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j)
{
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

} // namespace tl1mc::io
