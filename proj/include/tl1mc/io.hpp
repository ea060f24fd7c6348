#pragma once

#include "tl1mc/core.hpp"
#include "tl1mc/evaluation.hpp"
#include "tl1mc/synthetic.hpp"

#include "json.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace tl1mc::io {

enum class MatrixFormat { Text, Csv };

/// Text: "rows cols" header, then one row per line, whitespace separated.
/// Csv: one row per line, comma separated, no header. Values are written
/// as shortest round-trip decimals.
void write_matrix(std::ostream& os, const DenseMatrix& m, MatrixFormat format = MatrixFormat::Text);
DenseMatrix read_matrix(std::istream& is, MatrixFormat format = MatrixFormat::Text);

void write_matrix_file(const std::filesystem::path& path, const DenseMatrix& m,
                       MatrixFormat format = MatrixFormat::Text);
DenseMatrix read_matrix_file(const std::filesystem::path& path, MatrixFormat format = MatrixFormat::Text);

/// "rows cols n" header, then n lines of "row col value" (0-based).
void write_observations(std::ostream& os, const ObservationSet& obs);
ObservationSet read_observations(std::istream& is);
void write_observations_file(const std::filesystem::path& path, const ObservationSet& obs);
ObservationSet read_observations_file(const std::filesystem::path& path);

/// Same layout for a plain entry list (validation / evaluation sets).
void write_entries_file(const std::filesystem::path& path, Index rows, Index cols, const std::vector<Entry>& entries);
std::vector<Entry> read_entries_file(const std::filesystem::path& path);

struct RatingDataset {
    Index n_users = 0;
    Index n_items = 0;
    std::vector<Entry> train;  // value = rating
    std::vector<Entry> test;
    double scale_max = 5.0;
    std::size_t accepted_lines = 0;
    std::vector<std::string> warnings;
};

/// MovieLens u.data layout: "user \t item \t rating \t timestamp", 1-based
/// ids. Dimensions are the largest ids seen across both files.
RatingDataset parse_movielens(std::istream& train, std::istream& test);
RatingDataset parse_movielens_files(const std::filesystem::path& train, const std::filesystem::path& test);

/// Coat layout: dense users x items integer matrix, 0 = unobserved.
RatingDataset parse_coat(std::istream& train, std::istream& test);
RatingDataset parse_coat_files(const std::filesystem::path& train, const std::filesystem::path& test);

/// Random disjoint split of the test set: round(fraction |test|) entries go
/// to validation, the rest to evaluation.
std::pair<std::vector<Entry>, std::vector<Entry>> split_test(const RatingDataset& dataset, double fraction,
                                                             std::uint64_t seed);

/// Scenario from JSON: {"m1", "m2", "rank", "scheme", "sr", "snr" (number or
/// null), "seed"}. m2 defaults to m1; snr absent means noiseless.
ScenarioSpec scenario_from_json(const nlohmann::json& j);

/// Grid from JSON: {"lambda_multipliers": [...], "a_values": [...],
/// "max_iters", "tol", "tau"}; missing keys take the defaults.
TuningGrid grid_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

} // namespace tl1mc::io
