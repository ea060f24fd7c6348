#pragma once

#include "tl1mc/core.hpp"
#include "tl1mc/synthetic.hpp"

#include "json.hpp"

#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tl1mc {

/// ||estimate - truth||_F / ||truth||_F. Throws InvalidArgument when the
/// truth is zero or dimensions differ.
double relative_error(const DenseMatrix& estimate, const DenseMatrix& truth);

/// Root mean squared error of estimate over the held-out entries.
double trmse(const DenseMatrix& estimate, const std::vector<Entry>& entries);

/// Solver template plus the lambda/a lists searched. lambda values are
/// multipliers of ||Y||_F.
struct TuningGrid {
    std::vector<double> lambda_multipliers;
    std::vector<double> a_values;
    SolverConfig fixed;

    /// lambda in {1e-1, ..., 1e-6}, a in {0.1, 1, 10, ..., 3000}.
    static TuningGrid defaults();
    void validate() const;
};

enum class TuningObjective { RelativeErrorVsTruth, TrmseOnValidation };

/// What a grid cell is scored against.
struct TuningContext {
    TuningObjective objective = TuningObjective::RelativeErrorVsTruth;
    std::optional<DenseMatrix> truth;
    std::vector<Entry> validation;
    /// Predictions are clamped to this range before TRMSE scoring.
    std::optional<std::pair<double, double>> prediction_range;
    double rank_threshold = 1e-2;

    static TuningContext against_truth(DenseMatrix truth);
    static TuningContext against_validation(std::vector<Entry> validation,
                                            std::optional<std::pair<double, double>> range = std::nullopt);
};

struct GridCell {
    double lambda_multiplier = 0.0;
    double lambda = 0.0;
    double a = 0.0;
    double score = std::numeric_limits<double>::infinity();
    int estimated_rank = 0;
    int iterations = 0;
    bool converged = false;
    double seconds = 0.0;
};

struct GridSearchResult {
    SolverConfig best_config;
    GridCell best;
    double best_score = std::numeric_limits<double>::infinity();
    std::vector<GridCell> surface;  // lambda-major within each a, a in grid order
};

/// Scores a finished solve under the context.
double score_estimate(const DenseMatrix& estimate, const TuningContext& context);

/// Full solve per grid cell (parallel over cells). Diverging cells score
/// +inf. Ties go to the smaller a, then the smaller lambda. For the
/// nuclear regularizer the a list is ignored.
GridSearchResult grid_search(const ObservationSet& obs, const TuningGrid& grid, const TuningContext& context,
                             Regularizer method);

/// Solver template for a synthetic instance: zeta = 1.2 ||A0||_inf and the
/// step size matched to n.
SolverConfig synthetic_config(const SyntheticInstance& instance, const SolverConfig& base);

struct ASweepRow {
    double a = 0.0;
    double lambda_multiplier = 0.0;
    double lambda = 0.0;
    double relative_error = 0.0;
    int estimated_rank = 0;
};

/// For each a, tunes lambda only on the scenario's instance.
std::vector<ASweepRow> a_sweep(const ScenarioSpec& scenario, const std::vector<double>& a_values,
                               const TuningGrid& grid, double rank_threshold = 1e-2);

void write_a_sweep_csv(std::ostream& os, const std::vector<ASweepRow>& rows);

struct TrialRecord {
    std::size_t scenario = 0;
    Regularizer method = Regularizer::TL1;
    int trial = 0;
    std::uint64_t seed = 0;
    double lambda_multiplier = 0.0;
    double a = 0.0;
    double lambda = 0.0;
    double relative_error = 0.0;
    int estimated_rank = 0;
    int iterations = 0;
    bool converged = false;
    double seconds = 0.0;
};

struct CellAggregate {
    std::size_t scenario = 0;
    Regularizer method = Regularizer::TL1;
    int trials = 0;
    double mean_re = 0.0;
    double std_re = 0.0;
    double mean_rank = 0.0;
    double mean_seconds = 0.0;
    double tuned_lambda_multiplier = 0.0;
    double tuned_a = 0.0;
};

struct CampaignResult {
    std::vector<ScenarioSpec> scenarios;
    std::vector<Regularizer> methods;
    int trials = 0;
    std::vector<TrialRecord> records;       // (scenario, method, trial) order
    std::vector<CellAggregate> aggregates;  // (scenario, method) order
};

/// Mean and sample standard deviation (0 for a single value).
std::pair<double, double> mean_std(const std::vector<double>& values);

/// Recomputes aggregates from records.
std::vector<CellAggregate> aggregate(const std::vector<TrialRecord>& records);

/// Tune each (scenario, method) on the scenario seed, freeze the lambda
/// multiplier and a, then evaluate on `trials` fresh seeds (seed+1, ...).
CampaignResult run_campaign(const std::vector<ScenarioSpec>& scenarios, const std::vector<Regularizer>& methods,
                            int trials, const TuningGrid& grid, double rank_threshold = 1e-2);

/// Per-trial CSV. Wall time is left out so reruns are byte-identical.
void write_campaign_csv(std::ostream& os, const CampaignResult& result);

/// Aggregates, per-trial timings and the effective configuration.
nlohmann::json campaign_json(const CampaignResult& result, const TuningGrid& grid);

nlohmann::json to_json(const ScenarioSpec& s);
nlohmann::json to_json(const SolverConfig& c);
nlohmann::json to_json(const TuningGrid& g);
nlohmann::json to_json(const GridCell& c);

} // namespace tl1mc
