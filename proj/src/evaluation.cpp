#include "tl1mc/evaluation.hpp"

#include "tl1mc/admm.hpp"
#include "tl1mc/errors.hpp"
#include "tl1mc/format.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <ostream>

namespace tl1mc {

double relative_error(const DenseMatrix& estimate, const DenseMatrix& truth)
{
    if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols()) {
        throw InvalidArgument("relative_error: dimension mismatch");
    }
    const double denom = truth.norm();
    if (denom == 0.0) {
        throw InvalidArgument("relative_error: truth has zero Frobenius norm");
    }
    return (estimate - truth).norm() / denom;
}

double trmse(const DenseMatrix& estimate, const std::vector<Entry>& entries)
{
    if (entries.empty()) {
        throw InvalidArgument("trmse: empty evaluation set");
    }
    double acc = 0.0;
    for (const auto& e : entries) {
        if (e.row < 0 || e.row >= estimate.rows() || e.col < 0 || e.col >= estimate.cols()) {
            throw InvalidArgument("trmse: entry out of bounds");
        }
        const double d = estimate(e.row, e.col) - e.value;
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(entries.size()));
}

TuningGrid TuningGrid::defaults()
{
    TuningGrid g;
    g.lambda_multipliers = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
    g.a_values = {0.1, 1, 10, 20, 50, 100, 200, 500, 600, 900, 1500, 3000};
    return g;
}

void TuningGrid::validate() const
{
    if (lambda_multipliers.empty() || a_values.empty()) {
        throw InvalidArgument("TuningGrid: lambda and a lists must be non-empty");
    }
    for (double x : lambda_multipliers) {
        if (!(x > 0.0)) {
            throw InvalidArgument("TuningGrid: lambda multipliers must be positive");
        }
    }
    for (double x : a_values) {
        if (!(x > 0.0)) {
            throw InvalidArgument("TuningGrid: a values must be positive");
        }
    }
}

TuningContext TuningContext::against_truth(DenseMatrix truth)
{
    TuningContext c;
    c.objective = TuningObjective::RelativeErrorVsTruth;
    c.truth = std::move(truth);
    return c;
}

TuningContext TuningContext::against_validation(std::vector<Entry> validation,
                                                std::optional<std::pair<double, double>> range)
{
    TuningContext c;
    c.objective = TuningObjective::TrmseOnValidation;
    c.validation = std::move(validation);
    c.prediction_range = range;
    return c;
}

double score_estimate(const DenseMatrix& estimate, const TuningContext& context)
{
    if (context.objective == TuningObjective::RelativeErrorVsTruth) {
        if (!context.truth) {
            throw InvalidArgument("grid_search: RE objective needs the ground truth");
        }
        return relative_error(estimate, *context.truth);
    }
    if (context.validation.empty()) {
        throw InvalidArgument("grid_search: TRMSE objective needs validation entries");
    }
    if (context.prediction_range) {
        return trmse(clamp_range(estimate, context.prediction_range->first, context.prediction_range->second),
                     context.validation);
    }
    return trmse(estimate, context.validation);
}

namespace {

bool better(const GridCell& c, const GridCell& best)
{
    if (c.score != best.score) {
        return c.score < best.score;
    }
    if (c.a != best.a) {
        return c.a < best.a;
    }
    return c.lambda < best.lambda;
}

} // namespace

GridSearchResult grid_search(const ObservationSet& obs, const TuningGrid& grid, const TuningContext& context,
                             Regularizer method)
{
    grid.validate();
    const std::vector<double> a_values =
        method == Regularizer::TL1 ? grid.a_values : std::vector<double>{grid.fixed.a};
    const double scale = obs.response_norm();

    std::vector<GridCell> cells;
    for (double a : a_values) {
        for (double mult : grid.lambda_multipliers) {
            GridCell c;
            c.a = a;
            c.lambda_multiplier = mult;
            c.lambda = mult * scale;
            cells.push_back(c);
        }
    }

    std::exception_ptr failure;
    const auto count = static_cast<long>(cells.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < count; ++i) {
        GridCell& c = cells[static_cast<std::size_t>(i)];
        SolverConfig cfg = grid.fixed;
        cfg.lambda = c.lambda;
        cfg.a = c.a;
        cfg.regularizer = method;
        try {
            const SolveReport r = solve(obs, cfg);
            c.score = score_estimate(r.estimate, context);
            c.estimated_rank = estimate_rank(r.low_rank, context.rank_threshold);
            c.iterations = r.iterations;
            c.converged = r.converged;
            c.seconds = r.elapsed_seconds;
        } catch (const NumericalError&) {
            c.score = std::numeric_limits<double>::infinity();
        } catch (...) {
#pragma omp critical(tl1mc_grid_failure)
            if (!failure) {
                failure = std::current_exception();
            }
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    GridSearchResult result;
    result.surface = cells;
    result.best = cells.front();
    for (const auto& c : cells) {
        if (better(c, result.best)) {
            result.best = c;
        }
    }
    result.best_score = result.best.score;
    result.best_config = grid.fixed;
    result.best_config.lambda = result.best.lambda;
    result.best_config.a = result.best.a;
    result.best_config.regularizer = method;
    return result;
}

SolverConfig synthetic_config(const SyntheticInstance& instance, const SolverConfig& base)
{
    SolverConfig cfg = base;
    cfg.zeta = 1.2 * max_abs(instance.truth);
    cfg.rho = SolverConfig::rho_for(instance.obs.size());
    return cfg;
}

std::vector<ASweepRow> a_sweep(const ScenarioSpec& scenario, const std::vector<double>& a_values,
                               const TuningGrid& grid, double rank_threshold)
{
    if (a_values.empty()) {
        throw InvalidArgument("a_sweep: no a values");
    }
    const SyntheticInstance inst = make_instance(scenario);
    TuningGrid g = grid;
    g.fixed = synthetic_config(inst, grid.fixed);
    TuningContext ctx = TuningContext::against_truth(inst.truth);
    ctx.rank_threshold = rank_threshold;

    std::vector<ASweepRow> rows;
    for (double a : a_values) {
        g.a_values = {a};
        const GridSearchResult r = grid_search(inst.obs, g, ctx, Regularizer::TL1);
        rows.push_back({a, r.best.lambda_multiplier, r.best.lambda, r.best_score, r.best.estimated_rank});
    }
    return rows;
}

void write_a_sweep_csv(std::ostream& os, const std::vector<ASweepRow>& rows)
{
    os << "a,lambda_multiplier,lambda,relative_error,estimated_rank\n";
    for (const auto& r : rows) {
        os << format_double(r.a) << ',' << format_double(r.lambda_multiplier) << ',' << format_double(r.lambda)
           << ',' << format_double(r.relative_error) << ',' << r.estimated_rank << '\n';
    }
}

std::pair<double, double> mean_std(const std::vector<double>& values)
{
    if (values.empty()) {
        return {0.0, 0.0};
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    const double mean = sum / static_cast<double>(values.size());
    if (values.size() < 2) {
        return {mean, 0.0};
    }
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

std::vector<CellAggregate> aggregate(const std::vector<TrialRecord>& records)
{
    std::vector<CellAggregate> out;
    std::size_t i = 0;
    while (i < records.size()) {
        std::size_t j = i;
        std::vector<double> re, rank, secs;
        while (j < records.size() && records[j].scenario == records[i].scenario &&
               records[j].method == records[i].method) {
            re.push_back(records[j].relative_error);
            rank.push_back(records[j].estimated_rank);
            secs.push_back(records[j].seconds);
            ++j;
        }
        CellAggregate agg;
        agg.scenario = records[i].scenario;
        agg.method = records[i].method;
        agg.trials = static_cast<int>(j - i);
        std::tie(agg.mean_re, agg.std_re) = mean_std(re);
        agg.mean_rank = mean_std(rank).first;
        agg.mean_seconds = mean_std(secs).first;
        agg.tuned_lambda_multiplier = records[i].lambda_multiplier;
        agg.tuned_a = records[i].a;
        out.push_back(agg);
        i = j;
    }
    return out;
}

CampaignResult run_campaign(const std::vector<ScenarioSpec>& scenarios, const std::vector<Regularizer>& methods,
                            int trials, const TuningGrid& grid, double rank_threshold)
{
    if (trials < 1) {
        throw InvalidArgument("run_campaign: trials must be >= 1");
    }
    if (scenarios.empty() || methods.empty()) {
        throw InvalidArgument("run_campaign: need at least one scenario and one method");
    }
    grid.validate();

    CampaignResult result;
    result.scenarios = scenarios;
    result.methods = methods;
    result.trials = trials;

    for (std::size_t s = 0; s < scenarios.size(); ++s) {
        const ScenarioSpec& base = scenarios[s];
        base.validate();
        const SyntheticInstance tuning = make_instance(base);
        TuningGrid g = grid;
        g.fixed = synthetic_config(tuning, grid.fixed);
        TuningContext ctx = TuningContext::against_truth(tuning.truth);
        ctx.rank_threshold = rank_threshold;

        for (Regularizer method : methods) {
            const GridSearchResult tuned = grid_search(tuning.obs, g, ctx, method);
            std::vector<TrialRecord> block(static_cast<std::size_t>(trials));
            std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
            for (int t = 0; t < trials; ++t) {
                TrialRecord& rec = block[static_cast<std::size_t>(t)];
                rec.scenario = s;
                rec.method = method;
                rec.trial = t;
                rec.seed = base.seed + 1 + static_cast<std::uint64_t>(t);
                rec.lambda_multiplier = tuned.best.lambda_multiplier;
                rec.a = tuned.best.a;
                try {
                    ScenarioSpec spec = base;
                    spec.seed = rec.seed;
                    const SyntheticInstance inst = make_instance(spec);
                    SolverConfig cfg = synthetic_config(inst, grid.fixed);
                    cfg.regularizer = method;
                    cfg.a = tuned.best.a;
                    cfg.lambda = tuned.best.lambda_multiplier * inst.obs.response_norm();
                    rec.lambda = cfg.lambda;
                    try {
                        const SolveReport r = solve(inst.obs, cfg);
                        rec.relative_error = relative_error(r.estimate, inst.truth);
                        rec.estimated_rank = estimate_rank(r.low_rank, rank_threshold);
                        rec.iterations = r.iterations;
                        rec.converged = r.converged;
                        rec.seconds = r.elapsed_seconds;
                    } catch (const NumericalError&) {
                        rec.relative_error = std::numeric_limits<double>::infinity();
                    }
                } catch (...) {
#pragma omp critical(tl1mc_campaign_failure)
                    if (!failure) {
                        failure = std::current_exception();
                    }
                }
            }
            if (failure) {
                std::rethrow_exception(failure);
            }
            result.records.insert(result.records.end(), block.begin(), block.end());
        }
    }
    result.aggregates = aggregate(result.records);
    return result;
}

void write_campaign_csv(std::ostream& os, const CampaignResult& result)
{
    os << "scenario,m1,m2,rank,scheme,sampling_ratio,snr_db,method,trial,seed,lambda_multiplier,a,lambda,"
          "relative_error,estimated_rank,iterations,converged\n";
    for (const auto& r : result.records) {
        const ScenarioSpec& s = result.scenarios.at(r.scenario);
        os << r.scenario << ',' << s.m1 << ',' << s.m2 << ',' << s.rank << ',' << static_cast<int>(s.scheme) << ','
           << format_double(s.sampling_ratio) << ',' << (s.snr_db ? format_double(*s.snr_db) : "none") << ','
           << to_string(r.method) << ',' << r.trial << ',' << r.seed << ',' << format_double(r.lambda_multiplier)
           << ',' << format_double(r.a) << ',' << format_double(r.lambda) << ',' << format_double(r.relative_error)
           << ',' << r.estimated_rank << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << '\n';
    }
}

nlohmann::json to_json(const ScenarioSpec& s)
{
    nlohmann::json j;
    j["m1"] = s.m1;
    j["m2"] = s.m2;
    j["rank"] = s.rank;
    j["scheme"] = static_cast<int>(s.scheme);
    j["sampling_ratio"] = s.sampling_ratio;
    j["snr_db"] = s.snr_db ? nlohmann::json(*s.snr_db) : nlohmann::json(nullptr);
    j["seed"] = s.seed;
    return j;
}

nlohmann::json to_json(const SolverConfig& c)
{
    return {{"lambda", c.lambda},   {"a", c.a},
            {"zeta", c.zeta},       {"rho", c.rho},
            {"tau", c.tau},         {"max_iters", c.max_iters},
            {"tol", c.tol},         {"regularizer", std::string(to_string(c.regularizer))}};
}

nlohmann::json to_json(const TuningGrid& g)
{
    nlohmann::json j;
    j["lambda_multipliers"] = g.lambda_multipliers;
    j["a_values"] = g.a_values;
    j["fixed"] = to_json(g.fixed);
    return j;
}

nlohmann::json to_json(const GridCell& c)
{
    return {{"lambda_multiplier", c.lambda_multiplier},
            {"lambda", c.lambda},
            {"a", c.a},
            {"score", std::isfinite(c.score) ? nlohmann::json(c.score) : nlohmann::json("inf")},
            {"estimated_rank", c.estimated_rank},
            {"iterations", c.iterations},
            {"converged", c.converged},
            {"seconds", c.seconds}};
}

nlohmann::json campaign_json(const CampaignResult& result, const TuningGrid& grid)
{
    nlohmann::json j;
    j["protocol"] = "tune once on the scenario seed, evaluate the frozen lambda multiplier and a on fresh seeds";
    j["trials"] = result.trials;
    j["grid"] = to_json(grid);
    j["rho_times_n"] = kRhoTimesN;
    j["zeta_rule"] = "1.2 * max|A0|";
    nlohmann::json scen = nlohmann::json::array();
    for (const auto& s : result.scenarios) {
        scen.push_back(to_json(s));
    }
    j["scenarios"] = scen;
    nlohmann::json methods = nlohmann::json::array();
    for (auto m : result.methods) {
        methods.push_back(std::string(to_string(m)));
    }
    j["methods"] = methods;
    nlohmann::json aggs = nlohmann::json::array();
    for (const auto& a : result.aggregates) {
        aggs.push_back({{"scenario", a.scenario},
                        {"method", std::string(to_string(a.method))},
                        {"trials", a.trials},
                        {"mean_re", a.mean_re},
                        {"std_re", a.std_re},
                        {"mean_rank", a.mean_rank},
                        {"mean_seconds", a.mean_seconds},
                        {"tuned_lambda_multiplier", a.tuned_lambda_multiplier},
                        {"tuned_a", a.tuned_a}});
    }
    j["aggregates"] = aggs;
    nlohmann::json timing = nlohmann::json::array();
    for (const auto& r : result.records) {
        timing.push_back({{"scenario", r.scenario},
                          {"method", std::string(to_string(r.method))},
                          {"trial", r.trial},
                          {"seconds", r.seconds}});
    }
    j["trial_seconds"] = timing;
    return j;
}

} // namespace tl1mc
