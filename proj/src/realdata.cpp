#include "tl1mc/realdata.hpp"

#include "tl1mc/admm.hpp"
#include "tl1mc/errors.hpp"

namespace tl1mc {

RealDataResult run_realdata(const io::RatingDataset& data, const TuningGrid& grid, const RealDataOptions& options)
{
    grid.validate();
    if (data.train.empty()) {
        throw InvalidArgument("realdata: training set is empty");
    }
    if (!(options.clamp_lo < options.clamp_hi)) {
        throw InvalidArgument("realdata: empty prediction range");
    }
    auto [validation, evaluation] = io::split_test(data, options.validation_fraction, options.seed);
    if (validation.empty() || evaluation.empty()) {
        throw InvalidArgument("realdata: test set too small to split");
    }
    const ObservationSet obs(data.n_users, data.n_items, data.train);

    TuningGrid g = grid;
    g.fixed.zeta = options.zeta;
    g.fixed.rho = SolverConfig::rho_for(obs.size());
    const auto range = std::make_pair(options.clamp_lo, options.clamp_hi);
    const TuningContext ctx = TuningContext::against_validation(validation, range);

    RealDataResult out;
    out.n_train = obs.size();
    out.n_validation = validation.size();
    out.n_evaluation = evaluation.size();
    for (Regularizer method : options.methods) {
        GridSearchResult search = grid_search(obs, g, ctx, method);
        RealDataMethodResult r;
        r.method = method;
        r.tuned = search.best;
        r.config = search.best_config;
        r.validation_trmse = search.best_score;
        const SolveReport rep = solve(obs, search.best_config);
        r.evaluation_trmse = trmse(clamp_range(rep.estimate, options.clamp_lo, options.clamp_hi), evaluation);
        r.estimated_rank = estimate_rank(rep.low_rank, options.rank_threshold);
        r.iterations = rep.iterations;
        r.converged = rep.converged;
        r.seconds = rep.elapsed_seconds;
        out.methods.push_back(r);
        out.searches.push_back(std::move(search));
    }
    return out;
}

nlohmann::json realdata_json(const RealDataResult& result, const TuningGrid& grid, const RealDataOptions& options)
{
    nlohmann::json j;
    j["protocol"] = "test set split into validation/evaluation; tuned on validation TRMSE; "
                    "predictions clamped to the rating range before scoring";
    j["validation_fraction"] = options.validation_fraction;
    j["seed"] = options.seed;
    j["zeta"] = options.zeta;
    j["prediction_range"] = {options.clamp_lo, options.clamp_hi};
    j["rank_threshold"] = options.rank_threshold;
    j["rho_times_n"] = kRhoTimesN;
    j["grid"] = to_json(grid);
    j["n_train"] = result.n_train;
    j["n_validation"] = result.n_validation;
    j["n_evaluation"] = result.n_evaluation;
    j["methods"] = nlohmann::json::array();
    for (std::size_t i = 0; i < result.methods.size(); ++i) {
        const auto& m = result.methods[i];
        nlohmann::json e;
        e["method"] = std::string(to_string(m.method));
        e["config"] = to_json(m.config);
        e["lambda_multiplier"] = m.tuned.lambda_multiplier;
        e["validation_trmse"] = m.validation_trmse;
        e["evaluation_trmse"] = m.evaluation_trmse;
        e["estimated_rank"] = m.estimated_rank;
        e["iterations"] = m.iterations;
        e["converged"] = m.converged;
        e["seconds"] = m.seconds;
        nlohmann::json surface = nlohmann::json::array();
        for (const auto& c : result.searches[i].surface) {
            surface.push_back(to_json(c));
        }
        e["surface"] = std::move(surface);
        j["methods"].push_back(std::move(e));
    }
    return j;
}

} // namespace tl1mc
