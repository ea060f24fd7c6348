#pragma once

#include "tl1mc/evaluation.hpp"
#include "tl1mc/io.hpp"

#include "json.hpp"

#include <cstdint>
#include <vector>

namespace tl1mc {

struct RealDataOptions {
    double validation_fraction = 0.5;
    std::uint64_t seed = 0;
    double zeta = 5.0;
    double clamp_lo = 1.0;
    double clamp_hi = 5.0;
    std::vector<Regularizer> methods{Regularizer::TL1, Regularizer::Nuclear};
    double rank_threshold = 1e-2;
};

struct RealDataMethodResult {
    Regularizer method = Regularizer::TL1;
    GridCell tuned;
    SolverConfig config;
    double validation_trmse = 0.0;
    double evaluation_trmse = 0.0;
    int estimated_rank = 0;
    int iterations = 0;
    bool converged = false;
    double seconds = 0.0;
};

struct RealDataResult {
    std::size_t n_train = 0;
    std::size_t n_validation = 0;
    std::size_t n_evaluation = 0;
    std::vector<RealDataMethodResult> methods;
    std::vector<GridSearchResult> searches;
};

/// Split the test set into validation/evaluation halves, tune on validation
/// TRMSE (predictions clamped to the rating range), report evaluation TRMSE
/// and rank of the refit at the tuned config.
RealDataResult run_realdata(const io::RatingDataset& data, const TuningGrid& grid, const RealDataOptions& options);

nlohmann::json realdata_json(const RealDataResult& result, const TuningGrid& grid, const RealDataOptions& options);

} // namespace tl1mc
