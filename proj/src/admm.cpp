#include "tl1mc/admm.hpp"

#include "tl1mc/errors.hpp"
#include "tl1mc/kernels.hpp"
#include "tl1mc/regularizers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

namespace tl1mc {

namespace {

void check_dims(const DenseMatrix& m, const ObservationSet& obs, const char* name)
{
    if (m.rows() != obs.rows() || m.cols() != obs.cols()) {
        throw InvalidArgument(std::string("ADMM: ") + name + " does not match the observation dimensions");
    }
}

struct ZStep {
    DenseMatrix z;
    Vector shrunk;  // singular values of z, descending
};

ZStep z_step(const DenseMatrix& a, const DenseMatrix& w, const SolverConfig& config)
{
    DenseMatrix arg;
    kernels::omp::shifted(a, w, 1.0 / config.rho, arg);
    const Svd d = svd(arg);
    ZStep out;
    out.shrunk = shrink_singular_values(d.singular, config.regularizer, {config.lambda / config.rho, config.a});
    out.z = compose(d.u, out.shrunk, d.v);
    return out;
}

double data_fit(const ObservationSet& obs, const DenseMatrix& m)
{
    double acc = 0.0;
    for (const auto& e : obs.samples()) {
        const double r = e.value - m(e.row, e.col);
        acc += r * r;
    }
    return acc / static_cast<double>(obs.size());
}

} // namespace

double data_weight(const ObservationSet& obs) { return 2.0 / static_cast<double>(obs.size()); }

DenseMatrix a_update(const AdmmState& state, const ObservationSet& obs, const SolverConfig& config)
{
    config.validate();
    check_dims(state.z, obs, "Z");
    check_dims(state.w, obs, "W");
    DenseMatrix out;
    kernels::omp::a_update(obs.mask(), obs.filled(), state.z, state.w, data_weight(obs), config.rho, config.zeta,
                           out);
    return out;
}

DenseMatrix z_update(const AdmmState& state, const SolverConfig& config)
{
    config.validate();
    return z_step(state.a, state.w, config).z;
}

DenseMatrix w_update(const AdmmState& state, const SolverConfig& config)
{
    config.validate();
    DenseMatrix w = state.w;
    kernels::omp::dual_ascent(w, state.a, state.z, config.tau * config.rho);
    return w;
}

double objective(const ObservationSet& obs, const DenseMatrix& m, const SolverConfig& config)
{
    check_dims(m, obs, "matrix");
    return data_fit(obs, m) + config.lambda * penalty_from_singular(singular_values(m), config.regularizer, config.a);
}

SolveReport solve(const ObservationSet& obs, const SolverConfig& config)
{
    config.validate();
    const auto start = std::chrono::steady_clock::now();

    AdmmState state;
    state.z = obs.filled();
    state.w = DenseMatrix::Zero(obs.rows(), obs.cols());
    state.a = state.z;

    SolveReport report;
    report.primal_residuals.reserve(static_cast<std::size_t>(config.max_iters));
    report.objective_trace.reserve(static_cast<std::size_t>(config.max_iters));

    const double weight = data_weight(obs);
    Vector shrunk;
    DenseMatrix a_next;
    for (int k = 0; k < config.max_iters; ++k) {
        kernels::omp::a_update(obs.mask(), obs.filled(), state.z, state.w, weight, config.rho, config.zeta, a_next);
        if (!a_next.allFinite()) {
            throw NumericalError("ADMM diverged: non-finite A at iteration " + std::to_string(k + 1));
        }
        ZStep zs;
        try {
            zs = z_step(a_next, state.w, config);
        } catch (const NumericalError& e) {
            throw NumericalError("ADMM diverged at iteration " + std::to_string(k + 1) + ": " + e.what());
        }
        kernels::omp::dual_ascent(state.w, a_next, zs.z, config.tau * config.rho);
        if (!zs.z.allFinite() || !state.w.allFinite()) {
            throw NumericalError("ADMM diverged: non-finite Z or W at iteration " + std::to_string(k + 1));
        }

        const double change =
            kernels::omp::frobenius_distance(a_next, state.a) / std::max(1.0, state.a.norm());
        report.primal_residuals.push_back(kernels::omp::frobenius_distance(a_next, zs.z));
        report.objective_trace.push_back(data_fit(obs, zs.z) +
                                         config.lambda * penalty_from_singular(zs.shrunk, config.regularizer, config.a));

        std::swap(state.a, a_next);
        state.z = std::move(zs.z);
        shrunk = std::move(zs.shrunk);
        state.iteration = k + 1;
        // A^1 == A^0 == T o Y by construction, so the first change is always 0
        if (k > 0 && change <= config.tol) {
            report.converged = true;
            break;
        }
    }

    report.iterations = state.iteration;
    report.estimated_rank = estimate_rank_from_singular(shrunk);
    report.estimate = clamp_entrywise(state.z, config.zeta);
    report.low_rank = std::move(state.z);
    report.primal = std::move(state.a);
    report.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

int estimate_rank_from_singular(const Vector& singular, double rel_threshold)
{
    if (!(rel_threshold > 0.0 && rel_threshold < 1.0)) {
        throw InvalidArgument("estimate_rank: rel_threshold must lie in (0, 1)");
    }
    if (singular.size() == 0) {
        return 0;
    }
    const double top = singular.maxCoeff();
    if (top <= 0.0) {
        return 0;
    }
    int count = 0;
    for (Index j = 0; j < singular.size(); ++j) {
        if (singular[j] > rel_threshold * top) {
            ++count;
        }
    }
    return count;
}

int estimate_rank(const DenseMatrix& m, double rel_threshold)
{
    return estimate_rank_from_singular(singular_values(m), rel_threshold);
}

} // namespace tl1mc
