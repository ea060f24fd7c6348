#pragma once

#include "tl1mc/core.hpp"

namespace tl1mc {

/// Iterates of the splitting A = Z with scaled dual W.
struct AdmmState {
    DenseMatrix a;
    DenseMatrix z;
    DenseMatrix w;
    int iteration = 0;
};

/// Weight of the data-fit gradient in the A-update: 2/n.
double data_weight(const ObservationSet& obs);

/// A^{k+1} = clamp((2/n T o Y + rho Z^k - W^k) ./ (2/n T + rho), zeta).
/// At unobserved entries this reduces to clamp(Z - W/rho).
DenseMatrix a_update(const AdmmState& state, const ObservationSet& obs, const SolverConfig& config);

/// Z^{k+1} = prox_{lambda/rho}(A^{k+1} + W^k/rho), applied to the singular
/// values (TL1 prox or soft threshold). Reads A^{k+1} from state.a.
DenseMatrix z_update(const AdmmState& state, const SolverConfig& config);

/// W^{k+1} = W^k + tau rho (A^{k+1} - Z^{k+1}).
DenseMatrix w_update(const AdmmState& state, const SolverConfig& config);

/// Objective (1/n) sum_i (Y_i - M(k_i,l_i))^2 + lambda * penalty(M).
double objective(const ObservationSet& obs, const DenseMatrix& m, const SolverConfig& config);

/// Runs the ADMM iteration from Z^0 = T o Y, W^0 = 0 until
/// ||A^{k+1} - A^k||_F / max(1, ||A^k||_F) <= tol or max_iters.
/// Throws NumericalError naming the iteration if an iterate goes non-finite.
SolveReport solve(const ObservationSet& obs, const SolverConfig& config);

/// Number of singular values above rel_threshold * sigma_1; 0 for the zero matrix.
int estimate_rank(const DenseMatrix& m, double rel_threshold = 1e-2);

/// Same, from a precomputed descending spectrum.
int estimate_rank_from_singular(const Vector& singular, double rel_threshold = 1e-2);

} // namespace tl1mc
