#pragma once

#include "tl1mc/core.hpp"

namespace tl1mc {

/// Weight mu (= lambda / rho inside ADMM) and TL1 shape parameter a.
struct ProxParams {
    double mu;
    double a;

    /// Throws InvalidArgument unless mu > 0 and a > 0.
    void validate() const;
};

/// Scalar TL1 penalty (a+1)|x| / (a+|x|).
double tl1_penalty(double x, double a);

/// TL1_a(M) = sum_j (a+1) s_j / (a + s_j) over the singular values of M.
double tl1_value(const DenseMatrix& m, double a);

/// Same, from precomputed singular values.
double tl1_value_from_singular(const Vector& singular, double a);

/// Global minimizer of g(z) = mu (a+1)|z|/(a+|z|) + (z-x)^2/2.
///
/// The nonzero stationary point has the cubic-root closed form
///   |z| = (2/3)(a+|x|) cos(phi/3) - 2a/3 + |x|/3,
///   phi = arccos(1 - 27 mu a (1+a) / (2 (a+|x|)^3)),
/// evaluated here as |x| - (4/3)(a+|x|) sin^2(phi/6) with
/// phi = 2 asin(sqrt(eps/2)), which is the same quantity without the
/// cancellation that plagues the textbook form for large a. The result is
/// whichever of {0, candidate} has the smaller g; ties go to 0. When the
/// arccos argument leaves [-1, 1] (beyond a 1e-12 guard) there is no
/// candidate and the answer is 0. Odd in x by construction.
double tl1_scalar_prox(double x, const ProxParams& params);

/// Objective minimized by tl1_scalar_prox; exposed for oracles and tests.
double tl1_prox_objective(double z, double x, const ProxParams& params);

/// U diag(prox(s_j)) V^T for the SVD of M.
DenseMatrix tl1_matrix_prox(const DenseMatrix& m, const ProxParams& params);

/// sum_j a(1+a)/(a+s_j)^2 u_j v_j^T. Only defined where the singular values
/// are distinct and positive; throws NumericalError when any gap or the
/// smallest singular value is below 1e-8.
DenseMatrix tl1_gradient(const DenseMatrix& m, double a);

/// Soft threshold sign(x) max(|x| - mu, 0).
double nuclear_scalar_prox(double x, double mu);

/// Singular value thresholding: U diag(soft(s_j, mu)) V^T.
DenseMatrix svt(const DenseMatrix& m, double mu);

/// Applies the scalar prox of `reg` to every entry of a non-negative,
/// descending singular value vector. The output stays descending.
Vector shrink_singular_values(const Vector& singular, Regularizer reg, const ProxParams& params);

/// Penalty value for the regularizer evaluated on singular values
/// (TL1_a or the nuclear norm).
double penalty_from_singular(const Vector& singular, Regularizer reg, double a);

} // namespace tl1mc
