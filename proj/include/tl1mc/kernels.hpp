#pragma once

// Elementwise ADMM kernels. `serial` is the reference implementation kept
// for testing and benchmarking; `omp` is what the solver runs. Elementwise
// kernels agree bitwise. Reductions in `omp` sum per-column partials in
// column order, so they are deterministic for any thread count but may
// differ from `serial` in the last bits.

#include "tl1mc/core.hpp"

namespace tl1mc::kernels {

namespace serial {

/// out = clamp((w_d T o Y + rho Z - W) ./ (w_d T + rho), zeta)
void a_update(const DenseMatrix& mask, const DenseMatrix& filled, const DenseMatrix& z,
              const DenseMatrix& w, double data_weight, double rho, double zeta, DenseMatrix& out);

/// w += step * (a - z)
void dual_ascent(DenseMatrix& w, const DenseMatrix& a, const DenseMatrix& z, double step);

/// out = a + scale * w
void shifted(const DenseMatrix& a, const DenseMatrix& w, double scale, DenseMatrix& out);

void clamp(const DenseMatrix& in, double zeta, DenseMatrix& out);

double frobenius_distance(const DenseMatrix& x, const DenseMatrix& y);

} // namespace serial

namespace omp {

void a_update(const DenseMatrix& mask, const DenseMatrix& filled, const DenseMatrix& z,
              const DenseMatrix& w, double data_weight, double rho, double zeta, DenseMatrix& out);
void dual_ascent(DenseMatrix& w, const DenseMatrix& a, const DenseMatrix& z, double step);
void shifted(const DenseMatrix& a, const DenseMatrix& w, double scale, DenseMatrix& out);
void clamp(const DenseMatrix& in, double zeta, DenseMatrix& out);
double frobenius_distance(const DenseMatrix& x, const DenseMatrix& y);

} // namespace omp

/// Number of OpenMP threads available (1 when built without OpenMP).
int max_threads();

} // namespace tl1mc::kernels
