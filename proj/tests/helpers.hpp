#pragma once

#include "tl1mc/core.hpp"

#include <random>

namespace testutil {

inline tl1mc::DenseMatrix gaussian(tl1mc::Index r, tl1mc::Index c, std::mt19937_64& rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    tl1mc::DenseMatrix m(r, c);
    for (tl1mc::Index i = 0; i < m.size(); ++i) {
        m.data()[i] = n(rng);
    }
    return m;
}

// Random orthonormal columns via Householder QR.
inline tl1mc::DenseMatrix orthonormal(tl1mc::Index r, tl1mc::Index c, std::mt19937_64& rng)
{
    Eigen::HouseholderQR<tl1mc::DenseMatrix> qr(gaussian(r, c, rng));
    return qr.householderQ() * tl1mc::DenseMatrix::Identity(r, c);
}

// U diag(s) V^T with random orthonormal factors.
inline tl1mc::DenseMatrix with_spectrum(tl1mc::Index r, tl1mc::Index c, const tl1mc::Vector& s, std::mt19937_64& rng)
{
    const auto k = s.size();
    return orthonormal(r, k, rng) * s.asDiagonal() * orthonormal(c, k, rng).transpose();
}

// Brute-force 1-D minimizer on a uniform grid over [lo, hi].
template <class F>
double grid_argmin(F f, double lo, double hi, double step)
{
    const auto n = static_cast<long>((hi - lo) / step);
    double best_z = lo;
    double best = f(lo);
    for (long k = 1; k <= n; ++k) {
        const double z = lo + step * static_cast<double>(k);
        const double v = f(z);
        if (v < best) {
            best = v;
            best_z = z;
        }
    }
    if (f(hi) < best) {
        best_z = hi;
    }
    return best_z;
}

} // namespace testutil
