#include "tl1mc/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace tl1mc::kernels::serial {

void a_update(const DenseMatrix& mask, const DenseMatrix& filled, const DenseMatrix& z,
              const DenseMatrix& w, double data_weight, double rho, double zeta, DenseMatrix& out)
{
    out.resize(z.rows(), z.cols());
    const Index size = z.size();
    const double* t = mask.data();
    const double* y = filled.data();
    const double* zp = z.data();
    const double* wp = w.data();
    double* o = out.data();
    for (Index i = 0; i < size; ++i) {
        const double v = (data_weight * y[i] + rho * zp[i] - wp[i]) / (data_weight * t[i] + rho);
        o[i] = std::max(std::min(v, zeta), -zeta);
    }
}

void dual_ascent(DenseMatrix& w, const DenseMatrix& a, const DenseMatrix& z, double step)
{
    const Index size = w.size();
    double* wp = w.data();
    const double* ap = a.data();
    const double* zp = z.data();
    for (Index i = 0; i < size; ++i) {
        wp[i] += step * (ap[i] - zp[i]);
    }
}

void shifted(const DenseMatrix& a, const DenseMatrix& w, double scale, DenseMatrix& out)
{
    out.resize(a.rows(), a.cols());
    const Index size = a.size();
    for (Index i = 0; i < size; ++i) {
        out.data()[i] = a.data()[i] + scale * w.data()[i];
    }
}

void clamp(const DenseMatrix& in, double zeta, DenseMatrix& out)
{
    out.resize(in.rows(), in.cols());
    const Index size = in.size();
    for (Index i = 0; i < size; ++i) {
        out.data()[i] = std::max(std::min(in.data()[i], zeta), -zeta);
    }
}

double frobenius_distance(const DenseMatrix& x, const DenseMatrix& y)
{
    double acc = 0.0;
    const Index size = x.size();
    for (Index i = 0; i < size; ++i) {
        const double d = x.data()[i] - y.data()[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

} // namespace tl1mc::kernels::serial
