#include "tl1mc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tl1mc::kernels {

int max_threads()
{
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

namespace omp {

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
#pragma omp parallel for schedule(static)
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
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < size; ++i) {
        wp[i] += step * (ap[i] - zp[i]);
    }
}

void shifted(const DenseMatrix& a, const DenseMatrix& w, double scale, DenseMatrix& out)
{
    out.resize(a.rows(), a.cols());
    const Index size = a.size();
    const double* ap = a.data();
    const double* wp = w.data();
    double* o = out.data();
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < size; ++i) {
        o[i] = ap[i] + scale * wp[i];
    }
}

void clamp(const DenseMatrix& in, double zeta, DenseMatrix& out)
{
    out.resize(in.rows(), in.cols());
    const Index size = in.size();
    const double* ip = in.data();
    double* o = out.data();
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < size; ++i) {
        o[i] = std::max(std::min(ip[i], zeta), -zeta);
    }
}

double frobenius_distance(const DenseMatrix& x, const DenseMatrix& y)
{
    const Index rows = x.rows();
    const Index cols = x.cols();
    std::vector<double> partial(static_cast<std::size_t>(cols), 0.0);
#pragma omp parallel for schedule(static)
    for (Index c = 0; c < cols; ++c) {
        const double* xp = x.data() + c * rows;
        const double* yp = y.data() + c * rows;
        double acc = 0.0;
        for (Index r = 0; r < rows; ++r) {
            const double d = xp[r] - yp[r];
            acc += d * d;
        }
        partial[static_cast<std::size_t>(c)] = acc;
    }
    double total = 0.0;
    for (double p : partial) {
        total += p;
    }
    return std::sqrt(total);
}

} // namespace omp
} // namespace tl1mc::kernels
