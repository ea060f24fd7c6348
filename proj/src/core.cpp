#include "tl1mc/core.hpp"

#include "tl1mc/errors.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tl1mc {

bool all_finite(const DenseMatrix& m) { return m.allFinite(); }

void require_finite(const DenseMatrix& m, std::string_view what)
{
    if (!m.allFinite()) {
        throw InvalidArgument(std::string(what) + ": matrix contains non-finite entries");
    }
}

namespace {

// gesdd overwrites its input; callers pass a scratch copy.
int gesdd(char jobz, DenseMatrix& work, Vector& s, DenseMatrix& u, DenseMatrix& vt)
{
    const auto m = static_cast<lapack_int>(work.rows());
    const auto n = static_cast<lapack_int>(work.cols());
    const auto k = std::min(m, n);
    s.resize(k);
    if (jobz == 'S') {
        u.resize(m, k);
        vt.resize(k, n);
    }
    return LAPACKE_dgesdd(LAPACK_COL_MAJOR, jobz, m, n, work.data(), m, s.data(),
                          jobz == 'S' ? u.data() : nullptr, std::max<lapack_int>(1, m),
                          jobz == 'S' ? vt.data() : nullptr, std::max<lapack_int>(1, k));
}

} // namespace

Svd svd(const DenseMatrix& m)
{
    if (m.size() == 0) {
        throw InvalidArgument("svd: empty matrix");
    }
    if (!m.allFinite()) {
        throw NumericalError("svd: non-finite input");
    }
    DenseMatrix work = m;
    Svd out;
    DenseMatrix vt;
    const int info = gesdd('S', work, out.singular, out.u, vt);
    if (info != 0) {
        throw NumericalError("svd: LAPACK gesdd failed (info=" + std::to_string(info) + ")");
    }
    out.v = vt.transpose();
    return out;
}

Vector singular_values(const DenseMatrix& m)
{
    if (m.size() == 0) {
        throw InvalidArgument("singular_values: empty matrix");
    }
    if (!m.allFinite()) {
        throw NumericalError("singular_values: non-finite input");
    }
    DenseMatrix work = m;
    Vector s;
    DenseMatrix u, vt;
    const int info = gesdd('N', work, s, u, vt);
    if (info != 0) {
        throw NumericalError("singular_values: LAPACK gesdd failed (info=" + std::to_string(info) + ")");
    }
    return s;
}

DenseMatrix compose(const DenseMatrix& u, const Vector& s, const DenseMatrix& v)
{
    // s is descending and non-negative, so the active block is a prefix.
    Index active = 0;
    while (active < s.size() && s[active] != 0.0) {
        ++active;
    }
    if (active == 0) {
        return DenseMatrix::Zero(u.rows(), v.rows());
    }
    return (u.leftCols(active) * s.head(active).asDiagonal()) * v.leftCols(active).transpose();
}

DenseMatrix clamp_entrywise(const DenseMatrix& m, double zeta)
{
    if (!(zeta > 0.0)) {
        throw InvalidArgument("clamp_entrywise: zeta must be positive");
    }
    return m.cwiseMin(zeta).cwiseMax(-zeta);
}

DenseMatrix clamp_range(const DenseMatrix& m, double lo, double hi)
{
    if (!(lo <= hi)) {
        throw InvalidArgument("clamp_range: lo > hi");
    }
    return m.cwiseMin(hi).cwiseMax(lo);
}

double max_abs(const DenseMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

ObservationSet::ObservationSet(Index rows, Index cols, std::vector<Entry> samples)
    : rows_(rows), cols_(cols), samples_(std::move(samples))
{
    if (rows <= 0 || cols <= 0) {
        throw InvalidArgument("ObservationSet: dimensions must be positive");
    }
    if (samples_.empty()) {
        throw InvalidArgument("ObservationSet: at least one sample is required");
    }
    if (static_cast<double>(samples_.size()) > static_cast<double>(rows) * static_cast<double>(cols)) {
        throw InvalidArgument("ObservationSet: more samples than matrix entries");
    }
    mask_ = DenseMatrix::Zero(rows, cols);
    filled_ = DenseMatrix::Zero(rows, cols);
    for (const auto& e : samples_) {
        if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols) {
            throw InvalidArgument("ObservationSet: index (" + std::to_string(e.row) + ", " +
                                  std::to_string(e.col) + ") out of bounds");
        }
        if (!std::isfinite(e.value)) {
            throw InvalidArgument("ObservationSet: non-finite value");
        }
        if (mask_(e.row, e.col) != 0.0) {
            throw InvalidArgument("ObservationSet: duplicate index (" + std::to_string(e.row) + ", " +
                                  std::to_string(e.col) + ")");
        }
        mask_(e.row, e.col) = 1.0;
        filled_(e.row, e.col) = e.value;
    }
}

namespace {

void check_marginal(const std::vector<double>& p, const char* name)
{
    if (p.empty()) {
        throw InvalidArgument(std::string("SamplingDistribution: empty ") + name);
    }
    for (double x : p) {
        if (!(x >= 0.0) || !std::isfinite(x)) {
            throw InvalidArgument(std::string("SamplingDistribution: negative or non-finite ") + name);
        }
    }
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-12) {
        throw InvalidArgument(std::string("SamplingDistribution: ") + name + " do not sum to 1");
    }
}

} // namespace

SamplingDistribution::SamplingDistribution(std::vector<double> row_probs, std::vector<double> col_probs)
    : row_probs_(std::move(row_probs)), col_probs_(std::move(col_probs))
{
    check_marginal(row_probs_, "row probabilities");
    check_marginal(col_probs_, "column probabilities");
}

std::string_view to_string(Regularizer r)
{
    switch (r) {
    case Regularizer::TL1:
        return "tl1";
    case Regularizer::Nuclear:
        return "nuclear";
    }
    return "?";
}

Regularizer parse_regularizer(std::string_view s)
{
    if (s == "tl1" || s == "TL1") {
        return Regularizer::TL1;
    }
    if (s == "nuclear" || s == "Nuclear") {
        return Regularizer::Nuclear;
    }
    throw InvalidArgument("unknown regularizer '" + std::string(s) + "'");
}

void SolverConfig::validate() const
{
    auto positive = [](double x, const char* name) {
        if (!(x > 0.0) || !std::isfinite(x)) {
            throw InvalidArgument(std::string("SolverConfig: ") + name + " must be positive and finite");
        }
    };
    positive(lambda, "lambda");
    positive(a, "a");
    positive(zeta, "zeta");
    positive(rho, "rho");
    positive(tol, "tol");
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    if (!(tau > 0.0 && tau < golden)) {
        throw InvalidArgument("SolverConfig: tau must lie in (0, (1+sqrt 5)/2)");
    }
    if (max_iters <= 0) {
        throw InvalidArgument("SolverConfig: max_iters must be positive");
    }
}

} // namespace tl1mc
