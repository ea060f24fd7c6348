#include "tl1mc/regularizers.hpp"

#include "tl1mc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tl1mc {

void ProxParams::validate() const
{
    if (!(mu > 0.0) || !std::isfinite(mu)) {
        throw InvalidArgument("ProxParams: mu must be positive");
    }
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw InvalidArgument("ProxParams: a must be positive");
    }
}

double tl1_penalty(double x, double a)
{
    const double ax = std::abs(x);
    return (a + 1.0) * ax / (a + ax);
}

double tl1_value_from_singular(const Vector& singular, double a)
{
    if (!(a > 0.0)) {
        throw InvalidArgument("tl1_value: a must be positive");
    }
    double total = 0.0;
    for (Index j = 0; j < singular.size(); ++j) {
        total += tl1_penalty(singular[j], a);
    }
    return total;
}

double tl1_value(const DenseMatrix& m, double a)
{
    if (!(a > 0.0)) {
        throw InvalidArgument("tl1_value: a must be positive");
    }
    return tl1_value_from_singular(singular_values(m), a);
}

double tl1_prox_objective(double z, double x, const ProxParams& params)
{
    const double d = z - x;
    return params.mu * tl1_penalty(z, params.a) + 0.5 * d * d;
}

double tl1_scalar_prox(double x, const ProxParams& params)
{
    params.validate();
    if (!std::isfinite(x)) {
        throw InvalidArgument("tl1_scalar_prox: x must be finite");
    }
    const double ax = std::abs(x);
    if (ax == 0.0) {
        return 0.0;
    }
    const double a = params.a;
    const double shifted = a + ax;
    // eps = 1 - (arccos argument)
    double eps = 27.0 * params.mu * a * (1.0 + a) / (2.0 * shifted * shifted * shifted);
    constexpr double kGuard = 1e-12;
    if (eps > 2.0 + kGuard) {
        return 0.0;
    }
    eps = std::min(eps, 2.0);
    const double phi = 2.0 * std::asin(std::sqrt(eps / 2.0));
    const double s = std::sin(phi / 6.0);
    const double candidate = ax - (4.0 / 3.0) * shifted * s * s;
    if (!(candidate > 0.0)) {
        return 0.0;
    }
    const double g_zero = tl1_prox_objective(0.0, ax, params);
    const double g_cand = tl1_prox_objective(candidate, ax, params);
    if (!(g_cand < g_zero)) {
        return 0.0;
    }
    return std::copysign(candidate, x);
}

double nuclear_scalar_prox(double x, double mu)
{
    if (!(mu > 0.0)) {
        throw InvalidArgument("nuclear_scalar_prox: mu must be positive");
    }
    const double mag = std::max(std::abs(x) - mu, 0.0);
    return mag == 0.0 ? 0.0 : std::copysign(mag, x);
}

Vector shrink_singular_values(const Vector& singular, Regularizer reg, const ProxParams& params)
{
    Vector out(singular.size());
    for (Index j = 0; j < singular.size(); ++j) {
        out[j] = reg == Regularizer::TL1 ? tl1_scalar_prox(singular[j], params)
                                         : nuclear_scalar_prox(singular[j], params.mu);
    }
    return out;
}

double penalty_from_singular(const Vector& singular, Regularizer reg, double a)
{
    return reg == Regularizer::TL1 ? tl1_value_from_singular(singular, a) : singular.sum();
}

DenseMatrix tl1_matrix_prox(const DenseMatrix& m, const ProxParams& params)
{
    params.validate();
    const Svd d = svd(m);
    return compose(d.u, shrink_singular_values(d.singular, Regularizer::TL1, params), d.v);
}

DenseMatrix svt(const DenseMatrix& m, double mu)
{
    const Svd d = svd(m);
    return compose(d.u, shrink_singular_values(d.singular, Regularizer::Nuclear, {mu, 1.0}), d.v);
}

DenseMatrix tl1_gradient(const DenseMatrix& m, double a)
{
    if (!(a > 0.0)) {
        throw InvalidArgument("tl1_gradient: a must be positive");
    }
    const Svd d = svd(m);
    constexpr double kGap = 1e-8;
    const Index k = d.singular.size();
    for (Index j = 0; j < k; ++j) {
        if (d.singular[j] < kGap) {
            throw NumericalError("tl1_gradient: non-smooth point (singular value " + std::to_string(j) +
                                 " is zero)");
        }
        if (j > 0 && d.singular[j - 1] - d.singular[j] < kGap) {
            throw NumericalError("tl1_gradient: non-smooth point (repeated singular values)");
        }
    }
    Vector weights(k);
    for (Index j = 0; j < k; ++j) {
        const double denom = a + d.singular[j];
        weights[j] = a * (1.0 + a) / (denom * denom);
    }
    return d.u * weights.asDiagonal() * d.v.transpose();
}

} // namespace tl1mc
