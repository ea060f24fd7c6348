#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tl1mc {

/// Dense real m1 x m2 matrix. Column-major internally; all file formats are row-major.
using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Throws InvalidArgument if any entry is NaN or infinite.
void require_finite(const DenseMatrix& m, std::string_view what);

bool all_finite(const DenseMatrix& m);

/// Thin SVD, M = U diag(s) V^T with s sorted descending.
struct Svd {
    DenseMatrix u;     // m1 x k
    Vector singular;   // k = min(m1, m2)
    DenseMatrix v;     // m2 x k
};

/// Economy-size SVD backed by LAPACK gesdd. Throws NumericalError on
/// non-finite input or when LAPACK fails to converge.
Svd svd(const DenseMatrix& m);

/// Singular values only (cheaper than svd()).
Vector singular_values(const DenseMatrix& m);

/// U diag(s) V^T using only the columns with s_j != 0.
DenseMatrix compose(const DenseMatrix& u, const Vector& s, const DenseMatrix& v);

/// Entrywise projection onto [-zeta, zeta].
DenseMatrix clamp_entrywise(const DenseMatrix& m, double zeta);

/// Entrywise projection onto [lo, hi].
DenseMatrix clamp_range(const DenseMatrix& m, double lo, double hi);

double max_abs(const DenseMatrix& m);

struct Entry {
    Index row = 0;
    Index col = 0;
    double value = 0.0;

    friend bool operator==(const Entry&, const Entry&) = default;
};

struct IndexPair {
    Index row = 0;
    Index col = 0;

    friend bool operator==(const IndexPair&, const IndexPair&) = default;
};

/// The n sampled pairs (T_i, Y_i) of the trace-regression model, together
/// with the aggregate binary mask T and the mask-filled response T o Y.
/// Immutable; construction enforces bounds and the without-replacement
/// contract.
class ObservationSet {
  public:
    ObservationSet(Index rows, Index cols, std::vector<Entry> samples);

    Index rows() const noexcept { return rows_; }
    Index cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return samples_.size(); }
    std::span<const Entry> samples() const noexcept { return samples_; }

    /// T: 1 at observed entries, 0 elsewhere.
    const DenseMatrix& mask() const noexcept { return mask_; }
    /// T o Y: observed values, 0 elsewhere.
    const DenseMatrix& filled() const noexcept { return filled_; }

    /// ||Y||_F over the observed values.
    double response_norm() const noexcept { return filled_.norm(); }

  private:
    Index rows_;
    Index cols_;
    std::vector<Entry> samples_;
    DenseMatrix mask_;
    DenseMatrix filled_;
};

/// Product sampling distribution pi_kl = p_k * q_l.
class SamplingDistribution {
  public:
    SamplingDistribution(std::vector<double> row_probs, std::vector<double> col_probs);

    std::span<const double> row_probs() const noexcept { return row_probs_; }
    std::span<const double> col_probs() const noexcept { return col_probs_; }
    double pi(Index k, Index l) const { return row_probs_.at(k) * col_probs_.at(l); }

  private:
    std::vector<double> row_probs_;
    std::vector<double> col_probs_;
};

enum class Regularizer { TL1, Nuclear };

std::string_view to_string(Regularizer r);
Regularizer parse_regularizer(std::string_view s);

/// Default ADMM step size per unit of the 2/n data-fit weight; see
/// SolverConfig::rho_for().
inline constexpr double kRhoTimesN = 0.5;
inline constexpr double kDefaultTau = 1.618;

struct SolverConfig {
    double lambda = 1e-3;
    double a = 100.0;
    double zeta = 1.0;
    double rho = 1.0;
    double tau = kDefaultTau;
    int max_iters = 500;
    double tol = 1e-5;
    Regularizer regularizer = Regularizer::TL1;

    /// Throws InvalidArgument when any field is out of range.
    void validate() const;

    /// Step size matched to the 2/n data-fit weight for n observations.
    static double rho_for(std::size_t n) { return kRhoTimesN / static_cast<double>(n); }
};

struct SolveReport {
    DenseMatrix estimate;     // clamp(Z_final, zeta): the prediction matrix
    DenseMatrix low_rank;     // Z_final, exactly thresholded spectrum
    DenseMatrix primal;       // A_final
    int iterations = 0;
    std::vector<double> primal_residuals;  // ||A^k - Z^k||_F
    std::vector<double> objective_trace;   // objective at Z^k
    bool converged = false;
    int estimated_rank = 0;
    double elapsed_seconds = 0.0;
};

} // namespace tl1mc
