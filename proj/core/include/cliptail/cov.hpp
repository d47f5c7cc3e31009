#pragma once

#include <cstddef>
#include <vector>

#include "cliptail/vec.hpp"

namespace cliptail {

enum class CovKind { Isotropic, Diagonal, Full };

using Matrix = std::vector<VecD>;  // row-major, square

/// Covariance specification with cached trace, operator norm and sampling
/// factor. Three kinds: isotropic sigma^2 I, nonnegative diagonal, full SPD.
/// The full kind is factored (Cholesky) once at construction; diagonal and
/// isotropic kinds use entrywise square roots.
class CovModel {
  public:
    /// Zero-dimensional placeholder; real models come from the factories.
    CovModel() = default;

    static CovModel isotropic(double sigma2, std::size_t dim);
    static CovModel diagonal(VecD entries);
    /// Symmetric with eigenvalues >= 0; a pivot below -1e-12 * opnorm is a
    /// decomposition error.
    static CovModel full(Matrix m);
    static CovModel identity(std::size_t dim);
    static CovModel zero(std::size_t dim);

    CovKind kind() const { return kind_; }
    std::size_t dim() const { return dim_; }
    double trace() const { return trace_; }

    /// Largest eigenvalue. Exact for isotropic/diagonal kinds; power
    /// iteration (rel. tol 1e-10, at most 10*d iterations) for the full kind,
    /// run once at construction and cached.
    double opnorm() const { return opnorm_; }

    /// Smallest eigenvalue: exact for isotropic/diagonal; shifted power
    /// iteration on opnorm*I - M for the full kind.
    double min_eigenvalue() const;

    /// out = L z where L L^T reproduces the covariance.
    void apply_factor(const VecD& z, VecD& out) const;

    /// out = Sigma x.
    void apply(const VecD& x, VecD& out) const;

    /// Diagonal entries (diagonal kind only).
    const VecD& diagonal_entries() const;

    /// Recompute trace/opnorm from the stored representation (cross-check
    /// against the cached values; exact for diagonal kind).
    double recompute_trace() const;
    double recompute_opnorm() const;

    bool same_as(const CovModel& other) const;

  private:
    CovKind kind_ = CovKind::Isotropic;
    std::size_t dim_ = 0;
    double trace_ = 0.0;
    double opnorm_ = 0.0;
    double sigma2_ = 0.0;   // isotropic
    VecD entries_;          // diagonal
    Matrix matrix_;         // full
    Matrix factor_;         // full: lower-triangular L

    friend Matrix spd_factor(const CovModel& cov);
};

/// Lower-triangular factor L with L L^T = covariance, as a dense matrix.
Matrix spd_factor(const CovModel& cov);

/// Largest eigenvalue of the covariance.
double opnorm(const CovModel& cov);

/// Largest eigenvalue of a symmetric PSD matrix by power iteration.
/// Deterministic all-ones start, one seeded random restart on stagnation;
/// throws NumericError (carrying the best estimate) if the iteration cap is
/// reached without meeting rel_tol. A positive residual_tol additionally
/// accepts once ||M v - lambda v|| <= residual_tol * max(lambda, trace/d),
/// which handles near-degenerate spectra (empirical covariances) where the
/// Rayleigh quotient is accurate long before the iterates settle.
double power_iteration_opnorm(const Matrix& m, double rel_tol = 1e-10,
                              std::size_t max_iters_per_start = 0,
                              double residual_tol = 0.0);

double frobenius_norm(const Matrix& m);
Matrix matmul_lt(const Matrix& l);  // L L^T

}  // namespace cliptail
