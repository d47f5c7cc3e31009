#pragma once

#include <cstddef>
#include <string>

#include "cliptail/cov.hpp"
#include "cliptail/rng.hpp"
#include "cliptail/vec.hpp"

namespace cliptail {

enum class DistKind { Gaussian, StudentT, ParetoRadial, ScalarT, PointMass };

/// Sample generator with exactly-known second moment. The student-t and
/// pareto-radial kinds are scaled at construction so that the realized
/// covariance equals the requested target, while third and higher moments may
/// be infinite. All kinds are mean-zero unless a location offset is attached
/// via shifted(); point_mass is the degenerate distribution at v.
class DistHandle {
  public:
    /// Degenerate 1-d point mass at zero; real handles come from the
    /// factories.
    DistHandle()
        : cov_(CovModel::zero(1)), sampling_cov_(cov_), mean_(1, 0.0), point_(1, 0.0) {}

    static DistHandle gaussian(CovModel cov);
    /// Multivariate t with nu > 2: factor * z * sqrt(nu / w), z standard
    /// normal, w ~ chi^2_nu, with the factor scaled by (nu-2)/nu so the
    /// covariance is exactly target_cov.
    static DistHandle student_t(double nu, CovModel target_cov);
    /// Uniform direction times a Pareto(alpha_tail) radius, alpha_tail in
    /// (2, 4]; E[r^2] = alpha/(alpha-2) is normalized out so the covariance
    /// is exactly target_cov. Fourth moments are infinite for alpha <= 4.
    static DistHandle pareto_radial(double alpha_tail, CovModel target_cov);
    /// One-dimensional t with variance target_var.
    static DistHandle scalar_t(double nu, double target_var);
    static DistHandle point_mass(VecD v);

    /// Same distribution translated by `mean`.
    DistHandle shifted(VecD mean) const;

    DistKind kind() const { return kind_; }
    std::size_t dim() const { return dim_; }
    double nu() const { return nu_; }
    double alpha_tail() const { return alpha_; }
    const VecD& mean_offset() const { return mean_; }

    /// One sample. Identical (handle, generator state) gives identical draws.
    void draw(Rng& gen, VecD& out) const;
    VecD draw(Rng& gen) const;
    double draw_scalar(Rng& gen) const;  // dim-1 handles

    /// Exact covariance of the handle (by construction).
    const CovModel& true_cov() const { return cov_; }

    /// Config-style description, e.g. "student_t(nu=3, cov=diag:[1,1,4])".
    std::string describe() const;

  private:
    DistKind kind_ = DistKind::PointMass;
    std::size_t dim_ = 1;
    double nu_ = 0.0;
    double alpha_ = 0.0;
    double radial_scale_ = 0.0;  // pareto: sqrt(d * (alpha-2) / alpha)
    CovModel cov_;               // exact covariance
    CovModel sampling_cov_;      // covariance whose factor is applied to z
    VecD mean_;
    VecD point_;
};

inline VecD draw(const DistHandle& h, Rng& gen) { return h.draw(gen); }
inline const CovModel& true_cov(const DistHandle& h) { return h.true_cov(); }

}  // namespace cliptail
