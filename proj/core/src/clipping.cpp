#include "cliptail/clipping.hpp"

#include <cmath>

namespace cliptail {

void clip_inplace(VecD& v, double gamma) {
    if (!(gamma > 0.0)) throw InputError("clip: gamma must be positive");
    require_finite(v, "clip");
    const double n = robust_norm2(v);
    if (n <= gamma) return;  // includes the zero vector
    double s = gamma / n;
    // Shrink by ulps if rounding left the result a hair outside the ball, so
    // the norm ceiling is exact and re-clipping is a bitwise no-op.
    for (;;) {
        VecD y(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) y[i] = v[i] * s;
        if (robust_norm2(y) <= gamma) {
            v = std::move(y);
            return;
        }
        s = std::nextafter(s, 0.0);
    }
}

VecD clip(const VecD& v, double gamma) {
    VecD y = v;
    clip_inplace(y, gamma);
    return y;
}

double clipped_bias_bound(double mean_norm, const CovModel& cov, double gamma) {
    if (!(gamma > 0.0)) throw InputError("clipped_bias_bound: gamma must be positive");
    if (!(mean_norm >= 0.0)) throw InputError("clipped_bias_bound: mean_norm must be >= 0");
    const double tr = cov.trace();
    const double op = cov.opnorm();
    return (std::sqrt(op) / gamma) * (mean_norm + std::sqrt(tr)) +
           (mean_norm / (gamma * gamma)) * (mean_norm * mean_norm + tr);
}

ClippedMomentBounds clipped_cov_bounds(double mean_norm, const CovModel& cov, double gamma) {
    if (!(gamma > 0.0)) throw InputError("clipped_cov_bounds: gamma must be positive");
    if (!(mean_norm >= 0.0)) throw InputError("clipped_cov_bounds: mean_norm must be >= 0");
    ClippedMomentBounds b;
    b.bias_bound = clipped_bias_bound(mean_norm, cov, gamma);
    const double m2 = mean_norm * mean_norm;
    b.opnorm_bound = cov.opnorm() + (m2 / (gamma * gamma)) * (m2 + cov.trace());
    b.trace_bound = cov.trace();
    return b;
}

ClippedMomentEstimate empirical_clipped_moments(const DistHandle& sampler, double gamma,
                                                std::size_t n, Rng& gen) {
    if (n < 2) throw InputError("empirical_clipped_moments: n must be >= 2");
    if (!(gamma > 0.0)) throw InputError("empirical_clipped_moments: gamma must be positive");
    const std::size_t d = sampler.dim();

    // Pass 1 over fresh draws accumulates the mean and the raw second moment
    // matrix; the covariance about the sample mean follows by subtraction.
    VecD sum = zeros(d);
    Matrix second(d, VecD(d, 0.0));
    double sum_sq = 0.0, sum_sq2 = 0.0;
    VecD z;
    for (std::size_t k = 0; k < n; ++k) {
        sampler.draw(gen, z);
        clip_inplace(z, gamma);
        const double zz = squared_norm2(z);
        sum_sq += zz;
        sum_sq2 += zz * zz;
        for (std::size_t i = 0; i < d; ++i) {
            sum[i] += z[i];
            for (std::size_t j = 0; j <= i; ++j) second[i][j] += z[i] * z[j];
        }
    }

    ClippedMomentEstimate est;
    est.n = n;
    est.mean = sum;
    const double inv_n = 1.0 / static_cast<double>(n);
    scale(est.mean, inv_n);

    Matrix covhat(d, VecD(d, 0.0));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            const double c = second[i][j] * inv_n - est.mean[i] * est.mean[j];
            covhat[i][j] = c;
            covhat[j][i] = c;
        }
    double tr = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        covhat[i][i] = std::max(covhat[i][i], 0.0);
        tr += covhat[i][i];
    }
    est.trace = tr;
    // Sample covariances of near-isotropic draws have eigenvalue gaps of
    // order 1/sqrt(n); the iteration needs room to resolve them.
    est.opnorm_estimate =
        (tr > 0.0) ? power_iteration_opnorm(covhat, 1e-9, 50000, 1e-7) : 0.0;

    // E||z - mean||^2 = E||z||^2 - ||mean||^2; its per-sample variance gives
    // the trace standard error.
    const double mean_sq = squared_norm2(est.mean);
    const double ez2 = sum_sq * inv_n;
    const double var_sq = std::max(0.0, sum_sq2 * inv_n - ez2 * ez2);
    est.trace_stderr = std::sqrt(var_sq * inv_n);
    est.mean_stderr = std::sqrt(std::max(0.0, ez2 - mean_sq) * inv_n);
    return est;
}

}  // namespace cliptail
