#pragma once

#include <cstddef>

#include "cliptail/cov.hpp"
#include "cliptail/generators.hpp"
#include "cliptail/rng.hpp"
#include "cliptail/vec.hpp"

namespace cliptail {

/// Norm thresholding: v unchanged if ||v|| <= gamma (bitwise), otherwise v
/// rescaled to norm exactly gamma. clip(0, gamma) = 0.
VecD clip(const VecD& v, double gamma);
void clip_inplace(VecD& v, double gamma);

/// Right-hand sides of the clipped-moment bounds: ||E[clip(z)] - m||,
/// ||Cov(clip(z))||_2 and Tr(Cov(clip(z))) in terms of ||m||, S and gamma.
struct ClippedMomentBounds {
    double bias_bound = 0.0;
    double opnorm_bound = 0.0;
    double trace_bound = 0.0;
};

/// (sqrt(||S||)/gamma) (||m|| + sqrt(Tr S)) + (||m||/gamma^2) (||m||^2 + Tr S)
double clipped_bias_bound(double mean_norm, const CovModel& cov, double gamma);

/// opnorm bound ||S|| + (||m||^2/gamma^2)(||m||^2 + Tr S); trace bound Tr S.
ClippedMomentBounds clipped_cov_bounds(double mean_norm, const CovModel& cov, double gamma);

/// Monte-Carlo moments of clip(z), z ~ sampler; the stderr fields support
/// bound checks expressed in multiples of the estimated standard error.
struct ClippedMomentEstimate {
    VecD mean;
    double trace = 0.0;            // mean squared deviation from the sample mean
    double opnorm_estimate = 0.0;  // power iteration on the sample covariance
    double mean_stderr = 0.0;      // sqrt(trace / n)
    double trace_stderr = 0.0;     // sd of squared deviations / sqrt(n)
    std::size_t n = 0;
};

ClippedMomentEstimate empirical_clipped_moments(const DistHandle& sampler, double gamma,
                                                std::size_t n, Rng& gen);

}  // namespace cliptail
