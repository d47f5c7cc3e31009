#pragma once

#include <cstddef>
#include <optional>

#include "cliptail/cov.hpp"
#include "cliptail/generators.hpp"
#include "cliptail/rng.hpp"
#include "cliptail/schedule.hpp"
#include "cliptail/vec.hpp"

namespace cliptail {

enum class OracleKind { MeanEst, LinReg, LogReg, Lad };

const char* oracle_kind_name(OracleKind k);

/// One stochastic gradient draw: the gradient, the sample loss at the query
/// point, and the raw sample for diagnostics.
struct GradSample {
    VecD grad;
    double loss_at_query = 0.0;
    VecD raw_x;          // the drawn sample (MeanEst) or covariate (regressions)
    double raw_y = 0.0;  // response, when the model has one
};

struct GapEstimate {
    double gap = 0.0;
    double stderr_ = 0.0;  // zero for closed-form kinds
};

/// Stochastic gradient oracle for one of the four estimation problems, with
/// ground-truth access (true optimum, population gap) for synthetic
/// benchmarking. Each sample_gradient call consumes exactly one fresh sample
/// (batch size 1). Immutable and shareable across workers.
class OracleSpec {
  public:
    /// Sample xi = m + noise draw; gradient x - xi of the squared loss.
    static OracleSpec mean_estimation(VecD target_mean, DistHandle noise);

    /// y = <x, theta*> + eps with x from `covariate` (mean zero required) and
    /// eps from the 1-d `noise`; gradient (<x,theta> - y) x. The covariate
    /// covariance must be strictly positive definite.
    static OracleSpec linear_regression(VecD theta_star, DistHandle covariate,
                                        DistHandle noise);

    /// y ~ Bernoulli(phi(<theta*, x>)); gradient (phi(<x,theta>) - y) x.
    static OracleSpec logistic_regression(VecD theta_star, DistHandle covariate);

    /// y = <x, theta*> + eps with median-zero eps; subgradient
    /// sgn(<theta,x> - y) x, sgn(0) = 0.
    static OracleSpec lad_regression(VecD theta_star, DistHandle covariate,
                                     DistHandle noise);

    /// Default: 1-d mean estimation of 0 with degenerate noise (placeholder
    /// value; real specs come from the factories).
    OracleSpec() = default;

    OracleKind kind() const { return kind_; }
    std::size_t dim() const { return optimum_.size(); }
    const VecD& optimum() const { return optimum_; }
    const DistHandle& covariate() const { return covariate_; }
    const DistHandle& noise() const { return noise_; }
    const CovModel& covariate_cov() const { return covariate_.true_cov(); }
    double noise_sigma() const;  // LinReg: sqrt of the response-noise variance

    void sample_gradient(const VecD& query, Rng& gen, GradSample& out) const;
    GradSample sample_gradient(const VecD& query, Rng& gen) const;

    /// Exact population gradient where a closed form exists (MeanEst,
    /// LinReg); nullopt for LogReg/LAD.
    std::optional<VecD> population_gradient(const VecD& query) const;

    /// F(query) - F(x*): closed form for MeanEst/LinReg (stderr 0), paired
    /// Monte-Carlo differences over mc_n fresh samples otherwise.
    GapEstimate population_gap(const VecD& query, std::size_t mc_n, Rng& gen) const;

    /// Regime constants for the schedule module. MeanEst: mu = L = 1 and the
    /// noise covariance bounds. LinReg (needs the fourth-moment constant
    /// c4): L = ||Sigma||, mu = lambda_min(Sigma), alpha = 2(c4+1)||Sigma||^2,
    /// beta = sigma^2 ||Sigma||, d_eff = Tr/||Sigma||. LogReg: L = ||Sigma||
    /// with gradient-noise bounds 2 Sigma. LAD: G = sqrt(Tr Sigma).
    ProblemParams derived_constants(double c4 = 1.0) const;

    /// Per-sample loss at theta for a given raw sample (test/validation hook).
    double sample_loss(const VecD& theta, const VecD& x, double y) const;

    /// Flat key-value record (kind, dim, distributions) for output files.
    std::vector<std::pair<std::string, std::string>> to_kv() const;

  private:
    OracleKind kind_ = OracleKind::MeanEst;
    VecD optimum_ = VecD{0.0};
    DistHandle covariate_;  // MeanEst: the noise distribution
    DistHandle noise_;      // response noise (LinReg/LAD), unused otherwise
};

double sigmoid(double t);

}  // namespace cliptail
