#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cliptail/errors.hpp"

namespace cliptail {

enum class Regime { StrCvx, StrCvxQG, SmoothCvx, LipCvx };

const char* regime_name(Regime r);
Regime regime_from_name(const std::string& name);

/// Problem constants consumed by the plans. Fields are optional so one
/// struct serves all four regimes; each plan validates what it needs.
struct ProblemParams {
    std::optional<double> mu;          // strong convexity
    std::optional<double> L;           // smoothness
    std::optional<double> G;           // Lipschitz constant
    std::optional<double> cov_trace;   // bound on Tr(Sigma)
    std::optional<double> cov_opnorm;  // bound on ||Sigma||_2
    std::optional<double> alpha;       // quadratic-growth noise slope
    std::optional<double> beta;        // quadratic-growth noise floor
    std::optional<double> d_eff;       // stable rank of the noise
    double D1 = 1.0;                   // ||x_1 - x*||
    std::size_t T = 1;
    double delta = 0.05;
};

enum class StepKind { Decaying, Constant };
enum class OutputMode { LastIterate, AverageIterate };

struct StepSchedule {
    StepKind kind = StepKind::Constant;
    // Decaying: eta_t = A / (mu (t + gamma)), t one-based.
    double A = 4.0;
    double gamma = 0.0;
    double mu = 1.0;
    // Constant:
    double eta = 0.0;

    double at(std::size_t t) const {
        return kind == StepKind::Decaying ? A / (mu * (static_cast<double>(t) + gamma)) : eta;
    }
};

/// Resolved run parameters for one regime: burn-in gamma, clipping level,
/// step schedule and iterate-output mode. Pure function of its inputs.
struct ParamPlan {
    Regime regime = Regime::StrCvx;
    double gamma = 0.0;
    double clip_level = 0.0;
    StepSchedule step;
    OutputMode output = OutputMode::LastIterate;
    double log_term = 0.0;  // resolved ln(ln T / delta)
    std::size_t T = 1;
    double delta = 0.05;
    // Multipliers on the schedule constants (the guarantees fix only
    // asymptotics; the constants stay explicit and recorded).
    double c_gamma = 1.0;
    double c_m = 1.0;
    double c_const = 1.0;
    // Adjustments applied while resolving.
    bool gamma_floored = false;  // raised to the 4*kappa + 3 floor
    bool eta_clamped = false;    // user eta pulled back into range

    double step_size(std::size_t t) const { return step.at(t); }

    /// Flat key-value record for embedding in harness output files.
    std::vector<std::pair<std::string, std::string>> to_kv() const;
};

/// ln(max(ln(max(T,3)), 1) / delta); the small-T guards keep it positive.
/// delta must lie in (0, 1/2].
double log_term(std::size_t T, double delta);

/// Smooth strongly convex plan: decaying steps eta_t = 4/(mu (t+gamma)),
/// last iterate, gamma = c_gamma * max of the three burn-in arms, clip level
/// per the regime formula. Raises gamma to 4*kappa+3 when the arms fall
/// short (the decaying step must satisfy eta_t <= 1/(L+mu)).
ParamPlan plan_strongly_convex(const ProblemParams& p, double c_gamma = 1.0,
                               double c_const = 1.0);

/// Quadratic-growth-noise variant: gamma is the max of the eight arms in the
/// regime statement; clip level uses beta and d_eff in place of the
/// covariance bounds.
ParamPlan plan_qg(const ProblemParams& p, double c_gamma = 1.0);

/// Smooth convex plan: constant step, average iterate. When eta is not
/// supplied it is resolved from the candidate set {1/(2L), D1/(B'T),
/// D1/(g' sqrt(T))} scaled by 1/sqrt(8 c_m + 330). A supplied eta is clamped
/// to (0, 1/(2L)].
ParamPlan plan_smooth_convex(const ProblemParams& p,
                             std::optional<double> eta = std::nullopt, double c_m = 1.0);

/// Lipschitz convex plan: candidates {D1/(B T), D1/(g' sqrt(T)),
/// D1/(G sqrt(T))} scaled by 1/sqrt(8 c_m + 334), clamped to (0, G/sqrt(T)].
ParamPlan plan_lipschitz(const ProblemParams& p,
                         std::optional<double> eta = std::nullopt, double c_m = 1.0);

ParamPlan resolve_plan(Regime regime, const ProblemParams& p, double c_gamma = 1.0,
                       double c_m = 1.0, double c_const = 1.0,
                       std::optional<double> eta = std::nullopt);

}  // namespace cliptail
