#include "cliptail/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace cliptail {

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::StrCvx: return "str_cvx";
        case Regime::StrCvxQG: return "str_cvx_qg";
        case Regime::SmoothCvx: return "smooth_cvx";
        case Regime::LipCvx: return "lip_cvx";
    }
    return "?";
}

Regime regime_from_name(const std::string& name) {
    if (name == "str_cvx" || name == "strongly_convex") return Regime::StrCvx;
    if (name == "str_cvx_qg" || name == "qg") return Regime::StrCvxQG;
    if (name == "smooth_cvx" || name == "smooth_convex") return Regime::SmoothCvx;
    if (name == "lip_cvx" || name == "lipschitz") return Regime::LipCvx;
    throw ConfigError("unknown regime: " + name);
}

double log_term(std::size_t T, double delta) {
    if (!(delta > 0.0) || !(delta <= 0.5))
        throw InputError("log_term: delta must lie in (0, 1/2]");
    const double t = static_cast<double>(std::max<std::size_t>(T, 3));
    const double inner = std::max(std::log(t), 1.0);
    return std::log(inner / delta);
}

namespace {

double require(const std::optional<double>& v, const char* regime, const char* field) {
    if (!v.has_value())
        throw InputError(std::string("plan ") + regime + ": missing " + field);
    return *v;
}

void require_horizon_delta(const ProblemParams& p) {
    if (p.T < 1) throw InputError("plan: T must be >= 1");
    if (!(p.delta > 0.0) || !(p.delta < 0.5))
        throw InputError("plan: delta must lie in (0, 1/2)");
    if (!(p.D1 >= 0.0)) throw InputError("plan: D1 must be >= 0");
}

// eta_t = A/(mu(t+gamma)) <= 1/(L+mu) for all t >= 1 needs
// gamma >= A*kappa + A - 1; with A = 4 that is 4*kappa + 3.
void apply_gamma_floor(ParamPlan& plan, double kappa) {
    const double floor = 4.0 * kappa + 3.0;
    if (plan.gamma < floor) {
        plan.gamma = floor;
        plan.gamma_floored = true;
    }
}

double str_cvx_clip_level(double mu, double gamma, double D1, double T, double stat_term,
                          double ell) {
    const double g1 = gamma + 1.0;
    const double r = g1 * g1 * D1 * D1 + (T + gamma) / (mu * mu) * stat_term;
    return mu / ell * std::sqrt(r);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

ParamPlan plan_strongly_convex(const ProblemParams& p, double c_gamma, double c_const) {
    require_horizon_delta(p);
    if (!(c_gamma > 0.0) || !(c_const > 0.0))
        throw InputError("plan_strongly_convex: multipliers must be positive");
    const double mu = require(p.mu, "str_cvx", "mu");
    if (!(mu > 0.0))
        throw InputError(
            "plan_strongly_convex: mu = 0; use plan_smooth_convex or plan_lipschitz");
    const double L = require(p.L, "str_cvx", "L");
    if (L < mu) throw InputError("plan_strongly_convex: requires L >= mu");
    const double tr = require(p.cov_trace, "str_cvx", "cov_trace");
    const double op = require(p.cov_opnorm, "str_cvx", "cov_opnorm");
    if (tr < op || op < 0.0)
        throw InputError("plan_strongly_convex: need cov_trace >= cov_opnorm >= 0");

    const double kappa = L / mu;
    const double ell = log_term(p.T, p.delta);

    ParamPlan plan;
    plan.regime = Regime::StrCvx;
    plan.T = p.T;
    plan.delta = p.delta;
    plan.log_term = ell;
    plan.c_gamma = c_gamma;
    plan.c_const = c_const;

    const double arm_cov = (tr > 0.0) ? op * kappa * kappa * ell * ell / tr : 0.0;
    const double arm_k32 = std::pow(kappa, 1.5) * ell;
    const double arm_kl2 = kappa * ell * ell;
    plan.gamma = c_gamma * std::max({arm_cov, arm_k32, arm_kl2});
    apply_gamma_floor(plan, kappa);

    const double stat = tr + std::sqrt(tr * op) * ell;
    plan.clip_level = c_const * str_cvx_clip_level(mu, plan.gamma, p.D1,
                                                   static_cast<double>(p.T), stat, ell);
    if (!(plan.clip_level > 0.0))
        throw InputError("plan_strongly_convex: degenerate problem gives zero clip level");

    plan.step = StepSchedule{StepKind::Decaying, 4.0, plan.gamma, mu, 0.0};
    plan.output = OutputMode::LastIterate;
    return plan;
}

ParamPlan plan_qg(const ProblemParams& p, double c_gamma) {
    require_horizon_delta(p);
    if (!(c_gamma > 0.0)) throw InputError("plan_qg: c_gamma must be positive");
    const double mu = require(p.mu, "qg", "mu");
    if (!(mu > 0.0)) throw InputError("plan_qg: mu must be positive");
    const double L = require(p.L, "qg", "L");
    if (L < mu) throw InputError("plan_qg: requires L >= mu");
    const double alpha = require(p.alpha, "qg", "alpha");
    const double beta = require(p.beta, "qg", "beta");
    const double deff = require(p.d_eff, "qg", "d_eff");
    if (alpha < 0.0 || beta < 0.0 || deff < 1.0)
        throw InputError("plan_qg: need alpha, beta >= 0 and d_eff >= 1");

    const double kappa = L / mu;
    const double ell = log_term(p.T, p.delta);
    const double mu2 = mu * mu;

    ParamPlan plan;
    plan.regime = Regime::StrCvxQG;
    plan.T = p.T;
    plan.delta = p.delta;
    plan.log_term = ell;
    plan.c_gamma = c_gamma;

    // The eight burn-in arms of the quadratic-growth statement, verbatim.
    const double arms[8] = {
        alpha * deff / mu2,
        alpha * std::sqrt(deff) / mu2 * ell,
        kappa * std::sqrt(alpha) / mu * ell,
        std::sqrt(kappa * alpha * deff) / mu * ell,
        std::pow(kappa, 2.0 / 3.0) * std::cbrt(alpha) * std::cbrt(deff) /
            std::pow(mu, 2.0 / 3.0) * ell,
        std::pow(kappa, 1.5) * ell,
        kappa * ell * ell,
        kappa * kappa / deff * ell,
    };
    plan.gamma = c_gamma * *std::max_element(std::begin(arms), std::end(arms));
    apply_gamma_floor(plan, kappa);

    const double stat = beta * (deff + std::sqrt(deff) * ell);
    plan.clip_level =
        str_cvx_clip_level(mu, plan.gamma, p.D1, static_cast<double>(p.T), stat, ell);
    if (!(plan.clip_level > 0.0))
        throw InputError("plan_qg: degenerate problem gives zero clip level");

    plan.step = StepSchedule{StepKind::Decaying, 4.0, plan.gamma, mu, 0.0};
    plan.output = OutputMode::LastIterate;
    return plan;
}

ParamPlan plan_smooth_convex(const ProblemParams& p, std::optional<double> eta, double c_m) {
    require_horizon_delta(p);
    if (!(c_m > 0.0)) throw InputError("plan_smooth_convex: c_m must be positive");
    const double L = require(p.L, "smooth_cvx", "L");
    if (!(L > 0.0)) throw InputError("plan_smooth_convex: L must be positive");
    const double tr = require(p.cov_trace, "smooth_cvx", "cov_trace");
    const double op = require(p.cov_opnorm, "smooth_cvx", "cov_opnorm");
    if (tr < op || op < 0.0)
        throw InputError("plan_smooth_convex: need cov_trace >= cov_opnorm >= 0");

    const double T = static_cast<double>(p.T);
    const double ell = log_term(p.T, p.delta);
    // A = sqrt(||Sigma||) (sqrt(Tr Sigma) + L D1) drives both the clip level
    // and the step candidates.
    const double A = std::sqrt(op) * (std::sqrt(tr) + L * p.D1);
    if (!(A > 0.0))
        throw InputError("plan_smooth_convex: degenerate problem (zero covariance and D1)");

    ParamPlan plan;
    plan.regime = Regime::SmoothCvx;
    plan.T = p.T;
    plan.delta = p.delta;
    plan.log_term = ell;
    plan.c_m = c_m;
    plan.gamma = 0.0;
    plan.clip_level = std::sqrt(T * A / ell);
    plan.output = OutputMode::AverageIterate;
    plan.step.kind = StepKind::Constant;

    const double eta_cap = 1.0 / (2.0 * L);
    if (eta.has_value()) {
        if (!(*eta > 0.0)) throw InputError("plan_smooth_convex: eta must be positive");
        plan.step.eta = *eta;
        if (plan.step.eta > eta_cap) {
            plan.step.eta = eta_cap;
            plan.eta_clamped = true;
        }
        return plan;
    }

    const double deff_term = tr;  // ||Sigma|| d_eff == Tr(Sigma)
    const double ld = L * p.D1;
    const double b_prime =
        2.0 * std::sqrt(A * ell / T) + 2.0 * ld * ell / (A * T) * (deff_term + ld * ld);
    const double g_prime = std::sqrt(deff_term) + 3.0 * std::sqrt(A * ell) +
                           8.0 * std::pow(ld, 4) * std::pow(ell, 1.5) /
                               (std::pow(A, 1.5) * T) +
                           2.0 * ld * ld * deff_term * std::pow(ell, 1.5) /
                               (std::pow(A, 1.5) * T);
    const double c = 1.0 / std::sqrt(8.0 * c_m + 330.0);
    double candidate = eta_cap;
    if (p.D1 > 0.0) {
        candidate = std::min(candidate, p.D1 / (b_prime * T));
        candidate = std::min(candidate, p.D1 / (g_prime * std::sqrt(T)));
    }
    plan.step.eta = std::min(c * candidate, eta_cap);
    return plan;
}

ParamPlan plan_lipschitz(const ProblemParams& p, std::optional<double> eta, double c_m) {
    require_horizon_delta(p);
    if (!(c_m > 0.0)) throw InputError("plan_lipschitz: c_m must be positive");
    const double G = require(p.G, "lip_cvx", "G");
    if (!(G > 0.0)) throw InputError("plan_lipschitz: G must be positive");
    const double tr = require(p.cov_trace, "lip_cvx", "cov_trace");
    const double op = require(p.cov_opnorm, "lip_cvx", "cov_opnorm");
    if (tr < op || op < 0.0)
        throw InputError("plan_lipschitz: need cov_trace >= cov_opnorm >= 0");

    const double T = static_cast<double>(p.T);
    const double ell = log_term(p.T, p.delta);
    const double A = std::sqrt(op) * (std::sqrt(tr) + G);
    if (!(A > 0.0)) throw InputError("plan_lipschitz: degenerate problem (zero covariance)");

    ParamPlan plan;
    plan.regime = Regime::LipCvx;
    plan.T = p.T;
    plan.delta = p.delta;
    plan.log_term = ell;
    plan.c_m = c_m;
    plan.gamma = 0.0;
    plan.clip_level = std::sqrt(T * A / ell);
    plan.output = OutputMode::AverageIterate;
    plan.step.kind = StepKind::Constant;

    const double eta_cap = G / std::sqrt(T);
    if (eta.has_value()) {
        if (!(*eta > 0.0)) throw InputError("plan_lipschitz: eta must be positive");
        plan.step.eta = *eta;
        if (plan.step.eta > eta_cap) {
            plan.step.eta = eta_cap;
            plan.eta_clamped = true;
        }
        return plan;
    }

    const double b = std::sqrt(A * ell / T) + G * (tr + G * G) * ell / (A * T);
    const double g_prime =
        std::sqrt(tr) + 3.0 * std::sqrt(A * ell) +
        G * G * std::pow(ell, 1.5) / (std::pow(A, 1.5) * T) * (tr + G * G);
    const double c = 1.0 / std::sqrt(8.0 * c_m + 334.0);
    double candidate = eta_cap;
    if (p.D1 > 0.0) {
        candidate = std::min({p.D1 / (b * T), p.D1 / (g_prime * std::sqrt(T)),
                              p.D1 / (G * std::sqrt(T))});
    }
    plan.step.eta = std::min(c * candidate, eta_cap);
    return plan;
}

ParamPlan resolve_plan(Regime regime, const ProblemParams& p, double c_gamma, double c_m,
                       double c_const, std::optional<double> eta) {
    switch (regime) {
        case Regime::StrCvx: return plan_strongly_convex(p, c_gamma, c_const);
        case Regime::StrCvxQG: return plan_qg(p, c_gamma);
        case Regime::SmoothCvx: return plan_smooth_convex(p, eta, c_m);
        case Regime::LipCvx: return plan_lipschitz(p, eta, c_m);
    }
    throw InputError("resolve_plan: unknown regime");
}

std::vector<std::pair<std::string, std::string>> ParamPlan::to_kv() const {
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("regime", regime_name(regime));
    kv.emplace_back("T", std::to_string(T));
    kv.emplace_back("delta", fmt(delta));
    kv.emplace_back("gamma", fmt(gamma));
    kv.emplace_back("clip_level", fmt(clip_level));
    if (step.kind == StepKind::Decaying) {
        kv.emplace_back("step", "decaying");
        kv.emplace_back("A", fmt(step.A));
        kv.emplace_back("mu", fmt(step.mu));
    } else {
        kv.emplace_back("step", "constant");
        kv.emplace_back("eta", fmt(step.eta));
    }
    kv.emplace_back("output",
                    output == OutputMode::LastIterate ? "last_iterate" : "average_iterate");
    kv.emplace_back("log_term", fmt(log_term));
    kv.emplace_back("c_gamma", fmt(c_gamma));
    kv.emplace_back("c_m", fmt(c_m));
    kv.emplace_back("c_const", fmt(c_const));
    kv.emplace_back("gamma_floored", gamma_floored ? "1" : "0");
    kv.emplace_back("eta_clamped", eta_clamped ? "1" : "0");
    return kv;
}

}  // namespace cliptail
