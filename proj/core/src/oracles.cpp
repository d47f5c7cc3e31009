#include "cliptail/oracles.hpp"

#include <cmath>

namespace cliptail {

const char* oracle_kind_name(OracleKind k) {
    switch (k) {
        case OracleKind::MeanEst: return "mean";
        case OracleKind::LinReg: return "linreg";
        case OracleKind::LogReg: return "logreg";
        case OracleKind::Lad: return "lad";
    }
    return "?";
}

double sigmoid(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

namespace {

// ln(1 + exp(z)) without overflow.
double log1pexp(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

void require_mean_zero(const DistHandle& h, const char* what) {
    for (double m : h.mean_offset())
        if (m != 0.0) throw InputError(std::string(what) + ": covariates must be mean zero");
}

}  // namespace

OracleSpec OracleSpec::mean_estimation(VecD target_mean, DistHandle noise) {
    require_finite(target_mean, "mean_estimation");
    if (noise.dim() != target_mean.size())
        throw InputError("mean_estimation: noise dimension mismatch");
    OracleSpec s;
    s.kind_ = OracleKind::MeanEst;
    s.optimum_ = std::move(target_mean);
    s.covariate_ = std::move(noise);
    return s;
}

OracleSpec OracleSpec::linear_regression(VecD theta_star, DistHandle covariate,
                                         DistHandle noise) {
    require_finite(theta_star, "linear_regression");
    if (covariate.dim() != theta_star.size())
        throw InputError("linear_regression: covariate dimension mismatch");
    if (noise.dim() != 1) throw InputError("linear_regression: noise must be 1-d");
    require_mean_zero(covariate, "linear_regression");
    if (!(covariate.true_cov().min_eigenvalue() > 0.0))
        throw InputError("linear_regression: covariate covariance must be positive definite");
    OracleSpec s;
    s.kind_ = OracleKind::LinReg;
    s.optimum_ = std::move(theta_star);
    s.covariate_ = std::move(covariate);
    s.noise_ = std::move(noise);
    return s;
}

OracleSpec OracleSpec::logistic_regression(VecD theta_star, DistHandle covariate) {
    require_finite(theta_star, "logistic_regression");
    if (covariate.dim() != theta_star.size())
        throw InputError("logistic_regression: covariate dimension mismatch");
    require_mean_zero(covariate, "logistic_regression");
    OracleSpec s;
    s.kind_ = OracleKind::LogReg;
    s.optimum_ = std::move(theta_star);
    s.covariate_ = std::move(covariate);
    return s;
}

OracleSpec OracleSpec::lad_regression(VecD theta_star, DistHandle covariate,
                                      DistHandle noise) {
    require_finite(theta_star, "lad_regression");
    if (covariate.dim() != theta_star.size())
        throw InputError("lad_regression: covariate dimension mismatch");
    if (noise.dim() != 1) throw InputError("lad_regression: noise must be 1-d");
    require_mean_zero(covariate, "lad_regression");
    OracleSpec s;
    s.kind_ = OracleKind::Lad;
    s.optimum_ = std::move(theta_star);
    s.covariate_ = std::move(covariate);
    s.noise_ = std::move(noise);
    return s;
}

double OracleSpec::noise_sigma() const {
    if (kind_ != OracleKind::LinReg && kind_ != OracleKind::Lad)
        throw InputError("noise_sigma: oracle has no response noise");
    return std::sqrt(noise_.true_cov().trace());
}

double OracleSpec::sample_loss(const VecD& theta, const VecD& x, double y) const {
    switch (kind_) {
        case OracleKind::MeanEst: {
            double s = 0.0;
            for (std::size_t i = 0; i < theta.size(); ++i) {
                const double d = theta[i] - x[i];
                s += d * d;
            }
            return 0.5 * s;
        }
        case OracleKind::LinReg: {
            const double r = dot(x, theta) - y;
            return 0.5 * r * r;
        }
        case OracleKind::LogReg: {
            const double z = dot(x, theta);
            return log1pexp(z) - y * z;
        }
        case OracleKind::Lad:
            return std::fabs(dot(x, theta) - y);
    }
    return 0.0;
}

void OracleSpec::sample_gradient(const VecD& query, Rng& gen, GradSample& out) const {
    if (query.size() != dim()) throw InputError("sample_gradient: dimension mismatch");
    const std::size_t d = dim();
    out.grad.resize(d);
    switch (kind_) {
        case OracleKind::MeanEst: {
            covariate_.draw(gen, out.raw_x);
            for (std::size_t i = 0; i < d; ++i) {
                out.raw_x[i] += optimum_[i];
                out.grad[i] = query[i] - out.raw_x[i];
            }
            out.raw_y = 0.0;
            out.loss_at_query = 0.5 * squared_norm2(out.grad);
            break;
        }
        case OracleKind::LinReg: {
            covariate_.draw(gen, out.raw_x);
            const double eps = noise_.draw_scalar(gen);
            out.raw_y = dot(out.raw_x, optimum_) + eps;
            const double r = dot(out.raw_x, query) - out.raw_y;
            for (std::size_t i = 0; i < d; ++i) out.grad[i] = r * out.raw_x[i];
            out.loss_at_query = 0.5 * r * r;
            break;
        }
        case OracleKind::LogReg: {
            covariate_.draw(gen, out.raw_x);
            const double p = sigmoid(dot(out.raw_x, optimum_));
            out.raw_y = (gen.uniform01() < p) ? 1.0 : 0.0;
            const double z = dot(out.raw_x, query);
            const double c = sigmoid(z) - out.raw_y;
            for (std::size_t i = 0; i < d; ++i) out.grad[i] = c * out.raw_x[i];
            out.loss_at_query = log1pexp(z) - out.raw_y * z;
            break;
        }
        case OracleKind::Lad: {
            covariate_.draw(gen, out.raw_x);
            const double eps = noise_.draw_scalar(gen);
            out.raw_y = dot(out.raw_x, optimum_) + eps;
            const double r = dot(out.raw_x, query) - out.raw_y;
            const double s = (r > 0.0) ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
            for (std::size_t i = 0; i < d; ++i) out.grad[i] = s * out.raw_x[i];
            out.loss_at_query = std::fabs(r);
            break;
        }
    }
}

GradSample OracleSpec::sample_gradient(const VecD& query, Rng& gen) const {
    GradSample out;
    sample_gradient(query, gen, out);
    return out;
}

std::optional<VecD> OracleSpec::population_gradient(const VecD& query) const {
    if (query.size() != dim()) throw InputError("population_gradient: dimension mismatch");
    switch (kind_) {
        case OracleKind::MeanEst: {
            VecD g(query.size());
            for (std::size_t i = 0; i < query.size(); ++i) g[i] = query[i] - optimum_[i];
            return g;
        }
        case OracleKind::LinReg: {
            VecD diff(query.size());
            for (std::size_t i = 0; i < query.size(); ++i) diff[i] = query[i] - optimum_[i];
            VecD g;
            covariate_cov().apply(diff, g);
            return g;
        }
        case OracleKind::LogReg:
        case OracleKind::Lad:
            return std::nullopt;  // no closed form
    }
    return std::nullopt;
}

GapEstimate OracleSpec::population_gap(const VecD& query, std::size_t mc_n, Rng& gen) const {
    if (query.size() != dim()) throw InputError("population_gap: dimension mismatch");
    GapEstimate est;
    switch (kind_) {
        case OracleKind::MeanEst: {
            double s = 0.0;
            for (std::size_t i = 0; i < query.size(); ++i) {
                const double d = query[i] - optimum_[i];
                s += d * d;
            }
            est.gap = 0.5 * s;
            return est;
        }
        case OracleKind::LinReg: {
            VecD diff(query.size());
            for (std::size_t i = 0; i < query.size(); ++i) diff[i] = query[i] - optimum_[i];
            VecD sd;
            covariate_cov().apply(diff, sd);
            est.gap = 0.5 * dot(diff, sd);
            return est;
        }
        case OracleKind::LogReg:
        case OracleKind::Lad: {
            if (mc_n < 2) throw InputError("population_gap: mc_n must be >= 2");
            // Paired differences: the same sample evaluated at the query and
            // at the optimum, which cancels most of the Monte-Carlo variance.
            double sum = 0.0, sum2 = 0.0;
            GradSample s;
            for (std::size_t k = 0; k < mc_n; ++k) {
                sample_gradient(optimum_, gen, s);  // draws (x, y); grad unused
                const double diff =
                    sample_loss(query, s.raw_x, s.raw_y) - sample_loss(optimum_, s.raw_x, s.raw_y);
                sum += diff;
                sum2 += diff * diff;
            }
            const double n = static_cast<double>(mc_n);
            est.gap = sum / n;
            const double var = std::max(0.0, sum2 / n - est.gap * est.gap);
            est.stderr_ = std::sqrt(var / n);
            return est;
        }
    }
    return est;
}

std::vector<std::pair<std::string, std::string>> OracleSpec::to_kv() const {
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("kind", oracle_kind_name(kind_));
    kv.emplace_back("dim", std::to_string(dim()));
    switch (kind_) {
        case OracleKind::MeanEst:
            kv.emplace_back("noise", covariate_.describe());
            break;
        case OracleKind::LinReg:
        case OracleKind::Lad:
            kv.emplace_back("covariate", covariate_.describe());
            kv.emplace_back("noise", noise_.describe());
            break;
        case OracleKind::LogReg:
            kv.emplace_back("covariate", covariate_.describe());
            break;
    }
    return kv;
}

ProblemParams OracleSpec::derived_constants(double c4) const {
    ProblemParams p;
    switch (kind_) {
        case OracleKind::MeanEst: {
            p.mu = 1.0;
            p.L = 1.0;
            const CovModel& c = covariate_cov();
            p.cov_trace = c.trace();
            p.cov_opnorm = c.opnorm();
            if (c.opnorm() > 0.0) p.d_eff = c.trace() / c.opnorm();
            break;
        }
        case OracleKind::LinReg: {
            if (!(c4 >= 1.0)) throw InputError("derived_constants: c4 must be >= 1");
            const CovModel& c = covariate_cov();
            const double op = c.opnorm();
            p.L = op;
            p.mu = c.min_eigenvalue();
            p.alpha = 2.0 * (c4 + 1.0) * op * op;
            const double sigma = noise_sigma();
            p.beta = sigma * sigma * op;
            p.d_eff = c.trace() / op;
            break;
        }
        case OracleKind::LogReg: {
            const CovModel& c = covariate_cov();
            p.L = c.opnorm();
            // Gradient-noise covariance is bounded by 2 Sigma.
            p.cov_trace = 2.0 * c.trace();
            p.cov_opnorm = 2.0 * c.opnorm();
            break;
        }
        case OracleKind::Lad: {
            const CovModel& c = covariate_cov();
            p.G = std::sqrt(c.trace());
            p.cov_trace = c.trace();
            p.cov_opnorm = c.opnorm();
            break;
        }
    }
    return p;
}

}  // namespace cliptail
