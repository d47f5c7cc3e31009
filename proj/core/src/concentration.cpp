#include "cliptail/concentration.hpp"

#include <algorithm>
#include <cmath>

#include "cliptail/clipping.hpp"
#include "cliptail/schedule.hpp"

namespace cliptail {

MartingaleSpec make_martingale_spec(DistHandle increment, double gamma_sim, std::size_t T,
                                    std::size_t pilot_n, Rng& gen) {
    if (!(gamma_sim > 0.0)) throw InputError("make_martingale_spec: gamma_sim must be > 0");
    if (T < 1) throw InputError("make_martingale_spec: T must be >= 1");
    MartingaleSpec spec;
    spec.d = increment.dim();
    spec.T = T;
    spec.gamma_sim = gamma_sim;
    const auto est = empirical_clipped_moments(increment, gamma_sim, pilot_n, gen);
    spec.clip_mean = est.mean;
    spec.q_bar = est.trace;
    spec.p_bar = est.opnorm_estimate;
    spec.increment = std::move(increment);
    return spec;
}

double k_constant(double q_bar, double gamma, std::size_t T, double delta, std::size_t d,
                  double c_m, KForm kform) {
    (void)delta;
    if (kform == KForm::CappedLog)
        return 4.0 * std::max({8.0, c_m, std::log(static_cast<double>(T))});
    const double ratio = std::sqrt(q_bar * static_cast<double>(T)) / gamma + 1.0;
    const double inner = ratio * std::log(static_cast<double>(d) + 1.0);
    double k = c_m;
    if (inner > 1.0) {
        const double li = std::log(inner);
        if (li > 0.0) k += std::log(li);
    }
    return std::max(k, 2.0);  // lnln of small arguments is guarded below
}

double refined_bound(double q_bar, double p_bar, double gamma, std::size_t T, double delta,
                     std::size_t d, double c_m, KForm kform) {
    if (!(delta > 0.0) || !(delta < 0.5))
        throw InputError("refined_bound: delta must lie in (0, 1/2)");
    if (!(gamma > 0.0) || !(q_bar >= 0.0) || !(p_bar >= 0.0) || T < 1 || !(c_m > 0.0))
        throw InputError("refined_bound: inputs must be positive");
    const double sT = std::sqrt(static_cast<double>(T));
    const double k = k_constant(q_bar, gamma, T, delta, d, c_m, kform);
    const double g =
        c_m * (std::sqrt(q_bar) + p_bar * sT / gamma + gamma / sT * std::log(k / delta));
    return g * sT;
}

double freedman_bound(double q_bar, double gamma, std::size_t T, double delta,
                      std::size_t d) {
    if (!(delta > 0.0) || !(delta < 1.0))
        throw InputError("freedman_bound: delta must lie in (0, 1)");
    if (!(gamma > 0.0) || !(q_bar >= 0.0) || T < 1)
        throw InputError("freedman_bound: inputs must be positive");
    const double sT = std::sqrt(static_cast<double>(T));
    const double lg = std::log((static_cast<double>(d) + 1.0) / delta);
    const double g0 = 2.0 * gamma / (3.0 * sT) * lg + std::sqrt(2.0 * q_bar * lg);
    return g0 * sT;
}

double scalar_freedman_bound(double var_sum, double tau, double delta) {
    if (!(delta > 0.0) || !(delta < 1.0))
        throw InputError("scalar_freedman_bound: delta must lie in (0, 1)");
    if (!(var_sum >= 0.0) || !(tau >= 0.0))
        throw InputError("scalar_freedman_bound: inputs must be nonnegative");
    const double l = std::log(1.0 / delta);
    return 2.0 * std::sqrt(l * var_sum) + 2.0 * tau * l;
}

double gamma_for_refined(double q_raw, double p_raw, std::size_t T, std::size_t d,
                         double delta, double c_m, KForm kform) {
    if (!(p_raw > 0.0)) throw InputError("gamma_for_refined: p_raw must be > 0");
    double gamma = std::sqrt(p_raw * static_cast<double>(T));
    for (int i = 0; i < 4; ++i) {
        const double k = k_constant(q_raw, gamma, T, delta, d, c_m, kform);
        gamma = std::sqrt(p_raw * static_cast<double>(T) / std::log(k / delta));
    }
    return gamma;
}

std::size_t dyadic_up(std::size_t t, std::size_t T) {
    if (t < 1 || t > T) throw InputError("dyadic_up: t must lie in [1, T]");
    std::size_t p = 1;
    while (p < t) p <<= 1;  // 2^ceil(log2 t)
    return std::min(p, T);
}

std::vector<LabTrialStats> simulate_lab_trials(const MartingaleSpec& spec,
                                               std::size_t trials,
                                               const std::vector<double>& deltas,
                                               std::uint64_t seed) {
    if (trials < 1) throw InputError("simulate_lab_trials: trials must be >= 1");
    const std::size_t d = spec.d;
    const double tau = 2.0 * spec.gamma_sim;
    const double tau2 = tau * tau;

    // base_t(delta) = UP(t) q + tau^2 ell^2 + (t/tau^2) UP(t) p^2, with the
    // per-step covariance bounds constant across steps.
    std::vector<double> ell2(deltas.size());
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        const double ell = log_term(spec.T, deltas[i]);
        ell2[i] = ell * ell;
    }

    std::vector<LabTrialStats> out(trials);
    VecD v, m(d);
    for (std::size_t trial = 0; trial < trials; ++trial) {
        Rng gen(seed, trial);
        std::fill(m.begin(), m.end(), 0.0);
        double sup2 = 0.0;
        double lhs = 0.0;  // running sum of ||v_s||^2
        std::vector<double> ratio(deltas.size(), 0.0);
        for (std::size_t t = 1; t <= spec.T; ++t) {
            spec.increment.draw(gen, v);
            clip_inplace(v, spec.gamma_sim);
            for (std::size_t i = 0; i < d; ++i) v[i] -= spec.clip_mean[i];
            double vv = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                m[i] += v[i];
                vv += v[i] * v[i];
            }
            lhs += vv;
            sup2 = std::max(sup2, squared_norm2(m));
            const double up = static_cast<double>(dyadic_up(t, spec.T));
            for (std::size_t i = 0; i < deltas.size(); ++i) {
                const double base = up * spec.q_bar + tau2 * ell2[i] +
                                    static_cast<double>(t) / tau2 * up *
                                        spec.p_bar * spec.p_bar;
                if (base > 0.0) ratio[i] = std::max(ratio[i], lhs / base);
            }
        }
        out[trial].sup_norm = std::sqrt(sup2);
        out[trial].quad_ratio = std::move(ratio);
    }
    return out;
}

namespace {

BoundReport report_from_count(std::size_t violations, std::size_t trials, double bound) {
    BoundReport r;
    r.bound_value = bound;
    r.trials = trials;
    r.violation_rate = static_cast<double>(violations) / static_cast<double>(trials);
    r.stderr_ = std::sqrt(r.violation_rate * (1.0 - r.violation_rate) /
                          static_cast<double>(trials));
    return r;
}

}  // namespace

BoundReport simulate_sup_norm(const MartingaleSpec& spec, std::size_t trials, double bound,
                              std::uint64_t seed) {
    if (trials < 100) throw InputError("simulate_sup_norm: trials must be >= 100");
    const auto stats = simulate_lab_trials(spec, trials, {}, seed);
    std::size_t violations = 0;
    for (const auto& s : stats)
        if (s.sup_norm >= bound) ++violations;
    return report_from_count(violations, trials, bound);
}

BoundReport simulate_quad_variation(const MartingaleSpec& spec, std::size_t trials,
                                    double delta, double c_m, std::uint64_t seed) {
    if (trials < 100) throw InputError("simulate_quad_variation: trials must be >= 100");
    if (!(c_m >= 0.0)) throw InputError("simulate_quad_variation: c_m must be >= 0");
    const auto stats = simulate_lab_trials(spec, trials, {delta}, seed);
    std::size_t violations = 0;
    for (const auto& s : stats)
        if (s.quad_ratio[0] > c_m) ++violations;
    const double ell = log_term(spec.T, delta);
    const double tau = 2.0 * spec.gamma_sim;
    const double t_d = static_cast<double>(spec.T);
    const double bound_at_T =
        c_m * (t_d * spec.q_bar + tau * tau * ell * ell +
               t_d / (tau * tau) * t_d * spec.p_bar * spec.p_bar);
    return report_from_count(violations, trials, bound_at_T);
}

}  // namespace cliptail
