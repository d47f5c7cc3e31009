#pragma once

#include <cstddef>
#include <vector>

#include "cliptail/generators.hpp"
#include "cliptail/rng.hpp"
#include "cliptail/vec.hpp"

namespace cliptail {

/// Two conventions for the K constant inside the refined bound's log factor:
/// LogLog is the iterated-log form K = lnln((sqrt(qT)/Gamma + 1) ln(d+1)) + C_M
/// (guarded below by 2); CappedLog is K = 4 max{8, C_M, ln T}.
enum class KForm { LogLog, CappedLog };

/// Simulated martingale: increments are i.i.d. draws from `increment`,
/// clipped at gamma_sim and re-centered by the frozen clip mean, so
/// ||v_t|| <= 2 gamma_sim almost surely. q_bar and p_bar are the trace and
/// operator-norm bounds of the post-clip covariance, measured once from a
/// pilot sample and then fixed.
struct MartingaleSpec {
    std::size_t d = 1;
    std::size_t T = 1;
    DistHandle increment;
    double gamma_sim = 1.0;
    VecD clip_mean;
    double q_bar = 0.0;
    double p_bar = 0.0;
};

/// Measures the clipped moments of `increment` with pilot_n draws and
/// freezes them into a MartingaleSpec.
MartingaleSpec make_martingale_spec(DistHandle increment, double gamma_sim, std::size_t T,
                                    std::size_t pilot_n, Rng& gen);

struct BoundReport {
    double bound_value = 0.0;
    double violation_rate = 0.0;
    std::size_t trials = 0;
    double stderr_ = 0.0;  // sqrt(rate (1-rate) / trials)
};

double k_constant(double q_bar, double gamma, std::size_t T, double delta, std::size_t d,
                  double c_m, KForm kform);

/// g(T,delta) sqrt(T) with g = C_M [sqrt(q) + p sqrt(T)/Gamma +
/// (Gamma/sqrt(T)) ln(K/delta)]. delta must lie in (0, 1/2).
double refined_bound(double q_bar, double p_bar, double gamma, std::size_t T, double delta,
                     std::size_t d, double c_m, KForm kform = KForm::LogLog);

/// Matrix-Freedman baseline: g0 sqrt(T) with
/// g0 = (2 Gamma / (3 sqrt(T))) ln((d+1)/delta) + sqrt(2 q ln((d+1)/delta)).
double freedman_bound(double q_bar, double gamma, std::size_t T, double delta,
                      std::size_t d);

/// Scalar Freedman: 2 sqrt(ln(1/delta) var_sum) + 2 tau ln(1/delta).
double scalar_freedman_bound(double var_sum, double tau, double delta);

/// Clip level from the light-tail remark, Gamma = sqrt(||Sigma|| T /
/// ln(K/delta)), resolved by a short fixed-point iteration since K depends
/// on Gamma.
double gamma_for_refined(double q_raw, double p_raw, std::size_t T, std::size_t d,
                         double delta, double c_m, KForm kform = KForm::LogLog);

/// UP(t) = min(T, 2^ceil(log2 t)): nondecreasing, idempotent, >= t.
std::size_t dyadic_up(std::size_t t, std::size_t T);

/// Per-trial statistics of the simulated martingale. sup_norm is
/// sup_{t<=T} ||M_t||; quad_ratio[i] is the smallest multiplier C such that
/// sum_{s<=t} ||v_s||^2 <= C * [sum_{s<=UP(t)} q_s + tau^2 ln(ln T/delta_i)^2
/// + (t/tau^2) sum_{s<=UP(t)} p_s^2] holds for all t, with tau = 2 gamma_sim.
struct LabTrialStats {
    double sup_norm = 0.0;
    std::vector<double> quad_ratio;
};

/// Simulates `trials` independent martingales (one derived generator stream
/// per trial) and records the statistics needed to evaluate any bound after
/// the fact.
std::vector<LabTrialStats> simulate_lab_trials(const MartingaleSpec& spec,
                                               std::size_t trials,
                                               const std::vector<double>& deltas,
                                               std::uint64_t seed);

/// Fraction of trials with sup_t ||M_t|| >= bound.
BoundReport simulate_sup_norm(const MartingaleSpec& spec, std::size_t trials, double bound,
                              std::uint64_t seed);

/// Fraction of trials violating the three-term quadratic-variation inequality
/// at multiplier c_m, simultaneously over all t in [T].
BoundReport simulate_quad_variation(const MartingaleSpec& spec, std::size_t trials,
                                    double delta, double c_m, std::uint64_t seed);

}  // namespace cliptail
