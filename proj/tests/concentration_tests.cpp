#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cliptail/clipping.hpp"
#include "cliptail/concentration.hpp"

using namespace cliptail;

TEST_CASE("refined_bound worked example") {
    // q = 1, p = 1, Gamma = sqrt(T), C_M = 1, T = 100, delta = 0.1, d = 10:
    // compute K first, then g, then g sqrt(T).
    const std::size_t T = 100, d = 10;
    const double gamma = 10.0;
    const double ratio = std::sqrt(1.0 * 100.0) / gamma + 1.0;  // = 2
    const double inner = ratio * std::log(11.0);
    double k = 1.0 + std::log(std::log(inner));
    k = std::max(k, 2.0);
    const double g = 1.0 * (1.0 + 1.0 * 10.0 / gamma + gamma / 10.0 * std::log(k / 0.1));
    CHECK(refined_bound(1.0, 1.0, gamma, T, 0.1, d, 1.0) ==
          doctest::Approx(g * 10.0).epsilon(1e-14));
}

TEST_CASE("refined_bound homogeneity and delta structure") {
    const std::size_t T = 256, d = 8;
    const double q = 2.0, p = 0.7, gamma = 9.0, cm = 2.0;
    const double base = refined_bound(q, p, gamma, T, 0.05, d, cm);
    // Rescaling the increments v -> c v sends (q, p, Gamma) to
    // (c^2 q, c^2 p, c Gamma) and the bound to c times itself, exactly: the
    // K factor only sees the scale-invariant ratio sqrt(qT)/Gamma.
    const double c = 3.0;
    const double scaled = refined_bound(c * c * q, c * c * p, c * gamma, T, 0.05, d, cm);
    CHECK(scaled == doctest::Approx(c * base).epsilon(1e-12));
    // delta -> delta/10 adds exactly C_M * Gamma * ln 10 (K has no delta).
    const double tighter = refined_bound(q, p, gamma, T, 0.005, d, cm);
    CHECK(tighter - base == doctest::Approx(cm * gamma * std::log(10.0)).epsilon(1e-10));

    CHECK_THROWS_AS(refined_bound(q, p, gamma, T, 0.6, d, cm), InputError);
}

TEST_CASE("refined_bound is quasi-convex in Gamma with an interior minimizer") {
    const std::size_t T = 512, d = 4;
    const double q = 4.0, p = 1.0;
    std::vector<double> values;
    for (double g = 0.25; g <= 4096.0; g *= 2.0)
        values.push_back(refined_bound(q, p, g, T, 0.05, d, 1.0));
    // Strictly decreasing then increasing: exactly one sign change in the
    // finite differences, and the minimum is interior.
    std::size_t changes = 0;
    for (std::size_t i = 1; i + 1 < values.size(); ++i)
        if ((values[i] - values[i - 1] < 0.0) != (values[i + 1] - values[i] < 0.0)) ++changes;
    CHECK(changes == 1);
    const auto min_it = std::min_element(values.begin(), values.end());
    CHECK(min_it != values.begin());
    CHECK(min_it != values.end() - 1);
}

TEST_CASE("freedman_bound examples") {
    // Gamma -> 0 limit leaves the variance term.
    const std::size_t T = 64, d = 3;
    CHECK(freedman_bound(2.0, 1e-300, T, 0.1, d) ==
          doctest::Approx(std::sqrt(2.0 * 2.0 * 64.0 * std::log(4.0 / 0.1))).epsilon(1e-12));
    // q = 0 leaves the range term.
    CHECK(freedman_bound(0.0, 3.0, T, 0.1, d) ==
          doctest::Approx(2.0 * 3.0 / 3.0 * std::log(4.0 / 0.1)).epsilon(1e-12));
    // d = 1, delta = (d+1)/e makes the log factor exactly 1.
    const double delta = 2.0 / std::exp(1.0);
    CHECK(freedman_bound(1.5, 2.0, 25, delta, 1) ==
          doctest::Approx(2.0 * 2.0 / 3.0 + std::sqrt(2.0 * 1.5) * 5.0).epsilon(1e-12));
}

TEST_CASE("scalar_freedman_bound examples") {
    CHECK(scalar_freedman_bound(1.0, 0.0, std::exp(-1.0)) ==
          doctest::Approx(2.0).epsilon(1e-14));
    CHECK(scalar_freedman_bound(0.0, 1.0, std::exp(-1.0)) ==
          doctest::Approx(2.0).epsilon(1e-14));
    CHECK(scalar_freedman_bound(4.0, 3.0, std::exp(-2.0)) ==
          doctest::Approx(4.0 * std::sqrt(2.0) + 12.0).epsilon(1e-14));
}

TEST_CASE("dyadic UP properties") {
    const std::size_t T = 300;
    std::size_t prev = 1;
    for (std::size_t t = 1; t <= T; ++t) {
        const std::size_t up = dyadic_up(t, T);
        CHECK(up >= t);
        CHECK(up >= prev);
        CHECK(dyadic_up(up, T) == up);  // idempotent
        prev = up;
    }
    CHECK(dyadic_up(T, T) == T);
    CHECK(dyadic_up(1, T) == 1);
    CHECK(dyadic_up(3, T) == 4);
    CHECK(dyadic_up(256, 300) == 256);
    CHECK(dyadic_up(257, 300) == 300);
    CHECK_THROWS_AS(dyadic_up(0, T), InputError);
}

TEST_CASE("simulate_sup_norm degenerate cases") {
    Rng pilot(1, 0);
    const auto zero = DistHandle::point_mass(zeros(3));
    const auto spec = make_martingale_spec(zero, 1.0, 50, 1000, pilot);
    const auto never = simulate_sup_norm(spec, 200, 1e-9, 12345);
    CHECK(never.violation_rate == 0.0);

    Rng pilot2(2, 0);
    const auto gauss = DistHandle::gaussian(CovModel::identity(3));
    const auto spec2 = make_martingale_spec(gauss, 10.0, 50, 10000, pilot2);
    const auto always = simulate_sup_norm(spec2, 200, 0.0, 999);
    CHECK(always.violation_rate == 1.0);
    CHECK_THROWS_AS(simulate_sup_norm(spec2, 10, 1.0, 1), InputError);
}

TEST_CASE("gaussian increments meet the refined bound at C_M = 1") {
    // Light-tail check with the remark's clip level Gamma =
    // sqrt(||Sigma|| T / ln(K/delta)).
    const double delta = 0.1;
    for (std::size_t T : {128, 512}) {
        for (std::size_t d : {2, 16}) {
            Rng pilot(17, d);
            const auto h = DistHandle::gaussian(CovModel::identity(d));
            const double clip_level = gamma_for_refined(static_cast<double>(d), 1.0, T, d,
                                                        delta, 1.0);
            const auto spec = make_martingale_spec(h, clip_level, T, 100000, pilot);
            const double bound = refined_bound(spec.q_bar, spec.p_bar,
                                               2.0 * spec.gamma_sim, T, delta, d, 1.0);
            const auto rep = simulate_sup_norm(spec, 2000, bound, 777);
            CHECK(rep.violation_rate <= delta + 3.0 * std::max(rep.stderr_, 1e-3));
        }
    }
}

TEST_CASE("martingale increments are mean zero") {
    Rng pilot(3, 0);
    const auto h = DistHandle::student_t(3.0, CovModel::identity(2));
    const auto spec = make_martingale_spec(h, 2.0, 4, 200000, pilot);
    // Accumulate v_t across trials at fixed t = 1.
    const std::size_t trials = 20000;
    VecD sum = zeros(2), v;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        Rng gen(4242, trial);
        spec.increment.draw(gen, v);
        clip_inplace(v, spec.gamma_sim);
        for (int i = 0; i < 2; ++i) sum[i] += v[i] - spec.clip_mean[i];
    }
    const double se = std::sqrt(spec.q_bar / static_cast<double>(trials));
    for (int i = 0; i < 2; ++i)
        CHECK(std::fabs(sum[i] / static_cast<double>(trials)) <= 5.0 * se);
}

TEST_CASE("simulate_quad_variation degenerate cases") {
    Rng pilot(5, 0);
    const auto zero = DistHandle::point_mass(zeros(2));
    const auto spec = make_martingale_spec(zero, 1.0, 64, 1000, pilot);
    CHECK(simulate_quad_variation(spec, 200, 0.1, 1.0, 5150).violation_rate == 0.0);

    Rng pilot2(6, 0);
    const auto gauss = DistHandle::gaussian(CovModel::identity(2));
    const auto spec2 = make_martingale_spec(gauss, 5.0, 64, 10000, pilot2);
    // C_M -> 0 collapses the right-hand side; every nondegenerate trial
    // violates.
    CHECK(simulate_quad_variation(spec2, 200, 0.1, 0.0, 5150).violation_rate == 1.0);
}

TEST_CASE("bounded symmetric increments satisfy the quad-variation bound") {
    // d = 1, T = 256, +/-Gamma coordinate increments.
    Rng pilot(7, 0);
    DistHandle rademacher = DistHandle::gaussian(CovModel::identity(1));
    // Clip far below the typical magnitude: the clipped draw is essentially
    // +/- clip level, a bounded symmetric increment.
    const auto spec = make_martingale_spec(rademacher, 0.05, 256, 100000, pilot);
    const auto rep = simulate_quad_variation(spec, 1000, 0.1, 8.0, 4711);
    CHECK(rep.violation_rate <= 0.1 + 3.0 * std::max(rep.stderr_, 1e-3));
}

TEST_CASE("K convention flag") {
    const double loglog = k_constant(1.0, 10.0, 100, 0.1, 10, 1.0, KForm::LogLog);
    const double capped = k_constant(1.0, 10.0, 100, 0.1, 10, 1.0, KForm::CappedLog);
    CHECK(capped == 32.0);  // 4 max{8, 1, ln 100}
    CHECK(loglog >= 2.0);
    CHECK(loglog != capped);
    // Both flow through refined_bound.
    CHECK(refined_bound(1.0, 1.0, 10.0, 100, 0.1, 10, 1.0, KForm::CappedLog) >
          refined_bound(1.0, 1.0, 10.0, 100, 0.1, 10, 1.0, KForm::LogLog));
}
