#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "cliptail/errors.hpp"

namespace cliptail {

/// Seeded random stream. Constructed from a 64-bit seed plus a stream index;
/// identical (seed, stream) pairs produce identical draw sequences. The
/// engine is std::mt19937_64 (bit-exact by the standard); the distribution
/// transforms are implemented here rather than taken from <random>, whose
/// distributions are implementation-defined.
///
/// A generator is owned by exactly one worker; sharing one across threads is
/// a contract violation.
class Rng {
  public:
    Rng() : Rng(0, 0) {}

    Rng(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t s = mix64(seed + 0x9e3779b97f4a7c15ULL);
        s = mix64(s ^ mix64(stream + 0xbf58476d1ce4e5b9ULL));
        std::uint32_t words[8];
        for (auto& w : words) {
            s = mix64(s + 0x9e3779b97f4a7c15ULL);
            w = static_cast<std::uint32_t>(s >> 32);
        }
        std::seed_seq seq(std::begin(words), std::end(words));
        engine_.seed(seq);
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform double in (0, 1]; safe as a log() argument.
    double uniform01_open0() { return 1.0 - uniform01(); }

    /// Standard normal via the Marsaglia polar method.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    /// Gamma(shape, scale=1) for shape >= 1 (Marsaglia–Tsang squeeze).
    double gamma(double shape) {
        if (!(shape >= 1.0)) throw InputError("Rng::gamma: shape must be >= 1");
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform01_open0();
            const double x2 = x * x;
            if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
            if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    /// Chi-square with nu > 2 degrees of freedom (nu need not be integral).
    double chi_square(double nu) {
        if (!(nu > 2.0)) throw InputError("Rng::chi_square: requires nu > 2");
        return 2.0 * gamma(0.5 * nu);
    }

  private:
    static std::uint64_t mix64(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace cliptail
