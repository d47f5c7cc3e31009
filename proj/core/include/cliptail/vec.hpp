#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "cliptail/errors.hpp"

namespace cliptail {

/// Dense d-dimensional real vector. Iterates, gradients and samples are all
/// plain VecD values; operations validate finiteness where the contract
/// requires it.
using VecD = std::vector<double>;

inline bool all_finite(const VecD& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

inline void require_finite(const VecD& v, const char* what) {
    if (!all_finite(v)) throw InputError(std::string(what) + ": non-finite entry");
}

inline void require_same_dim(const VecD& a, const VecD& b, const char* what) {
    if (a.size() != b.size()) throw InputError(std::string(what) + ": dimension mismatch");
}

inline double dot(const VecD& a, const VecD& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double squared_norm2(const VecD& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

/// Euclidean norm without finiteness validation; rescales when the squared
/// sum overflows (entries near DBL_MAX).
inline double robust_norm2(const VecD& v) {
    const double ss = squared_norm2(v);
    if (std::isfinite(ss)) return std::sqrt(ss);
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    if (!std::isfinite(m) || m == 0.0) return m;
    double s = 0.0;
    for (double x : v) {
        const double t = x / m;
        s += t * t;
    }
    return m * std::sqrt(s);
}

/// Euclidean norm. norm2(v) == 0 iff v == 0.
inline double norm2(const VecD& v) {
    require_finite(v, "norm2");
    return robust_norm2(v);
}

inline double distance2(const VecD& a, const VecD& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

// y += c * x
inline void axpy(double c, const VecD& x, VecD& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += c * x[i];
}

inline void scale(VecD& v, double c) {
    for (double& x : v) x *= c;
}

inline VecD zeros(std::size_t d) { return VecD(d, 0.0); }

}  // namespace cliptail
