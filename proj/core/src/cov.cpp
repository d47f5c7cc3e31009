#include "cliptail/cov.hpp"

#include <algorithm>
#include <cmath>

#include "cliptail/rng.hpp"

namespace cliptail {

namespace {

void require_square(const Matrix& m) {
    const std::size_t d = m.size();
    if (d == 0) throw InputError("CovModel: empty matrix");
    for (const auto& row : m) {
        if (row.size() != d) throw InputError("CovModel: matrix not square");
        require_finite(row, "CovModel");
    }
}

void require_symmetric(const Matrix& m) {
    const std::size_t d = m.size();
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j) {
            const double scale = std::max({1.0, std::fabs(m[i][j]), std::fabs(m[j][i])});
            if (std::fabs(m[i][j] - m[j][i]) > 1e-12 * scale)
                throw InputError("CovModel: matrix not symmetric");
        }
    }
}

// Cholesky with tolerance: slightly negative pivots (within 1e-12 * opnorm)
// are clamped to zero so PSD matrices on the boundary still factor.
Matrix cholesky(const Matrix& m, double opnorm_hint) {
    const std::size_t d = m.size();
    Matrix l(d, VecD(d, 0.0));
    const double pivot_floor = -1e-12 * std::max(opnorm_hint, 1e-300);
    for (std::size_t j = 0; j < d; ++j) {
        double diag = m[j][j];
        for (std::size_t k = 0; k < j; ++k) diag -= l[j][k] * l[j][k];
        if (diag < pivot_floor)
            throw NumericError("spd_factor: matrix not positive semidefinite", diag);
        diag = std::max(diag, 0.0);
        l[j][j] = std::sqrt(diag);
        for (std::size_t i = j + 1; i < d; ++i) {
            double s = m[i][j];
            for (std::size_t k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
            l[i][j] = (l[j][j] > 0.0) ? s / l[j][j] : 0.0;
        }
    }
    return l;
}

void matvec(const Matrix& m, const VecD& x, VecD& out) {
    const std::size_t d = m.size();
    out.assign(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) out[i] = dot(m[i], x);
}

}  // namespace

double power_iteration_opnorm(const Matrix& m, double rel_tol, std::size_t max_iters_per_start,
                              double residual_tol) {
    const std::size_t d = m.size();
    if (d == 0) throw InputError("power_iteration_opnorm: empty matrix");
    if (max_iters_per_start == 0) max_iters_per_start = 10 * d;

    double trace = 0.0;
    for (std::size_t i = 0; i < d; ++i) trace += m[i][i];
    if (trace <= 0.0) return 0.0;  // PSD with zero trace is the zero matrix
    const double scale_floor = trace / static_cast<double>(d);

    auto iterate = [&](VecD v, double& out_lambda) -> bool {
        const double n0 = norm2(v);
        if (n0 == 0.0) return false;
        scale(v, 1.0 / n0);
        VecD w(d);
        double lambda = 0.0;
        for (std::size_t it = 0; it < max_iters_per_start; ++it) {
            matvec(m, v, w);
            const double nw = norm2(w);
            if (nw == 0.0) {  // v in the kernel; caller restarts
                out_lambda = 0.0;
                return false;
            }
            const double prev = lambda;
            lambda = dot(v, w);  // Rayleigh quotient
            // For unit v, ||M v - lambda v||^2 = ||M v||^2 - lambda^2.
            const double residual =
                std::sqrt(std::max(0.0, nw * nw - lambda * lambda));
            if (residual_tol > 0.0 &&
                residual <= residual_tol * std::max(lambda, scale_floor)) {
                out_lambda = lambda;
                return true;
            }
            for (std::size_t i = 0; i < d; ++i) v[i] = w[i] / nw;
            if (it > 0 && std::fabs(lambda - prev) <= rel_tol * std::fabs(lambda)) {
                // A flat Rayleigh quotient alone can be stagnation between
                // two near-equal eigenvalues; require an eigenpair residual
                // before accepting.
                if (residual <= 1e-8 * std::max(lambda, scale_floor)) {
                    out_lambda = lambda;
                    return true;
                }
            }
        }
        out_lambda = lambda;
        return false;
    };

    double lambda1 = 0.0;
    const bool ok1 = iterate(VecD(d, 1.0), lambda1);
    if (ok1 && lambda1 > 0.9 * trace / static_cast<double>(d)) {
        // Converged and not obviously trapped below the mean eigenvalue.
        return lambda1;
    }
    // One seeded random restart (fixed seed: reproducibility).
    Rng r(0x6f70726e6d31ULL, 0);
    VecD v(d);
    for (auto& x : v) x = r.normal();
    double lambda2 = 0.0;
    const bool ok2 = iterate(std::move(v), lambda2);
    const double best = std::max(lambda1, lambda2);
    if (ok1 || ok2) return best;
    throw NumericError("power_iteration_opnorm: no convergence within iteration cap", best);
}

CovModel CovModel::isotropic(double sigma2, std::size_t dim) {
    if (dim == 0) throw InputError("CovModel::isotropic: dim must be >= 1");
    if (!(sigma2 >= 0.0) || !std::isfinite(sigma2))
        throw InputError("CovModel::isotropic: sigma2 must be finite and >= 0");
    CovModel c;
    c.kind_ = CovKind::Isotropic;
    c.dim_ = dim;
    c.sigma2_ = sigma2;
    c.trace_ = static_cast<double>(dim) * sigma2;
    c.opnorm_ = sigma2;
    return c;
}

CovModel CovModel::diagonal(VecD entries) {
    if (entries.empty()) throw InputError("CovModel::diagonal: empty");
    require_finite(entries, "CovModel::diagonal");
    double tr = 0.0, mx = 0.0;
    for (double e : entries) {
        if (e < 0.0) throw InputError("CovModel::diagonal: negative entry");
        tr += e;
        mx = std::max(mx, e);
    }
    CovModel c;
    c.kind_ = CovKind::Diagonal;
    c.dim_ = entries.size();
    c.entries_ = std::move(entries);
    c.trace_ = tr;
    c.opnorm_ = mx;
    return c;
}

CovModel CovModel::full(Matrix m) {
    require_square(m);
    require_symmetric(m);
    CovModel c;
    c.kind_ = CovKind::Full;
    c.dim_ = m.size();
    double tr = 0.0;
    for (std::size_t i = 0; i < c.dim_; ++i) tr += m[i][i];
    c.trace_ = tr;
    c.opnorm_ = power_iteration_opnorm(m);
    c.factor_ = cholesky(m, c.opnorm_);
    c.matrix_ = std::move(m);
    return c;
}

CovModel CovModel::identity(std::size_t dim) { return isotropic(1.0, dim); }
CovModel CovModel::zero(std::size_t dim) { return isotropic(0.0, dim); }

double CovModel::min_eigenvalue() const {
    switch (kind_) {
        case CovKind::Isotropic:
            return sigma2_;
        case CovKind::Diagonal:
            return *std::min_element(entries_.begin(), entries_.end());
        case CovKind::Full: {
            // lambda_min = s - opnorm(s I - M) with s = opnorm(M).
            const double s = opnorm_;
            Matrix shifted = matrix_;
            for (std::size_t i = 0; i < dim_; ++i) {
                for (std::size_t j = 0; j < dim_; ++j) shifted[i][j] = -shifted[i][j];
                shifted[i][i] += s;
            }
            return std::max(0.0, s - power_iteration_opnorm(shifted));
        }
    }
    return 0.0;
}

void CovModel::apply_factor(const VecD& z, VecD& out) const {
    if (z.size() != dim_) throw InputError("CovModel::apply_factor: dimension mismatch");
    out.resize(dim_);
    switch (kind_) {
        case CovKind::Isotropic: {
            const double s = std::sqrt(sigma2_);
            for (std::size_t i = 0; i < dim_; ++i) out[i] = s * z[i];
            break;
        }
        case CovKind::Diagonal:
            for (std::size_t i = 0; i < dim_; ++i) out[i] = std::sqrt(entries_[i]) * z[i];
            break;
        case CovKind::Full:
            for (std::size_t i = 0; i < dim_; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j <= i; ++j) s += factor_[i][j] * z[j];
                out[i] = s;
            }
            break;
    }
}

void CovModel::apply(const VecD& x, VecD& out) const {
    if (x.size() != dim_) throw InputError("CovModel::apply: dimension mismatch");
    out.resize(dim_);
    switch (kind_) {
        case CovKind::Isotropic:
            for (std::size_t i = 0; i < dim_; ++i) out[i] = sigma2_ * x[i];
            break;
        case CovKind::Diagonal:
            for (std::size_t i = 0; i < dim_; ++i) out[i] = entries_[i] * x[i];
            break;
        case CovKind::Full:
            matvec(matrix_, x, out);
            break;
    }
}

const VecD& CovModel::diagonal_entries() const {
    if (kind_ != CovKind::Diagonal) throw InputError("CovModel: not a diagonal model");
    return entries_;
}

double CovModel::recompute_trace() const {
    switch (kind_) {
        case CovKind::Isotropic:
            return static_cast<double>(dim_) * sigma2_;
        case CovKind::Diagonal: {
            double tr = 0.0;
            for (double e : entries_) tr += e;
            return tr;
        }
        case CovKind::Full: {
            double tr = 0.0;
            for (std::size_t i = 0; i < dim_; ++i) tr += matrix_[i][i];
            return tr;
        }
    }
    return 0.0;
}

double CovModel::recompute_opnorm() const {
    switch (kind_) {
        case CovKind::Isotropic:
            return sigma2_;
        case CovKind::Diagonal:
            return *std::max_element(entries_.begin(), entries_.end());
        case CovKind::Full:
            return power_iteration_opnorm(matrix_);
    }
    return 0.0;
}

bool CovModel::same_as(const CovModel& other) const {
    return kind_ == other.kind_ && dim_ == other.dim_ && sigma2_ == other.sigma2_ &&
           entries_ == other.entries_ && matrix_ == other.matrix_;
}

Matrix spd_factor(const CovModel& cov) {
    const std::size_t d = cov.dim();
    Matrix l(d, VecD(d, 0.0));
    switch (cov.kind()) {
        case CovKind::Isotropic: {
            const double s = std::sqrt(cov.sigma2_);
            for (std::size_t i = 0; i < d; ++i) l[i][i] = s;
            break;
        }
        case CovKind::Diagonal:
            for (std::size_t i = 0; i < d; ++i) l[i][i] = std::sqrt(cov.entries_[i]);
            break;
        case CovKind::Full:
            l = cov.factor_;
            break;
    }
    return l;
}

double opnorm(const CovModel& cov) { return cov.opnorm(); }

double frobenius_norm(const Matrix& m) {
    double s = 0.0;
    for (const auto& row : m)
        for (double x : row) s += x * x;
    return std::sqrt(s);
}

Matrix matmul_lt(const Matrix& l) {
    const std::size_t d = l.size();
    Matrix m(d, VecD(d, 0.0));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k <= std::min(i, j); ++k) s += l[i][k] * l[j][k];
            m[i][j] = s;
        }
    return m;
}

}  // namespace cliptail
