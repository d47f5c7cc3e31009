#include "cliptail/generators.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace cliptail {

namespace {

CovModel scale_cov(const CovModel& cov, double factor) {
    switch (cov.kind()) {
        case CovKind::Isotropic:
            return CovModel::isotropic(factor * cov.opnorm(), cov.dim());
        case CovKind::Diagonal: {
            VecD e = cov.diagonal_entries();
            for (double& x : e) x *= factor;
            return CovModel::diagonal(std::move(e));
        }
        case CovKind::Full: {
            Matrix l = spd_factor(cov);
            Matrix m = matmul_lt(l);
            for (auto& row : m)
                for (double& x : row) x *= factor;
            return CovModel::full(std::move(m));
        }
    }
    return cov;
}

}  // namespace

DistHandle DistHandle::gaussian(CovModel cov) {
    DistHandle h;
    h.kind_ = DistKind::Gaussian;
    h.dim_ = cov.dim();
    h.sampling_cov_ = cov;
    h.cov_ = std::move(cov);
    h.mean_ = zeros(h.dim_);
    return h;
}

DistHandle DistHandle::student_t(double nu, CovModel target_cov) {
    if (!(nu > 2.0)) throw InputError("DistHandle::student_t: requires nu > 2");
    DistHandle h;
    h.kind_ = DistKind::StudentT;
    h.dim_ = target_cov.dim();
    h.nu_ = nu;
    // Cov of t_nu with scale S is nu/(nu-2) * S; pre-shrink so it comes out
    // exactly at the target.
    h.sampling_cov_ = scale_cov(target_cov, (nu - 2.0) / nu);
    h.cov_ = std::move(target_cov);
    h.mean_ = zeros(h.dim_);
    return h;
}

DistHandle DistHandle::pareto_radial(double alpha_tail, CovModel target_cov) {
    if (!(alpha_tail > 2.0) || !(alpha_tail <= 4.0))
        throw InputError("DistHandle::pareto_radial: requires alpha_tail in (2, 4]");
    DistHandle h;
    h.kind_ = DistKind::ParetoRadial;
    h.dim_ = target_cov.dim();
    h.alpha_ = alpha_tail;
    // x = c * r * (F u) with u uniform on the sphere, r ~ Pareto(alpha, min 1):
    // E[x x^T] = c^2 * E[r^2] / d * F F^T, E[r^2] = alpha/(alpha-2).
    h.radial_scale_ =
        std::sqrt(static_cast<double>(h.dim_) * (alpha_tail - 2.0) / alpha_tail);
    h.sampling_cov_ = target_cov;
    h.cov_ = std::move(target_cov);
    h.mean_ = zeros(h.dim_);
    return h;
}

DistHandle DistHandle::scalar_t(double nu, double target_var) {
    if (!(target_var >= 0.0)) throw InputError("DistHandle::scalar_t: negative variance");
    return student_t(nu, CovModel::diagonal(VecD{target_var}));
}

DistHandle DistHandle::point_mass(VecD v) {
    require_finite(v, "DistHandle::point_mass");
    DistHandle h;
    h.kind_ = DistKind::PointMass;
    h.dim_ = v.size();
    h.cov_ = CovModel::zero(h.dim_);
    h.sampling_cov_ = h.cov_;
    h.mean_ = zeros(h.dim_);
    h.point_ = std::move(v);
    return h;
}

DistHandle DistHandle::shifted(VecD mean) const {
    require_finite(mean, "DistHandle::shifted");
    if (mean.size() != dim_) throw InputError("DistHandle::shifted: dimension mismatch");
    DistHandle h = *this;
    for (std::size_t i = 0; i < dim_; ++i) h.mean_[i] += mean[i];
    return h;
}

void DistHandle::draw(Rng& gen, VecD& out) const {
    out.resize(dim_);
    switch (kind_) {
        case DistKind::PointMass:
            out = point_;
            break;
        case DistKind::Gaussian: {
            VecD z(dim_);
            for (auto& x : z) x = gen.normal();
            sampling_cov_.apply_factor(z, out);
            break;
        }
        case DistKind::StudentT: {
            VecD z(dim_);
            for (auto& x : z) x = gen.normal();
            const double w = gen.chi_square(nu_);
            const double infl = std::sqrt(nu_ / w);
            for (auto& x : z) x *= infl;
            sampling_cov_.apply_factor(z, out);
            break;
        }
        case DistKind::ParetoRadial: {
            VecD z(dim_);
            double n = 0.0;
            do {
                for (auto& x : z) x = gen.normal();
                n = norm2(z);
            } while (n == 0.0);
            const double r = std::pow(gen.uniform01_open0(), -1.0 / alpha_);
            const double c = radial_scale_ * r / n;
            for (auto& x : z) x *= c;
            sampling_cov_.apply_factor(z, out);
            break;
        }
        case DistKind::ScalarT:
            break;  // unreachable: scalar_t constructs a StudentT handle
    }
    for (std::size_t i = 0; i < dim_; ++i) out[i] += mean_[i];
}

VecD DistHandle::draw(Rng& gen) const {
    VecD out;
    draw(gen, out);
    return out;
}

double DistHandle::draw_scalar(Rng& gen) const {
    if (dim_ != 1) throw InputError("DistHandle::draw_scalar: handle is not 1-d");
    VecD out;
    draw(gen, out);
    return out[0];
}

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string describe_cov(const CovModel& c) {
    switch (c.kind()) {
        case CovKind::Isotropic:
            return c.opnorm() == 1.0 ? "identity" : "iso:" + num(c.opnorm());
        case CovKind::Diagonal: {
            std::string s = "diag:[";
            const VecD& e = c.diagonal_entries();
            for (std::size_t i = 0; i < e.size(); ++i)
                s += (i ? "," : "") + num(e[i]);
            return s + "]";
        }
        case CovKind::Full:
            return "full:" + std::to_string(c.dim()) + "x" + std::to_string(c.dim());
    }
    return "?";
}

}  // namespace

std::string DistHandle::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case DistKind::Gaussian:
            os << "gaussian(cov=" << describe_cov(cov_) << ")";
            break;
        case DistKind::StudentT:
        case DistKind::ScalarT:
            os << "student_t(nu=" << num(nu_) << ", cov=" << describe_cov(cov_) << ")";
            break;
        case DistKind::ParetoRadial:
            os << "pareto_radial(alpha=" << num(alpha_) << ", cov=" << describe_cov(cov_)
               << ")";
            break;
        case DistKind::PointMass: {
            os << "point_mass([";
            for (std::size_t i = 0; i < point_.size(); ++i)
                os << (i ? "," : "") << num(point_[i]);
            os << "])";
            break;
        }
    }
    for (double m : mean_)
        if (m != 0.0) {
            os << "+mean";
            break;
        }
    return os.str();
}

}  // namespace cliptail
