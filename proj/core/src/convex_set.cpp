#include "cliptail/convex_set.hpp"

#include <algorithm>
#include <cmath>

namespace cliptail {

ConvexSet ConvexSet::unconstrained() {
    ConvexSet s;
    s.kind_ = SetKind::Unconstrained;
    return s;
}

ConvexSet ConvexSet::ball(VecD center, double radius) {
    require_finite(center, "ConvexSet::ball");
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw InputError("ConvexSet::ball: radius must be finite and positive");
    ConvexSet s;
    s.kind_ = SetKind::Ball;
    s.center_ = std::move(center);
    s.radius_ = radius;
    return s;
}

ConvexSet ConvexSet::box(VecD lower, VecD upper) {
    require_finite(lower, "ConvexSet::box");
    require_finite(upper, "ConvexSet::box");
    require_same_dim(lower, upper, "ConvexSet::box");
    for (std::size_t i = 0; i < lower.size(); ++i)
        if (lower[i] > upper[i]) throw InputError("ConvexSet::box: lower > upper");
    ConvexSet s;
    s.kind_ = SetKind::Box;
    s.lower_ = std::move(lower);
    s.upper_ = std::move(upper);
    return s;
}

void ConvexSet::project_inplace(VecD& x) const {
    switch (kind_) {
        case SetKind::Unconstrained:
            return;
        case SetKind::Ball: {
            if (x.size() != center_.size())
                throw InputError("ConvexSet::project: dimension mismatch");
            const double n = distance2(x, center_);
            if (n <= radius_) return;
            double s = radius_ / n;
            // Rescale until the rounded result is inside the ball, so a second
            // projection is a bitwise no-op.
            for (;;) {
                VecD y(x.size());
                for (std::size_t i = 0; i < x.size(); ++i)
                    y[i] = center_[i] + (x[i] - center_[i]) * s;
                if (distance2(y, center_) <= radius_) {
                    x = std::move(y);
                    return;
                }
                s = std::nextafter(s, 0.0);
            }
        }
        case SetKind::Box: {
            if (x.size() != lower_.size())
                throw InputError("ConvexSet::project: dimension mismatch");
            for (std::size_t i = 0; i < x.size(); ++i)
                x[i] = std::clamp(x[i], lower_[i], upper_[i]);
            return;
        }
    }
}

VecD ConvexSet::project(const VecD& x) const {
    require_finite(x, "ConvexSet::project");
    VecD y = x;
    project_inplace(y);
    return y;
}

bool ConvexSet::contains(const VecD& x) const { return project(x) == x; }

}  // namespace cliptail
