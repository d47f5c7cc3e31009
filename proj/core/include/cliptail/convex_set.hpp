#pragma once

#include <cstddef>

#include "cliptail/vec.hpp"

namespace cliptail {

enum class SetKind { Unconstrained, Ball, Box };

/// Projection domain: all of R^d, a Euclidean ball, or an axis-aligned box.
class ConvexSet {
  public:
    static ConvexSet unconstrained();
    static ConvexSet ball(VecD center, double radius);
    static ConvexSet box(VecD lower, VecD upper);

    SetKind kind() const { return kind_; }

    /// Nearest point of the set in Euclidean norm. Idempotent (bitwise) and
    /// nonexpansive. Unconstrained sets return x unchanged.
    VecD project(const VecD& x) const;
    void project_inplace(VecD& x) const;

    /// Membership in the projection fixed-point sense: project(x) == x.
    bool contains(const VecD& x) const;

  private:
    ConvexSet() = default;
    SetKind kind_ = SetKind::Unconstrained;
    VecD center_, lower_, upper_;
    double radius_ = 0.0;
};

inline VecD project(const ConvexSet& set, const VecD& x) { return set.project(x); }

}  // namespace cliptail
