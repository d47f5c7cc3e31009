#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cliptail/convex_set.hpp"
#include "cliptail/oracles.hpp"
#include "cliptail/schedule.hpp"
#include "cliptail/vec.hpp"

namespace cliptail {

enum class TrajectoryMode { None, ErrorsOnly, Full };

struct RunConfig {
    VecD init;  // x_1, projected onto the domain if outside
    ParamPlan plan;
    ConvexSet domain = ConvexSet::unconstrained();
    std::size_t T = 0;  // must match plan.T
    TrajectoryMode record_trajectory = TrajectoryMode::None;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

struct StepRecord {
    std::size_t t = 0;  // one-based
    double grad_norm = 0.0;
    double step_size = 0.0;
    bool clipped = false;
    VecD grad;     // Full mode only: the raw sampled gradient
    VecD iterate;  // Full mode only: x_t, where the gradient was sampled
};

struct RunResult {
    VecD last;     // x_{T+1}
    VecD average;  // (1/T) sum_{t=1}^T x_t
    std::size_t clip_events = 0;
    std::vector<StepRecord> trajectory;
    bool aborted = false;       // non-finite iterate encountered
    std::size_t abort_step = 0; // one-based step at which the abort happened
    double wall_time_sec = 0.0;
};

/// Clipped projected SGD: x_{t+1} = project(x_t - eta_t clip(g_t)) for
/// exactly T steps, one fresh sample per step. Returns both the last iterate
/// and the running average (maintained in one pass). A non-finite iterate
/// aborts the run with the step index; it signals a mis-set clip level or
/// step size, not a crash. On abort, `last` holds the offending iterate and
/// `average` the partial sum over completed steps divided by T; both are
/// diagnostic only.
RunResult run(const OracleSpec& spec, const RunConfig& cfg);

/// Arithmetic mean of a trajectory by pairwise summation (fixed order).
VecD average_of(std::span<const VecD> trajectory);
VecD average_of(const std::vector<StepRecord>& trajectory);

}  // namespace cliptail
