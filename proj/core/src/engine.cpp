#include "cliptail/engine.hpp"

#include <chrono>
#include <cmath>

#include "cliptail/clipping.hpp"
#include "cliptail/rng.hpp"

namespace cliptail {

RunResult run(const OracleSpec& spec, const RunConfig& cfg) {
    const std::size_t d = spec.dim();
    if (cfg.init.size() != d) throw InputError("run: init dimension mismatch");
    if (cfg.T != cfg.plan.T) throw InputError("run: cfg.T does not match plan.T");
    if (!(cfg.plan.clip_level > 0.0)) throw InputError("run: plan has no clip level");
    require_finite(cfg.init, "run");

    const auto t0 = std::chrono::steady_clock::now();
    Rng gen(cfg.seed, cfg.stream);

    RunResult res;
    VecD x = cfg.domain.project(cfg.init);
    VecD avg_sum = zeros(d);
    GradSample gs;
    const double gamma = cfg.plan.clip_level;

    if (cfg.record_trajectory != TrajectoryMode::None) res.trajectory.reserve(cfg.T);

    for (std::size_t t = 1; t <= cfg.T; ++t) {
        for (std::size_t i = 0; i < d; ++i) avg_sum[i] += x[i];

        spec.sample_gradient(x, gen, gs);
        const double gnorm = robust_norm2(gs.grad);
        const bool clipped = gnorm > gamma;

        StepRecord rec;
        if (cfg.record_trajectory != TrajectoryMode::None) {
            rec.t = t;
            rec.grad_norm = gnorm;
            rec.clipped = clipped;
            if (cfg.record_trajectory == TrajectoryMode::Full) {
                rec.grad = gs.grad;
                rec.iterate = x;  // x_t, the iterate the gradient was sampled at
            }
        }

        if (clipped) {
            ++res.clip_events;
            clip_inplace(gs.grad, gamma);
        }
        const double eta = cfg.plan.step_size(t);
        for (std::size_t i = 0; i < d; ++i) x[i] -= eta * gs.grad[i];
        cfg.domain.project_inplace(x);

        bool finite = true;
        for (double v : x)
            if (!std::isfinite(v)) {
                finite = false;
                break;
            }

        if (cfg.record_trajectory != TrajectoryMode::None) {
            rec.step_size = eta;
            res.trajectory.push_back(std::move(rec));
        }
        if (!finite) {
            res.aborted = true;
            res.abort_step = t;
            break;
        }
    }

    res.last = std::move(x);
    res.average = std::move(avg_sum);
    scale(res.average, 1.0 / static_cast<double>(cfg.T));
    res.wall_time_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

namespace {

// Pairwise reduction over [lo, hi): deterministic summation order.
VecD pairwise_sum(std::span<const VecD> xs, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return xs[lo];
    const std::size_t mid = lo + (hi - lo) / 2;
    VecD left = pairwise_sum(xs, lo, mid);
    const VecD right = pairwise_sum(xs, mid, hi);
    for (std::size_t i = 0; i < left.size(); ++i) left[i] += right[i];
    return left;
}

}  // namespace

VecD average_of(std::span<const VecD> trajectory) {
    if (trajectory.empty()) throw InputError("average_of: empty trajectory");
    VecD s = pairwise_sum(trajectory, 0, trajectory.size());
    scale(s, 1.0 / static_cast<double>(trajectory.size()));
    return s;
}

VecD average_of(const std::vector<StepRecord>& trajectory) {
    if (trajectory.empty()) throw InputError("average_of: empty trajectory");
    std::vector<VecD> xs;
    xs.reserve(trajectory.size());
    for (const auto& r : trajectory) {
        if (r.iterate.empty())
            throw InputError("average_of: trajectory has no recorded iterates");
        xs.push_back(r.iterate);
    }
    return average_of(std::span<const VecD>(xs));
}

}  // namespace cliptail
