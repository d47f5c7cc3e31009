#include <benchmark/benchmark.h>

#include "cliptail/clipping.hpp"
#include "cliptail/engine.hpp"
#include "cliptail/harness.hpp"

using namespace cliptail;

namespace {

void BM_NormalDraw(benchmark::State& state) {
    Rng gen(1, 0);
    double acc = 0.0;
    for (auto _ : state) acc += gen.normal();
    benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_NormalDraw);

void BM_StudentTDraw(benchmark::State& state) {
    const std::size_t d = state.range(0);
    const auto h = DistHandle::student_t(3.0, CovModel::identity(d));
    Rng gen(2, 0);
    VecD out(d);
    for (auto _ : state) {
        h.draw(gen, out);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_StudentTDraw)->Arg(2)->Arg(10)->Arg(100);

void BM_ParetoRadialDraw(benchmark::State& state) {
    const std::size_t d = state.range(0);
    const auto h = DistHandle::pareto_radial(2.5, CovModel::identity(d));
    Rng gen(3, 0);
    VecD out(d);
    for (auto _ : state) {
        h.draw(gen, out);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_ParetoRadialDraw)->Arg(10);

void BM_Clip(benchmark::State& state) {
    const std::size_t d = state.range(0);
    Rng gen(4, 0);
    VecD v(d);
    for (auto& x : v) x = 3.0 * gen.normal();
    VecD w = v;
    for (auto _ : state) {
        w = v;
        clip_inplace(w, 1.5);
        benchmark::DoNotOptimize(w.data());
    }
}
BENCHMARK(BM_Clip)->Arg(10)->Arg(100);

void BM_EngineMeanEstStep(benchmark::State& state) {
    // Cost per SGD step, amortized over a T=1000 run.
    const std::size_t d = state.range(0), T = 1000;
    const auto spec = OracleSpec::mean_estimation(
        zeros(d), DistHandle::student_t(3.0, CovModel::identity(d)));
    ProblemParams p = spec.derived_constants();
    p.D1 = 1.0;
    p.T = T;
    p.delta = 0.01;
    RunConfig cfg;
    cfg.init = zeros(d);
    cfg.plan = plan_strongly_convex(p);
    cfg.T = T;
    std::uint64_t seed = 0;
    for (auto _ : state) {
        cfg.seed = seed++;
        const RunResult r = run(spec, cfg);
        benchmark::DoNotOptimize(r.last.data());
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * T);
}
BENCHMARK(BM_EngineMeanEstStep)->Arg(10)->Arg(50);

void BM_EmpiricalQuantile(benchmark::State& state) {
    Rng gen(5, 0);
    std::vector<double> errors(state.range(0));
    for (auto& e : errors) e = std::fabs(gen.normal());
    for (auto _ : state) {
        benchmark::DoNotOptimize(empirical_quantile(errors, 0.999));
    }
}
BENCHMARK(BM_EmpiricalQuantile)->Arg(2000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
