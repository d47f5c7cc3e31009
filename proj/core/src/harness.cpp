#include "cliptail/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "cliptail/clipping.hpp"
#include "cliptail/rng.hpp"

namespace cliptail {

const char* baseline_name(Baseline b) {
    switch (b) {
        case Baseline::VanillaSgd: return "vanilla_sgd";
        case Baseline::BatchMean: return "batch_mean";
        case Baseline::BatchOls: return "batch_ols";
    }
    return "?";
}

const char* metric_name(Metric m) {
    return m == Metric::ParamError ? "param_error" : "gap";
}

EmitFormat emit_format_from_name(const std::string& name) {
    if (name == "csv") return EmitFormat::Csv;
    if (name == "json") return EmitFormat::Json;
    if (name == "plotdata") return EmitFormat::PlotData;
    throw ConfigError("unknown format: " + name);
}

ParamPlan PlanSource::resolve(std::size_t T) const {
    if (explicit_plan.has_value()) {
        if (explicit_plan->T != T)
            throw ConfigError("explicit plan horizon does not match the grid");
        return *explicit_plan;
    }
    ProblemParams p = params;
    p.T = T;
    return resolve_plan(regime, p, c_gamma, c_m, c_const, eta);
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t T, const std::string& method,
                         std::size_t trial_index) {
    // FNV-1a over the method name, then splitmix-style mixing of T and index.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : method) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    auto mix = [](std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    h = mix(h + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(T) + 1));
    h = mix(h ^ (0xd1b54a32d192ed03ULL * (static_cast<std::uint64_t>(trial_index) + 1)));
    return base_seed ^ h;
}

namespace {

constexpr double kClipDisabled = 1e300;

void validate(const Experiment& e) {
    if (e.trials < 1) throw ConfigError("experiment: trials must be >= 1");
    if (e.T_grid.empty()) throw ConfigError("experiment: empty T_grid");
    if (!std::is_sorted(e.T_grid.begin(), e.T_grid.end()))
        throw ConfigError("experiment: T_grid must be sorted ascending");
    if (e.deltas.empty()) throw ConfigError("experiment: at least one delta required");
    double dmin = 1.0;
    for (double d : e.deltas) {
        if (!(d > 0.0) || !(d <= 0.5))
            throw ConfigError("experiment: deltas must lie in (0, 1/2]");
        dmin = std::min(dmin, d);
    }
    // Below 10/delta trials the (1-delta)-quantile is the sample max.
    // trials = 1 is the degenerate single-run mode (quantile, median and
    // mean all collapse to the one value) and is exempt.
    if (e.trials > 1 && static_cast<double>(e.trials) < 10.0 / dmin)
        throw ConfigError("experiment: trials below the 10/delta floor for delta=" +
                          std::to_string(dmin));
    for (Baseline b : e.baselines) {
        if (b == Baseline::BatchMean && e.oracle.kind() != OracleKind::MeanEst)
            throw ConfigError("batch_mean baseline applies to mean estimation only");
        if (b == Baseline::BatchOls && e.oracle.kind() != OracleKind::LinReg)
            throw ConfigError("batch_ols baseline applies to linear regression only");
    }
    if (e.metric == Metric::Gap &&
        (e.oracle.kind() == OracleKind::LogReg || e.oracle.kind() == OracleKind::Lad) &&
        e.gap_mc_n < 2)
        throw ConfigError("experiment: gap metric needs gap_mc_n >= 2");
}

VecD initial_point(const Experiment& e) {
    if (e.init.empty()) return zeros(e.oracle.dim());
    if (e.init.size() != e.oracle.dim())
        throw ConfigError("experiment: init dimension does not match the oracle");
    return e.init;
}

double metric_value(const Experiment& e, const VecD& estimate, std::uint64_t seed) {
    if (!all_finite(estimate)) return std::numeric_limits<double>::infinity();
    if (e.metric == Metric::ParamError) return distance2(estimate, e.oracle.optimum());
    Rng gen(seed, 0x6761703aULL);  // gap stream, separate from the run stream
    return e.oracle.population_gap(estimate, e.gap_mc_n, gen).gap;
}

// Solve (L L^T) theta = b given the Cholesky factor of a normal matrix.
VecD cholesky_solve(const Matrix& l, VecD b) {
    const std::size_t d = l.size();
    for (std::size_t i = 0; i < d; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l[i][k] * b[k];
        if (l[i][i] == 0.0) throw NumericError("batch_ols: singular normal matrix", 0.0);
        b[i] = s / l[i][i];
    }
    for (std::size_t ii = d; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t k = ii + 1; k < d; ++k) s -= l[k][ii] * b[k];
        b[ii] = s / l[ii][ii];
    }
    return b;
}

TrialRecord run_one(const Experiment& e, const std::string& method, const ParamPlan& plan,
                    std::size_t T, std::size_t trial) {
    TrialRecord rec;
    rec.T = T;
    rec.method = method;
    rec.trial_index = trial;
    rec.seed = trial_seed(e.base_seed, T, method, trial);

    if (method == "batch_mean") {
        const std::size_t d = e.oracle.dim();
        Rng gen(rec.seed, 0);
        VecD sum = zeros(d), xi;
        for (std::size_t t = 0; t < T; ++t) {
            e.oracle.covariate().draw(gen, xi);
            for (std::size_t i = 0; i < d; ++i) sum[i] += e.oracle.optimum()[i] + xi[i];
        }
        scale(sum, 1.0 / static_cast<double>(T));
        rec.error = metric_value(e, sum, rec.seed);
        rec.aborted = !std::isfinite(rec.error);
        return rec;
    }
    if (method == "batch_ols") {
        const std::size_t d = e.oracle.dim();
        Rng gen(rec.seed, 0);
        Matrix a(d, VecD(d, 0.0));
        VecD b = zeros(d);
        GradSample gs;
        const VecD origin = zeros(d);
        for (std::size_t t = 0; t < T; ++t) {
            e.oracle.sample_gradient(origin, gen, gs);  // draws (x, y)
            for (std::size_t i = 0; i < d; ++i) {
                b[i] += gs.raw_x[i] * gs.raw_y;
                for (std::size_t j = 0; j <= i; ++j) a[i][j] += gs.raw_x[i] * gs.raw_x[j];
            }
        }
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i + 1; j < d; ++j) a[i][j] = a[j][i];
        try {
            const CovModel normal_matrix = CovModel::full(a);
            const VecD theta = cholesky_solve(spd_factor(normal_matrix), std::move(b));
            rec.error = metric_value(e, theta, rec.seed);
        } catch (const NumericError&) {
            rec.error = std::numeric_limits<double>::infinity();
        }
        rec.aborted = !std::isfinite(rec.error);
        return rec;
    }

    // Engine-backed methods: clipped_sgd, or vanilla_sgd with clipping
    // disabled via an astronomically large level.
    RunConfig cfg;
    cfg.init = initial_point(e);
    cfg.plan = plan;
    if (method == "vanilla_sgd") cfg.plan.clip_level = kClipDisabled;
    cfg.domain = e.domain;
    cfg.T = T;
    cfg.seed = rec.seed;
    const RunResult r = cliptail::run(e.oracle, cfg);
    rec.clip_events = r.clip_events;
    if (r.aborted) {
        rec.aborted = true;
        rec.error = std::numeric_limits<double>::infinity();
        return rec;
    }
    const VecD& estimate =
        (plan.output == OutputMode::LastIterate) ? r.last : r.average;
    rec.error = metric_value(e, estimate, rec.seed);
    rec.aborted = !std::isfinite(rec.error);
    return rec;
}

}  // namespace

double empirical_quantile(std::vector<double> errors, double level) {
    if (errors.empty()) throw InputError("empirical_quantile: empty list");
    if (!(level > 0.0) || !(level < 1.0))
        throw InputError("empirical_quantile: level must lie in (0, 1)");
    const std::size_t n = errors.size();
    std::size_t k = static_cast<std::size_t>(
        std::ceil(level * static_cast<double>(n)));
    k = std::max<std::size_t>(1, std::min(k, n));
    std::nth_element(errors.begin(), errors.begin() + (k - 1), errors.end());
    return errors[k - 1];
}

TrialReport run_experiment(const Experiment& e) {
    validate(e);
    TrialReport report;
    report.experiment = e.name;
    report.base_seed = e.base_seed;
    report.oracle_kv = e.oracle.to_kv();

    std::vector<std::string> methods = {"clipped_sgd"};
    for (Baseline b : e.baselines) methods.emplace_back(baseline_name(b));

    for (std::size_t T : e.T_grid) {
        const ParamPlan plan = e.plan_source.resolve(T);
        report.plan_kv = plan.to_kv();
        for (const auto& method : methods) {
            std::vector<TrialRecord> block(e.trials);
            const int workers =
                std::max(1, std::min<int>(e.threads, static_cast<int>(e.trials)));
            if (workers == 1) {
                for (std::size_t i = 0; i < e.trials; ++i)
                    block[i] = run_one(e, method, plan, T, i);
            } else {
                std::atomic<std::size_t> next{0};
                auto worker = [&]() {
                    for (;;) {
                        const std::size_t i = next.fetch_add(1);
                        if (i >= e.trials) return;
                        block[i] = run_one(e, method, plan, T, i);
                    }
                };
                std::vector<std::thread> pool;
                pool.reserve(workers);
                for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
                for (auto& th : pool) th.join();
            }

            std::vector<double> errors(e.trials);
            double clip_sum = 0.0;
            for (std::size_t i = 0; i < e.trials; ++i) {
                errors[i] = block[i].error;
                clip_sum += static_cast<double>(block[i].clip_events);
                if (block[i].aborted) ++report.aborted_runs;
            }
            const double clip_mean = clip_sum / static_cast<double>(e.trials);
            double err_mean = 0.0;
            for (double v : errors) err_mean += v;
            err_mean /= static_cast<double>(e.trials);
            const double median = empirical_quantile(errors, 0.5);

            for (double delta : e.deltas) {
                AggregateRow row;
                row.method = method;
                row.T = T;
                row.delta = delta;
                row.trials = e.trials;
                row.quantile = empirical_quantile(errors, 1.0 - delta);
                row.median = median;
                row.mean = err_mean;
                row.clip_events_mean = clip_mean;
                report.aggregates.push_back(std::move(row));
            }
            report.per_trial.insert(report.per_trial.end(),
                                    std::make_move_iterator(block.begin()),
                                    std::make_move_iterator(block.end()));
        }
    }
    return report;
}

std::vector<std::pair<std::size_t, double>> rate_curve(
    Regime regime, ProblemParams params, const std::vector<std::size_t>& T_grid) {
    std::vector<std::pair<std::size_t, double>> out;
    out.reserve(T_grid.size());
    for (std::size_t T : T_grid) {
        ProblemParams p = params;
        p.T = T;
        const double ell = log_term(T, p.delta);
        const double t_d = static_cast<double>(T);
        double pred = 0.0;
        switch (regime) {
            case Regime::StrCvx: {
                const ParamPlan plan = plan_strongly_convex(p);
                const double tr = *p.cov_trace, op = *p.cov_opnorm, mu = *p.mu;
                pred = plan.gamma * p.D1 / (t_d + plan.gamma) +
                       1.0 / mu *
                           std::sqrt((tr + std::sqrt(tr * op) * ell) / (t_d + plan.gamma));
                break;
            }
            case Regime::StrCvxQG: {
                const ParamPlan plan = plan_qg(p);
                const double mu = *p.mu;
                pred = plan.gamma * p.D1 / (t_d + plan.gamma) +
                       1.0 / mu *
                           std::sqrt(*p.beta * (*p.d_eff + std::sqrt(*p.d_eff) * ell) /
                                     (t_d + plan.gamma));
                break;
            }
            case Regime::SmoothCvx: {
                if (!p.L || !p.cov_trace || !p.cov_opnorm)
                    throw InputError("rate_curve: smooth_cvx needs L and covariance bounds");
                const double tr = *p.cov_trace, op = *p.cov_opnorm;
                pred = p.D1 * std::sqrt((tr + std::sqrt(op) * (std::sqrt(tr) + *p.L * p.D1) *
                                                  ell) /
                                        t_d);
                break;
            }
            case Regime::LipCvx: {
                if (!p.G || !p.cov_trace || !p.cov_opnorm)
                    throw InputError("rate_curve: lip_cvx needs G and covariance bounds");
                const double tr = *p.cov_trace, op = *p.cov_opnorm;
                pred = p.D1 *
                       std::sqrt((tr + std::sqrt(op) * (std::sqrt(tr) + *p.G) * ell) / t_d);
                break;
            }
        }
        out.emplace_back(T, pred);
    }
    return out;
}

ComparisonTable comparison_from_report(const TrialReport& report,
                                       const std::vector<Baseline>& baselines) {
    auto find_row = [&](const std::string& method, std::size_t T,
                        double delta) -> const AggregateRow* {
        for (const auto& r : report.aggregates)
            if (r.method == method && r.T == T && r.delta == delta) return &r;
        return nullptr;
    };
    ComparisonTable table;
    for (const auto& row : report.aggregates) {
        if (row.method != "clipped_sgd") continue;
        for (Baseline b : baselines) {
            const AggregateRow* base = find_row(baseline_name(b), row.T, row.delta);
            if (base == nullptr) continue;
            ComparisonRow c;
            c.T = row.T;
            c.delta = row.delta;
            c.baseline = baseline_name(b);
            c.clipped_quantile = row.quantile;
            c.baseline_quantile = base->quantile;
            c.clipped_median = row.median;
            c.baseline_median = base->median;
            c.quantile_ratio =
                (base->quantile > 0.0) ? row.quantile / base->quantile
                                       : std::numeric_limits<double>::infinity();
            c.median_ratio = (base->median > 0.0)
                                 ? row.median / base->median
                                 : std::numeric_limits<double>::infinity();
            table.rows.push_back(std::move(c));
        }
    }
    return table;
}

ComparisonTable compare_baselines(const Experiment& e) {
    if (e.baselines.empty())
        throw ConfigError("compare_baselines: experiment declares no baselines");
    return comparison_from_report(run_experiment(e), e.baselines);
}

}  // namespace cliptail
