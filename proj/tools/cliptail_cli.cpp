// Command line front end: seeded single runs, Monte-Carlo benchmarks,
// concentration-lab sweeps, clipped-moment checks and rate curves, all driven
// by flat key=value config files.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cliptail/clipping.hpp"
#include "cliptail/concentration.hpp"
#include "cliptail/config.hpp"
#include "cliptail/engine.hpp"
#include "cliptail/harness.hpp"

using namespace cliptail;

namespace {

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format = "csv";
    std::optional<std::size_t> trials;
    int threads = 1;
    bool strict = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool needs_config = true) {
    auto* opt = cmd->add_option("--config", flags.config_path, "config file (key=value sections)");
    if (needs_config) opt->required();
    cmd->add_option("--seed", flags.seed, "override the base seed");
    cmd->add_option("--out", flags.out, "output path (stdout when omitted)");
    cmd->add_option("--format", flags.format, "csv | json | plotdata")
        ->check(CLI::IsMember({"csv", "json", "plotdata"}));
    cmd->add_option("--threads", flags.threads, "trial fan-out workers");
    cmd->add_option("--trials", flags.trials, "override the trial count");
    cmd->add_flag("--strict", flags.strict, "exit 3 when any trial aborts");
}

void write_out(const std::string& body, const std::string& path) {
    if (path.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path);
    f << body;
    if (!f) throw IoError("write failed for " + path);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int cmd_estimate(const CommonFlags& flags) {
    const Config cfg = Config::parse_file(flags.config_path);
    Experiment e = experiment_from_config(cfg);
    if (flags.seed) e.base_seed = *flags.seed;
    const std::size_t T =
        cfg.has("estimate", "T") ? cfg.get_size("estimate", "T") : e.T_grid.front();

    RunConfig rc;
    rc.init = e.init.empty() ? zeros(e.oracle.dim()) : e.init;
    rc.plan = e.plan_source.resolve(T);
    rc.domain = e.domain;
    rc.T = T;
    rc.seed = e.base_seed;
    const RunResult res = run(e.oracle, rc);
    if (res.aborted) {
        std::cerr << "run aborted at step " << res.abort_step << "\n";
        return flags.strict ? 3 : 1;
    }
    const VecD& est = rc.plan.output == OutputMode::LastIterate ? res.last : res.average;

    std::ostringstream os;
    os << "# single run: T=" << T << " seed=" << e.base_seed
       << " clip_events=" << res.clip_events << "\n";
    os << "estimate =";
    for (double v : est) os << ' ' << fmt(v);
    os << "\n";
    os << "param_error = " << fmt(distance2(est, e.oracle.optimum())) << "\n";
    write_out(os.str(), flags.out);
    return 0;
}

int cmd_bench(const CommonFlags& flags) {
    const Config cfg = Config::parse_file(flags.config_path);
    Experiment e = experiment_from_config(cfg);
    if (flags.seed) e.base_seed = *flags.seed;
    if (flags.trials) e.trials = *flags.trials;
    if (flags.threads > 1) e.threads = flags.threads;

    const TrialReport report = run_experiment(e);
    write_out(emit_string(report, emit_format_from_name(flags.format)), flags.out);
    if (!e.baselines.empty() && !flags.out.empty())
        std::cout << comparison_from_report(report, e.baselines).render();
    if (flags.strict && report.aborted_runs > 0) {
        std::cerr << report.aborted_runs << " aborted trial(s)\n";
        return 3;
    }
    return 0;
}

int cmd_conc_check(const CommonFlags& flags) {
    const Config cfg = Config::parse_file(flags.config_path);
    const std::string section = "conc";
    const auto kinds = cfg.get_names(section, "kinds");
    const auto t_grid = cfg.get_sizes(section, "T_grid");
    const auto d_grid = cfg.get_sizes(section, "d_grid");
    const auto deltas = cfg.get_doubles(section, "deltas");
    const auto cm_grid = cfg.get_doubles(section, "cm_grid");
    std::size_t trials = cfg.get_size_or(section, "trials", 10000);
    if (flags.trials) trials = *flags.trials;
    const std::size_t pilot_n = cfg.get_size_or(section, "pilot_n", 100000);
    const double nu = cfg.get_double_or(section, "nu", 3.0);
    const KForm kform =
        cfg.get_or(section, "kform", "loglog") == "capped" ? KForm::CappedLog : KForm::LogLog;
    const std::uint64_t seed =
        flags.seed ? *flags.seed : cfg.get_u64_or(section, "seed", 0);
    const std::string checks = cfg.get_or(section, "check", "both");
    const bool run_sup = checks == "both" || checks == "supnorm";
    const bool run_quad = checks == "both" || checks == "quadvar";

    std::ostringstream os;
    os << "experiment_id,bound_kind,C_M,T,d,delta,violation_rate,stderr,trials\n";
    for (const auto& kind : kinds) {
        for (std::size_t T : t_grid) {
            for (std::size_t d : d_grid) {
                for (double delta : deltas) {
                    DistHandle inc;
                    if (kind == "gaussian") {
                        inc = DistHandle::gaussian(CovModel::identity(d));
                    } else if (kind == "student_t") {
                        inc = DistHandle::student_t(nu, CovModel::identity(d));
                    } else {
                        throw ConfigError("conc: unknown increment kind " + kind);
                    }
                    const double clip_level = gamma_for_refined(
                        static_cast<double>(d), 1.0, T, d, delta, 1.0, kform);
                    Rng pilot(seed ^ 0x70696c6fULL, 1000 * T + d);
                    const MartingaleSpec spec =
                        make_martingale_spec(inc, clip_level, T, pilot_n, pilot);
                    const auto stats = simulate_lab_trials(spec, trials, {delta},
                                                           seed ^ (T * 131 + d));
                    const std::string id = "conc:" + kind + ":T" + std::to_string(T) +
                                           ":d" + std::to_string(d);
                    auto emit_row = [&](const std::string& bound_kind, double cm,
                                        std::size_t violations) {
                        const double rate =
                            static_cast<double>(violations) / static_cast<double>(trials);
                        const double se =
                            std::sqrt(rate * (1.0 - rate) / static_cast<double>(trials));
                        os << id << ',' << bound_kind << ',' << fmt(cm) << ',' << T << ','
                           << d << ',' << fmt(delta) << ',' << fmt(rate) << ',' << fmt(se)
                           << ',' << trials << "\n";
                    };
                    if (run_sup) {
                        for (double cm : cm_grid) {
                            const double bound =
                                refined_bound(spec.q_bar, spec.p_bar, 2.0 * spec.gamma_sim,
                                              T, delta, d, cm, kform);
                            std::size_t viol = 0;
                            for (const auto& s : stats)
                                if (s.sup_norm >= bound) ++viol;
                            emit_row("refined_supnorm", cm, viol);
                        }
                        const double fb = freedman_bound(spec.q_bar, 2.0 * spec.gamma_sim,
                                                         T, delta, d);
                        std::size_t viol = 0;
                        for (const auto& s : stats)
                            if (s.sup_norm >= fb) ++viol;
                        emit_row("freedman_supnorm", 1.0, viol);
                    }
                    if (run_quad) {
                        for (double cm : cm_grid) {
                            std::size_t viol = 0;
                            for (const auto& s : stats)
                                if (s.quad_ratio[0] > cm) ++viol;
                            emit_row("quadvar", cm, viol);
                        }
                    }
                }
            }
        }
    }
    write_out(os.str(), flags.out);
    return 0;
}

int cmd_moments_check(const CommonFlags& flags) {
    const Config cfg = Config::parse_file(flags.config_path);
    const std::string section = "moments";
    const std::size_t dim = cfg.get_size(section, "dim");
    const DistHandle base = dist_from_config(cfg, section, "dist", dim);
    const auto mean_norms = cfg.get_doubles(section, "mean_norms");
    const auto gammas = cfg.get_doubles(section, "gammas");
    std::size_t n = cfg.get_size_or(section, "n", 1000000);
    if (flags.trials) n = *flags.trials;
    const std::uint64_t seed = flags.seed ? *flags.seed : cfg.get_u64_or(section, "seed", 0);

    std::ostringstream os;
    os << "mean_norm,gamma,n,bias_emp,bias_bound,bias_stderr,bias_ok,"
          "trace_emp,trace_bound,trace_stderr,trace_ok,opnorm_emp,opnorm_bound\n";
    std::uint64_t stream = 0;
    for (double mn : mean_norms) {
        VecD offset = zeros(dim);
        offset[0] = mn;  // shift along the first axis; bounds depend on ||m|| only
        const DistHandle shifted = base.shifted(offset);
        for (double gamma : gammas) {
            Rng gen(seed, stream++);
            const auto est = empirical_clipped_moments(shifted, gamma, n, gen);
            const auto bounds = clipped_cov_bounds(mn, base.true_cov(), gamma);
            VecD bias = est.mean;
            bias[0] -= mn;
            const double bias_emp = norm2(bias);
            const bool bias_ok = bias_emp <= bounds.bias_bound + 5.0 * est.mean_stderr;
            const bool trace_ok = est.trace <= bounds.trace_bound + 5.0 * est.trace_stderr;
            os << fmt(mn) << ',' << fmt(gamma) << ',' << n << ',' << fmt(bias_emp) << ','
               << fmt(bounds.bias_bound) << ',' << fmt(est.mean_stderr) << ','
               << (bias_ok ? 1 : 0) << ',' << fmt(est.trace) << ',' << fmt(bounds.trace_bound)
               << ',' << fmt(est.trace_stderr) << ',' << (trace_ok ? 1 : 0) << ','
               << fmt(est.opnorm_estimate) << ',' << fmt(bounds.opnorm_bound) << "\n";
        }
    }
    write_out(os.str(), flags.out);
    return 0;
}

int cmd_rate(const CommonFlags& flags) {
    const Config cfg = Config::parse_file(flags.config_path);
    const Experiment e = experiment_from_config(cfg);
    const auto curve = rate_curve(e.plan_source.regime, e.plan_source.params, e.T_grid);
    std::ostringstream os;
    if (flags.format == "plotdata") {
        os << "# series regime=" << regime_name(e.plan_source.regime)
           << " value=predicted_error\n";
        for (const auto& [T, v] : curve) os << T << ' ' << fmt(v) << "\n";
    } else {
        os << "T,predicted_error\n";
        for (const auto& [T, v] : curve) os << T << ',' << fmt(v) << "\n";
    }
    write_out(os.str(), flags.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"streaming heavy-tailed estimation with clipped projected SGD"};
    app.require_subcommand(1);

    CommonFlags estimate_flags, bench_flags, conc_flags, moments_flags, rate_flags;
    auto* estimate = app.add_subcommand("estimate", "single seeded run; prints the estimate");
    add_common(estimate, estimate_flags);
    auto* bench = app.add_subcommand("bench", "Monte-Carlo benchmark from a config file");
    add_common(bench, bench_flags);
    auto* conc = app.add_subcommand("conc-check", "concentration-lab violation sweep");
    add_common(conc, conc_flags);
    auto* moments = app.add_subcommand("moments-check", "clipped-moment bound check");
    add_common(moments, moments_flags);
    auto* rate = app.add_subcommand("rate", "predicted rate curve per horizon");
    add_common(rate, rate_flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (estimate->parsed()) return cmd_estimate(estimate_flags);
        if (bench->parsed()) return cmd_bench(bench_flags);
        if (conc->parsed()) return cmd_conc_check(conc_flags);
        if (moments->parsed()) return cmd_moments_check(moments_flags);
        if (rate->parsed()) return cmd_rate(rate_flags);
    } catch (const ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return 2;
    } catch (const InputError& err) {
        // Bad parameter values reaching the library from a config file are
        // config errors from the driver's point of view.
        std::cerr << "config error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
