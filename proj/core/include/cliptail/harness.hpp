#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cliptail/engine.hpp"
#include "cliptail/oracles.hpp"
#include "cliptail/schedule.hpp"

namespace cliptail {

enum class Baseline { VanillaSgd, BatchMean, BatchOls };
enum class Metric { ParamError, Gap };
enum class EmitFormat { Csv, Json, PlotData };

const char* baseline_name(Baseline b);
const char* metric_name(Metric m);
EmitFormat emit_format_from_name(const std::string& name);

/// Where the run parameters come from: a schedule regime resolved per grid
/// horizon, or an explicit plan (single-horizon grids only).
struct PlanSource {
    std::optional<ParamPlan> explicit_plan;
    Regime regime = Regime::StrCvx;
    ProblemParams params;  // T is overwritten by the grid horizon
    double c_gamma = 1.0;
    double c_m = 1.0;
    double c_const = 1.0;
    std::optional<double> eta;

    ParamPlan resolve(std::size_t T) const;
};

struct Experiment {
    std::string name = "experiment";
    OracleSpec oracle;
    PlanSource plan_source;
    std::vector<Baseline> baselines;
    std::size_t trials = 100;
    std::vector<double> deltas = {0.05};
    std::vector<std::size_t> T_grid = {1000};
    Metric metric = Metric::ParamError;
    std::size_t gap_mc_n = 20000;  // Gap metric on LogReg/LAD only
    std::uint64_t base_seed = 0;
    int threads = 1;
    ConvexSet domain = ConvexSet::unconstrained();
    VecD init;  // x_1; zeros when empty
};

struct TrialRecord {
    std::uint64_t seed = 0;
    std::size_t T = 0;
    std::string method;
    std::size_t trial_index = 0;
    double error = 0.0;  // +infinity for aborted runs
    std::size_t clip_events = 0;
    bool aborted = false;
};

struct AggregateRow {
    std::string method;
    std::size_t T = 0;
    double delta = 0.0;
    std::size_t trials = 0;
    double quantile = 0.0;  // empirical (1-delta)-quantile
    double median = 0.0;
    double mean = 0.0;
    double clip_events_mean = 0.0;
};

struct TrialReport {
    std::string experiment;
    std::uint64_t base_seed = 0;
    std::vector<std::pair<std::string, std::string>> plan_kv;  // plan at the largest T
    std::vector<std::pair<std::string, std::string>> oracle_kv;
    std::vector<TrialRecord> per_trial;
    std::vector<AggregateRow> aggregates;
    std::size_t aborted_runs = 0;
};

/// Derived per-trial seed: base_seed xor hash(T, method, trial_index).
std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t T, const std::string& method,
                         std::size_t trial_index);

/// Runs trials x methods x horizons, one derived seed per run; aborted runs
/// enter the report with error = +infinity. The aggregation is a
/// deterministic fold over records sorted by (method, T, trial_index),
/// independent of worker scheduling.
TrialReport run_experiment(const Experiment& e);

/// k-th order statistic with k = ceil(level * n); conservative, no
/// interpolation.
double empirical_quantile(std::vector<double> errors, double level);

/// Leading-order predicted error per horizon with the hidden constant set to
/// one; curve shape is the claim, not the level.
std::vector<std::pair<std::size_t, double>> rate_curve(Regime regime, ProblemParams params,
                                                       const std::vector<std::size_t>& T_grid);

struct ComparisonRow {
    std::size_t T = 0;
    double delta = 0.0;
    std::string baseline;
    double clipped_quantile = 0.0;
    double baseline_quantile = 0.0;
    double clipped_median = 0.0;
    double baseline_median = 0.0;
    double quantile_ratio = 0.0;  // clipped / baseline
    double median_ratio = 0.0;
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;
    std::string render() const;
};

ComparisonTable compare_baselines(const Experiment& e);
ComparisonTable comparison_from_report(const TrialReport& report,
                                       const std::vector<Baseline>& baselines);

/// Serialization. CSV columns exactly:
/// experiment,method,T,delta,trials,quantile,median,mean,clip_events_mean,seed
std::string emit_string(const TrialReport& report, EmitFormat format);
void emit(const TrialReport& report, EmitFormat format, const std::string& path);

/// Parses emitted CSV back into aggregate rows (round-trip checks).
std::vector<AggregateRow> parse_csv_aggregates(const std::string& csv);

}  // namespace cliptail
