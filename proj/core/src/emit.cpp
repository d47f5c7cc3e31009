#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cliptail/harness.hpp"

namespace cliptail {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_string(const TrialReport& r) {
    std::ostringstream os;
    os << "# experiment=" << r.experiment << "\n";
    if (!r.oracle_kv.empty()) {
        os << "# oracle";
        for (const auto& [k, v] : r.oracle_kv) os << ' ' << k << '=' << v;
        os << "\n";
    }
    if (!r.plan_kv.empty()) {
        os << "# plan";
        for (const auto& [k, v] : r.plan_kv) os << ' ' << k << '=' << v;
        os << "\n";
    }
    os << "# aborted_runs=" << r.aborted_runs << "\n";
    os << "experiment,method,T,delta,trials,quantile,median,mean,clip_events_mean,seed\n";
    for (const auto& a : r.aggregates) {
        os << r.experiment << ',' << a.method << ',' << a.T << ',' << fmt(a.delta) << ','
           << a.trials << ',' << fmt(a.quantile) << ',' << fmt(a.median) << ','
           << fmt(a.mean) << ',' << fmt(a.clip_events_mean) << ',' << r.base_seed << "\n";
    }
    return os.str();
}

std::string json_string(const TrialReport& r) {
    nlohmann::json j;
    j["experiment"] = r.experiment;
    j["seed"] = r.base_seed;
    j["aborted_runs"] = r.aborted_runs;
    nlohmann::json plan = nlohmann::json::object();
    for (const auto& [k, v] : r.plan_kv) plan[k] = v;
    j["plan"] = plan;
    nlohmann::json oracle = nlohmann::json::object();
    for (const auto& [k, v] : r.oracle_kv) oracle[k] = v;
    j["oracle"] = oracle;
    j["rows"] = nlohmann::json::array();
    for (const auto& a : r.aggregates) {
        nlohmann::json row;
        row["experiment"] = r.experiment;
        row["method"] = a.method;
        row["T"] = a.T;
        row["delta"] = a.delta;
        row["trials"] = a.trials;
        row["quantile"] = a.quantile;
        row["median"] = a.median;
        row["mean"] = a.mean;
        row["clip_events_mean"] = a.clip_events_mean;
        row["seed"] = r.base_seed;
        j["rows"].push_back(std::move(row));
    }
    return j.dump(2) + "\n";
}

std::string plotdata_string(const TrialReport& r) {
    // One (T, value) block per (method, delta) series; rows come out of the
    // aggregation already sorted by T within a series.
    std::ostringstream os;
    os << "# experiment=" << r.experiment << "\n";
    std::vector<std::pair<std::string, double>> series;
    for (const auto& a : r.aggregates) {
        std::pair<std::string, double> key{a.method, a.delta};
        bool seen = false;
        for (const auto& s : series) seen = seen || s == key;
        if (!seen) series.push_back(key);
    }
    for (const auto& [method, delta] : series) {
        os << "\n# series method=" << method << " delta=" << fmt(delta)
           << " value=quantile\n";
        for (const auto& a : r.aggregates)
            if (a.method == method && a.delta == delta)
                os << a.T << ' ' << fmt(a.quantile) << "\n";
        os << "\n# series method=" << method << " delta=" << fmt(delta)
           << " value=median\n";
        for (const auto& a : r.aggregates)
            if (a.method == method && a.delta == delta)
                os << a.T << ' ' << fmt(a.median) << "\n";
    }
    return os.str();
}

}  // namespace

std::string emit_string(const TrialReport& report, EmitFormat format) {
    if (report.aggregates.empty()) throw ConfigError("emit: empty report");
    switch (format) {
        case EmitFormat::Csv: return csv_string(report);
        case EmitFormat::Json: return json_string(report);
        case EmitFormat::PlotData: return plotdata_string(report);
    }
    throw ConfigError("emit: unknown format");
}

void emit(const TrialReport& report, EmitFormat format, const std::string& path) {
    const std::string body = emit_string(report, format);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("emit: cannot open " + path);
    out << body;
    if (!out) throw IoError("emit: write failed for " + path);
}

std::vector<AggregateRow> parse_csv_aggregates(const std::string& csv) {
    std::vector<AggregateRow> rows;
    std::istringstream is(csv);
    std::string line;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {  // column header
            header_seen = true;
            continue;
        }
        std::istringstream ls(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (fields.size() != 10) throw IoError("parse_csv_aggregates: bad row: " + line);
        AggregateRow a;
        a.method = fields[1];
        a.T = std::stoull(fields[2]);
        a.delta = std::stod(fields[3]);
        a.trials = std::stoull(fields[4]);
        a.quantile = std::stod(fields[5]);
        a.median = std::stod(fields[6]);
        a.mean = std::stod(fields[7]);
        a.clip_events_mean = std::stod(fields[8]);
        rows.push_back(std::move(a));
    }
    return rows;
}

std::string ComparisonTable::render() const {
    std::ostringstream os;
    os << "T delta baseline clipped_q baseline_q q_ratio clipped_med baseline_med "
          "med_ratio\n";
    for (const auto& r : rows) {
        os << r.T << ' ' << fmt(r.delta) << ' ' << r.baseline << ' '
           << fmt(r.clipped_quantile) << ' ' << fmt(r.baseline_quantile) << ' '
           << fmt(r.quantile_ratio) << ' ' << fmt(r.clipped_median) << ' '
           << fmt(r.baseline_median) << ' ' << fmt(r.median_ratio) << "\n";
    }
    return os.str();
}

}  // namespace cliptail
