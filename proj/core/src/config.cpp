#include "cliptail/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace cliptail {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace

Config Config::parse(const std::string& text) {
    Config cfg;
    std::istringstream is(text);
    std::string line, section = "global";
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": malformed section header");
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty())
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": empty section name");
            cfg.sections_[section];
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected key=value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        cfg.sections_[section][key] = value;
    }
    return cfg;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

bool Config::has_section(const std::string& section) const {
    return sections_.count(section) != 0;
}

bool Config::has(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    return it != sections_.end() && it->second.count(key) != 0;
}

std::string Config::get(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    if (it == sections_.end())
        throw ConfigError("config: missing section [" + section + "]");
    auto kt = it->second.find(key);
    if (kt == it->second.end())
        throw ConfigError("config: missing key " + key + " in [" + section + "]");
    return kt->second;
}

std::string Config::get_or(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
    return has(section, key) ? get(section, key) : fallback;
}

double Config::get_double(const std::string& section, const std::string& key) const {
    const std::string v = get(section, key);
    try {
        return std::stod(v);
    } catch (...) {
        throw ConfigError("config: " + key + "=" + v + " is not a number");
    }
}

double Config::get_double_or(const std::string& section, const std::string& key,
                             double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

std::size_t Config::get_size(const std::string& section, const std::string& key) const {
    const double v = get_double(section, key);
    if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v)))
        throw ConfigError("config: " + key + " must be a nonnegative integer");
    return static_cast<std::size_t>(v);
}

std::size_t Config::get_size_or(const std::string& section, const std::string& key,
                                std::size_t fallback) const {
    return has(section, key) ? get_size(section, key) : fallback;
}

std::uint64_t Config::get_u64_or(const std::string& section, const std::string& key,
                                 std::uint64_t fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get(section, key);
    try {
        return std::stoull(v);
    } catch (...) {
        throw ConfigError("config: " + key + "=" + v + " is not an unsigned integer");
    }
}

std::vector<double> parse_double_list(const std::string& text) {
    std::string t = text;
    t.erase(std::remove_if(t.begin(), t.end(),
                           [](char c) { return c == '[' || c == ']' || std::isspace(static_cast<unsigned char>(c)); }),
            t.end());
    std::vector<double> out;
    std::istringstream is(t);
    std::string item;
    while (std::getline(is, item, ',')) {
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (...) {
            throw ConfigError("config: bad number in list: " + item);
        }
    }
    return out;
}

std::vector<double> Config::get_doubles(const std::string& section,
                                        const std::string& key) const {
    return parse_double_list(get(section, key));
}

std::vector<std::size_t> Config::get_sizes(const std::string& section,
                                           const std::string& key) const {
    std::vector<std::size_t> out;
    for (double v : get_doubles(section, key)) {
        if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v)))
            throw ConfigError("config: " + key + " entries must be nonnegative integers");
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

std::vector<std::string> Config::get_names(const std::string& section,
                                           const std::string& key) const {
    std::vector<std::string> out;
    std::istringstream is(get(section, key));
    std::string item;
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

CovModel cov_from_string(const std::string& text, std::size_t dim) {
    if (text == "identity") {
        if (dim == 0) throw ConfigError("cov=identity needs a dim");
        return CovModel::identity(dim);
    }
    if (text.rfind("iso:", 0) == 0) {
        if (dim == 0) throw ConfigError("cov=iso needs a dim");
        return CovModel::isotropic(std::stod(text.substr(4)), dim);
    }
    if (text.rfind("diag:", 0) == 0) {
        VecD entries = parse_double_list(text.substr(5));
        if (dim != 0 && entries.size() != dim)
            throw ConfigError("cov=diag dimension mismatch");
        return CovModel::diagonal(std::move(entries));
    }
    throw ConfigError("unknown covariance spec: " + text +
                      " (expected identity | iso:V | diag:a,b,...)");
}

DistHandle dist_from_config(const Config& cfg, const std::string& section,
                            const std::string& prefix, std::size_t dim) {
    const std::string kind = cfg.get(section, prefix + ".kind");
    DistHandle h;
    if (kind == "gaussian") {
        h = DistHandle::gaussian(
            cov_from_string(cfg.get_or(section, prefix + ".cov", "identity"), dim));
    } else if (kind == "student_t") {
        h = DistHandle::student_t(
            cfg.get_double(section, prefix + ".nu"),
            cov_from_string(cfg.get_or(section, prefix + ".cov", "identity"), dim));
    } else if (kind == "pareto_radial") {
        h = DistHandle::pareto_radial(
            cfg.get_double(section, prefix + ".alpha"),
            cov_from_string(cfg.get_or(section, prefix + ".cov", "identity"), dim));
    } else if (kind == "scalar_t") {
        h = DistHandle::scalar_t(cfg.get_double(section, prefix + ".nu"),
                                 cfg.get_double_or(section, prefix + ".var", 1.0));
    } else if (kind == "point_mass") {
        h = DistHandle::point_mass(parse_double_list(cfg.get(section, prefix + ".value")));
    } else {
        throw ConfigError("unknown distribution kind: " + kind);
    }
    if (cfg.has(section, prefix + ".mean"))
        h = h.shifted(parse_double_list(cfg.get(section, prefix + ".mean")));
    return h;
}

namespace {

VecD vec_from_config(const Config& cfg, const std::string& section, const std::string& key,
                     std::size_t dim, double fallback_value) {
    if (!cfg.has(section, key)) return VecD(dim, fallback_value);
    const std::string text = cfg.get(section, key);
    if (text == "zeros") return zeros(dim);
    if (text == "ones") return VecD(dim, 1.0);
    VecD v = parse_double_list(text);
    if (v.size() != dim)
        throw ConfigError("config: " + key + " has dimension " + std::to_string(v.size()) +
                          ", expected " + std::to_string(dim));
    return v;
}

}  // namespace

OracleSpec oracle_from_config(const Config& cfg) {
    const std::string section = "oracle";
    const std::string kind = cfg.get(section, "kind");
    const std::size_t dim = cfg.get_size(section, "dim");
    if (dim == 0) throw ConfigError("oracle: dim must be >= 1");
    const VecD optimum = vec_from_config(cfg, section, "optimum", dim, 0.0);
    if (kind == "mean") {
        return OracleSpec::mean_estimation(optimum,
                                           dist_from_config(cfg, section, "noise", dim));
    }
    if (kind == "linreg") {
        return OracleSpec::linear_regression(
            optimum, dist_from_config(cfg, section, "covariate", dim),
            dist_from_config(cfg, section, "noise", 1));
    }
    if (kind == "logreg") {
        return OracleSpec::logistic_regression(
            optimum, dist_from_config(cfg, section, "covariate", dim));
    }
    if (kind == "lad") {
        return OracleSpec::lad_regression(optimum,
                                          dist_from_config(cfg, section, "covariate", dim),
                                          dist_from_config(cfg, section, "noise", 1));
    }
    throw ConfigError("unknown oracle kind: " + kind);
}

PlanSource plan_source_from_config(const Config& cfg, const OracleSpec& oracle,
                                   const VecD& init) {
    const std::string section = "plan";
    PlanSource src;
    src.regime = regime_from_name(cfg.get(section, "regime"));
    src.params = oracle.derived_constants(cfg.get_double_or(section, "c4", 1.0));
    auto override_opt = [&](const char* key, std::optional<double>& field) {
        if (cfg.has(section, key)) field = cfg.get_double(section, key);
    };
    override_opt("mu", src.params.mu);
    override_opt("L", src.params.L);
    override_opt("G", src.params.G);
    override_opt("cov_trace", src.params.cov_trace);
    override_opt("cov_opnorm", src.params.cov_opnorm);
    override_opt("alpha", src.params.alpha);
    override_opt("beta", src.params.beta);
    override_opt("d_eff", src.params.d_eff);
    src.params.delta = cfg.get_double_or(section, "delta", 0.05);
    if (cfg.has(section, "D1")) {
        src.params.D1 = cfg.get_double(section, "D1");
    } else {
        const VecD x1 = init.empty() ? zeros(oracle.dim()) : init;
        src.params.D1 = distance2(x1, oracle.optimum());
    }
    src.c_gamma = cfg.get_double_or(section, "c_gamma", 1.0);
    src.c_m = cfg.get_double_or(section, "c_m", 1.0);
    src.c_const = cfg.get_double_or(section, "c_const", 1.0);
    if (cfg.has(section, "eta")) src.eta = cfg.get_double(section, "eta");
    return src;
}

Experiment experiment_from_config(const Config& cfg) {
    Experiment e;
    e.oracle = oracle_from_config(cfg);
    const std::string section = "experiment";
    e.name = cfg.get_or(section, "name", "experiment");
    e.trials = cfg.get_size_or(section, "trials", 100);
    if (cfg.has(section, "deltas")) e.deltas = cfg.get_doubles(section, "deltas");
    if (cfg.has(section, "T_grid")) e.T_grid = cfg.get_sizes(section, "T_grid");
    const std::string metric = cfg.get_or(section, "metric", "param_error");
    if (metric == "param_error") e.metric = Metric::ParamError;
    else if (metric == "gap") e.metric = Metric::Gap;
    else throw ConfigError("unknown metric: " + metric);
    e.gap_mc_n = cfg.get_size_or(section, "gap_mc_n", 20000);
    e.base_seed = cfg.get_u64_or(section, "base_seed", 0);
    e.threads = static_cast<int>(cfg.get_size_or(section, "threads", 1));
    if (cfg.has(section, "baselines")) {
        for (const auto& name : cfg.get_names(section, "baselines")) {
            if (name == "vanilla_sgd") e.baselines.push_back(Baseline::VanillaSgd);
            else if (name == "batch_mean") e.baselines.push_back(Baseline::BatchMean);
            else if (name == "batch_ols") e.baselines.push_back(Baseline::BatchOls);
            else throw ConfigError("unknown baseline: " + name);
        }
    }
    if (cfg.has_section("init") && cfg.has("init", "x1"))
        e.init = vec_from_config(cfg, "init", "x1", e.oracle.dim(), 0.0);
    if (cfg.has_section("domain")) {
        const std::string kind = cfg.get_or("domain", "kind", "unconstrained");
        if (kind == "ball") {
            e.domain = ConvexSet::ball(
                vec_from_config(cfg, "domain", "center", e.oracle.dim(), 0.0),
                cfg.get_double("domain", "radius"));
        } else if (kind == "box") {
            e.domain =
                ConvexSet::box(vec_from_config(cfg, "domain", "lower", e.oracle.dim(), 0.0),
                               vec_from_config(cfg, "domain", "upper", e.oracle.dim(), 0.0));
        } else if (kind != "unconstrained") {
            throw ConfigError("unknown domain kind: " + kind);
        }
    }
    e.plan_source = plan_source_from_config(cfg, e.oracle, e.init);
    return e;
}

}  // namespace cliptail
