#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cliptail/generators.hpp"
#include "cliptail/harness.hpp"
#include "cliptail/oracles.hpp"
#include "cliptail/schedule.hpp"

namespace cliptail {

/// Flat key=value sections ([section] headers, # comments, no includes).
class Config {
  public:
    static Config parse(const std::string& text);
    static Config parse_file(const std::string& path);

    bool has_section(const std::string& section) const;
    bool has(const std::string& section, const std::string& key) const;

    std::string get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double_or(const std::string& section, const std::string& key,
                         double fallback) const;
    std::size_t get_size(const std::string& section, const std::string& key) const;
    std::size_t get_size_or(const std::string& section, const std::string& key,
                            std::size_t fallback) const;
    std::uint64_t get_u64_or(const std::string& section, const std::string& key,
                             std::uint64_t fallback) const;
    std::vector<double> get_doubles(const std::string& section, const std::string& key) const;
    std::vector<std::size_t> get_sizes(const std::string& section,
                                       const std::string& key) const;
    std::vector<std::string> get_names(const std::string& section,
                                       const std::string& key) const;

  private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

/// "identity" (needs dim), "iso:V", "diag:a,b,..." or "diag:[a,b,...]".
CovModel cov_from_string(const std::string& text, std::size_t dim);

/// Handle keys under `prefix.`: kind, nu, alpha, cov, var, value, mean.
DistHandle dist_from_config(const Config& cfg, const std::string& section,
                            const std::string& prefix, std::size_t dim);

OracleSpec oracle_from_config(const Config& cfg);

/// Builds the plan source from [plan] plus constants derived from the oracle
/// (overridable by explicit keys mu/L/G/cov_trace/cov_opnorm/alpha/beta/d_eff).
PlanSource plan_source_from_config(const Config& cfg, const OracleSpec& oracle,
                                   const VecD& init);

Experiment experiment_from_config(const Config& cfg);

std::vector<double> parse_double_list(const std::string& text);

}  // namespace cliptail
