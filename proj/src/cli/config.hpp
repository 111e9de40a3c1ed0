#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "bifsim/model.hpp"

namespace bifcli {

/// Every knob of every subcommand. Keys not used by a subcommand are
/// validated and echoed in its report but otherwise ignored.
struct RunConfig {
    bifsim::ModelParams params;
    double dt = 1e-3;
    /// Path length; subcommands fall back to their own default when unset.
    double horizon = 10.0;
    std::uint64_t trials = 1000;
    std::uint64_t seed = 1;
    /// Local-time band half-width; 0 means 2 sigma sqrt(dt).
    double epsilon = 0.0;
    /// Escape barrier on every repelling side; 0 derives it from `bound`.
    double barrier = 0.0;
    double bound = 1e-4;
    /// Output prefix; empty prints the report to stdout and skips CSV files.
    std::string out;
    std::string scheme = "maximal";
    /// Band half-width (smoothed) or push duration (delta).
    double width = 0.05;
    /// Driver CSV or binary file for solve, localtime, excursions, converge.
    std::string driver;
    std::string epsilons = "0.2,0.1,0.05,0.025,0.0125";
    double x_max = 1.5;
    double delta = 0.01;
    double bin_width = 0.1;
    std::uint64_t bins = 20;
    std::uint64_t min_count = 300;
    std::uint64_t refine_levels = 0;
    double beta = 1.0;
    /// Envelope window margin; 0 means 10 sigma2 / beta.
    double margin = 0.0;
    /// Excursion height resolution; 0 means 4 sigma sqrt(dt).
    double resolution = 0.0;
    /// When positive, estimates with a theory value must lie within this
    /// many standard errors of it.
    double assert_se = 0.0;
    std::string criteria;

    /// Keys set explicitly by a file or a flag.
    std::set<std::string> given;
    bool has(const std::string& key) const { return given.count(key) != 0; }
};

const std::vector<std::string>& config_keys();
std::string key_help(const std::string& key);

/// Throws bifsim::ConfigError for an unknown key (listing the valid ones)
/// or a value that does not parse.
void set_key(RunConfig& cfg, const std::string& key, const std::string& value);

/// Flat `key = value` lines; `#` starts a comment; blank lines are skipped.
/// Text whose first non-blank character is `{` is read as a JSON object
/// of scalars instead. Repeated keys are an error.
void apply_text(RunConfig& cfg, const std::string& text);
void apply_file(RunConfig& cfg, const std::string& path);

nlohmann::ordered_json to_json(const RunConfig& cfg);

std::vector<double> parse_list(const std::string& s);

/// Range checks shared by all subcommands plus the ones `command` needs.
void validate(const RunConfig& cfg, const std::string& command);

} // namespace bifcli
