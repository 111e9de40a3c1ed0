#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace bifcli {

const std::vector<std::string>& command_names();
std::string command_help(const std::string& name);

/// Validates the config, runs the subcommand and writes its report: to
/// `<out>.json` plus CSV files `<out>_<table>.csv` when `out` is set, else
/// the JSON to `os`. Progress lines go to `log`. Returns 0 when every
/// asserted tolerance holds and 1 otherwise, naming the failures on `log`.
/// Throws bifsim::ConfigError before any simulation on a bad config.
int run_command(const std::string& name, const RunConfig& cfg, std::ostream& os, std::ostream& log);

} // namespace bifcli
