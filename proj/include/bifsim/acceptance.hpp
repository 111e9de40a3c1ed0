#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace bifsim {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    /// Estimate, reference and tolerance in one line.
    std::string summary;
    /// Named numbers for machine-readable reports. Independent of the
    /// worker count.
    std::vector<std::pair<std::string, double>> values;
    double seconds = 0.0;
    /// Runtime budget; reported next to the measured time, not asserted.
    double budget_seconds = 0.0;
};

struct AcceptanceOptions {
    /// Criteria to run (1..11); empty runs all of them.
    std::vector<int> only;
    /// Criterion k uses master seed `seed + k`.
    std::uint64_t seed = 7000;
    /// Receives format_line() of each criterion as soon as it finishes.
    std::ostream* progress = nullptr;
    /// When set, criterion 11 writes its growth trajectories and criterion
    /// 6 its moment tables here as CSV.
    std::string csv_dir;
};

inline constexpr int kCriterionCount = 11;

/// Runs the acceptance criteria in increasing order. Tolerances are fixed
/// in the implementation; a criterion that throws is reported as failed.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt);

/// `[PASS] 3 expected bifurcation time: ... (12.3 s, budget 120 s)`.
std::string format_line(const CriterionResult& r);

/// Parses "1,3,5-7" into criterion ids; throws ConfigError on anything else.
std::vector<int> parse_criteria(const std::string& list);

} // namespace bifsim
