#pragma once

#include <cstddef>
#include <limits>
#include <string>

#include "bifsim/localtime.hpp"
#include "bifsim/model.hpp"
#include "bifsim/paths.hpp"
#include "bifsim/solver.hpp"

namespace bifsim {

/// Declares a bifurcation once Y = B - X is at distance `barrier` from 0 on
/// a side whose drift pushes it away. Each side has its own barrier, chosen
/// so that the probability of ever returning to 0 from there is `bound`.
/// A side that does not repel has an infinite barrier.
struct EscapeCriterion {
    double barrier_upper = std::numeric_limits<double>::infinity();
    double barrier_lower = std::numeric_limits<double>::infinity();
    double horizon = 1e4;
    double bound = 1e-4;

    static EscapeCriterion for_params(const ModelParams& p, double bound = 1e-4, double horizon = 1e4);
    /// The same barrier c on every repelling side; `bound` becomes the
    /// largest return probability from c over those sides.
    static EscapeCriterion with_barrier(const ModelParams& p, double c, double horizon = 1e4);

    void validate() const;
};

/// Eventual sign of X - B.
enum class Direction { positive, negative, none };

std::string to_string(Direction d);

struct EscapeOptions {
    Scheme scheme = Scheme::maximal;
    /// Band half-width of the local-time estimators; 0 picks
    /// default_bandwidth(sigma2, dt) from the driver's first step.
    double epsilon = 0.0;
    /// Adaptive tolerance for sides with a nonzero exponent.
    double tol = 1e-10;
    /// Keep the sampled Y and the running occupation estimate.
    bool record = false;
    BridgeRefinement refine;
    /// Set when the caller already knows that X stays on `known_side` of B
    /// after `known_after` (for instance by monotone coupling with a path
    /// that has escaped). The run then ends, with that direction, at the
    /// first sample after `known_after` where Y is outside the band on
    /// that side.
    Direction known_side = Direction::none;
    double known_after = std::numeric_limits<double>::infinity();
};

struct EscapeTrace {
    Direction direction = Direction::none;
    /// Last time with X = B (t0 if there is none).
    double T_star = 0.0;
    /// Time at which the barrier was reached (or the horizon).
    double escape_time = 0.0;
    /// Occupation estimate of L at escape; L is flat after T_star.
    double L_occupation = 0.0;
    /// Crossing estimate of the same quantity.
    double L_crossings = 0.0;
    std::size_t crossings = 0;
    double epsilon = 0.0;
    std::size_t singular_contacts = 0;
    /// Filled when EscapeOptions::record is set.
    SampledPath Y;
    LocalTimeCurve L;
};

/// Streams the solution until the escape criterion fires or the horizon is
/// reached (direction none). The driver is extended on demand.
EscapeTrace run_to_escape(const ModelParams& params, DriverSource& driver,
                          const EscapeCriterion& criterion, const EscapeOptions& opt = {});

} // namespace bifsim
