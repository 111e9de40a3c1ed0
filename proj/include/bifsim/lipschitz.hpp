#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "bifsim/escape.hpp"
#include "bifsim/paths.hpp"
#include "bifsim/random.hpp"
#include "bifsim/solver.hpp"
#include "bifsim/stats.hpp"

namespace bifsim {

/// Smallest beta-Lipschitz majorant of the piecewise-linear path,
/// Z+(t_i) = max_j (B(t_j) - beta |t_i - t_j|), in two linear passes.
SampledPath upper_envelope(const SampledPath& driver, double beta);
/// Largest beta-Lipschitz minorant, by symmetry.
SampledPath lower_envelope(const SampledPath& driver, double beta);

struct Window {
    double t0 = 0.0;
    double t1 = 0.0;
    bool empty() const noexcept { return !(t1 > t0); }
};

struct EnvelopePair {
    SampledPath upper;
    SampledPath lower;
    double beta = 1.0;
    /// Part of the grid at least `margin` away from both ends.
    Window inner_window;
};

/// Envelopes of one driver; inner window [t0 + margin, t1 - margin].
EnvelopePair envelopes(const SampledPath& driver, double beta, double margin);

/// Default margin 10 sigma2 / beta.
double default_margin(double beta, double sigma2);

/// beta1 = -beta, beta2 = +beta: both sides repel and exactly one solution
/// stays near B forever.
ModelParams xstar_params(double beta, double sigma2 = 1.0);

struct XStarResult {
    double x_bar = 0.0;
    /// Final bracket [lo, hi]; starts from lo escape downward, from hi upward.
    double lo = 0.0;
    double hi = 0.0;
    std::size_t iterations = 0;
    /// Solution from x_bar over the driver.
    SolutionPath path;
    /// Set when the solution from x_bar never meets B in the second half
    /// of the window. Common: an error e in x_bar shows after local time
    /// of order log(1/e) sigma2 / (4 beta), and the maximal solution leaves
    /// B upward at the first contact where both departures are possible.
    bool horizon_flag = false;
};

/// Bisection on the eventual side of X^x - B. Initial bracket
/// +-(max |B| + beta T). Stops when hi - lo <= tol or the bracket can no
/// longer be split. Throws HorizonExceeded (partial = current bracket
/// width) when a midpoint has not escaped by the end of the driver.
XStarResult find_xstar_bisection(double beta, const SampledPath& driver, double tol = 1e-10,
                                 double bound = 1e-4, const EscapeOptions& opt = {});

struct StationaryPair {
    SampledPath driver;
    SampledPath xstar;
    /// Draw of B - X at the far end of the window before time reversal.
    double y0 = 0.0;
};

/// Builds Yh = Bh - Xh as the attracting two-drift diffusion started from
/// its stationary density, with Bh Brownian and Xh solving the attracting
/// equation from -y0, then reverses time:
///   B(t) = Bh(T - t) - Bh(T),  X*(t) = Xh(T - t) - Bh(T).
/// Contacts are resolved on a bridge-refined driver with `refine_levels`
/// halvings (0 disables it). Output on the uniform grid of n_steps.
StationaryPair sample_stationary_pair(double beta, double sigma2, double T, std::size_t n_steps,
                                      const Seed& seed, int refine_levels = 0);

struct GapEstimates {
    McEstimate abs_gap; // E|B - X*|, theory sigma2 / (2 beta)
    McEstimate upper;   // E(Z+ - B), theory 3 sigma2 / (4 beta)
    McEstimate lower;   // E(B - Z-), same theory
    McEstimate width;   // E(Z+ - Z-), theory 3 sigma2 / (2 beta)
    Window window;
    bool low_statistics = false;
};

/// Time averages of |B - X*|, Z+ - B, B - Z- and Z+ - Z- over a window
/// for one pair.
struct PairGaps {
    double abs_gap = 0.0;
    double upper = 0.0;
    double lower = 0.0;
    double width = 0.0;
};

/// Inner window [t0 + margin, t1 - margin] of a path.
Window inner_window(const SampledPath& path, double margin);

PairGaps pair_gaps(const StationaryPair& pair, double beta, const Window& window);

/// Means over trials with their standard errors. low_statistics when the
/// window is shorter than 10 sigma2 / beta^2 or fewer than 30 trials are
/// given.
GapEstimates gap_statistics(const std::vector<PairGaps>& per_trial, double beta, double sigma2,
                            const Window& window);
GapEstimates gap_statistics(const std::vector<StationaryPair>& pairs, double beta, double sigma2,
                            double margin);

/// Samples `trials` pairs (trial i uses Seed{master, i, 0}) and keeps only
/// their window averages.
GapEstimates gap_ensemble(double beta, double sigma2, double T, std::size_t n_steps, std::size_t trials,
                          std::uint64_t master, double margin);

struct GrowthPoint {
    double t_lo = 0.0;
    double t_hi = 0.0;
    /// max over the window of gap(t) / log t.
    double value = 0.0;
};

/// Dyadic windows [2^k, 2^(k+1)] with 2^k >= 4, the last one clipped to the
/// end of the path.
std::vector<GrowthPoint> log_growth_estimate(const SampledPath& gap);

/// |a - b| on the common grid.
SampledPath abs_difference(const SampledPath& a, const SampledPath& b);

/// CSV `t,B,Zplus,Zminus`.
void write_envelope_csv(std::ostream& os, const SampledPath& driver, const EnvelopePair& env);
/// CSV `t,B,Xstar`.
void write_pair_csv(std::ostream& os, const StationaryPair& pair);

} // namespace bifsim
