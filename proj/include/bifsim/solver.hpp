#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "bifsim/model.hpp"
#include "bifsim/paths.hpp"

namespace bifsim {

/// maximal/minimal: sharp switching with Filippov sliding; at a contact where
/// both departures are possible, maximal leaves upward and minimal downward.
/// smoothed: the drift is blended linearly across |X - B| <= width.
/// delta_push: at every contact X is pushed up with slope max|beta| for a
/// duration `width` (approximates the maximal solution as width -> 0).
enum class Scheme { maximal, minimal, smoothed, delta_push };

std::string to_string(Scheme s);
/// Accepts "maximal", "minimal", "smoothed", "delta" / "delta_push".
Scheme parse_scheme(const std::string& name);

struct Interval {
    double enter = 0.0;
    double exit = 0.0;
};

struct SolutionPath {
    SampledPath base;
    ModelParams params;
    Scheme scheme = Scheme::maximal;
    /// Band half-width (smoothed) or push duration (delta_push); 0 otherwise.
    double width = 0.0;
    /// Maximal intervals of positive length on which X = B.
    std::vector<Interval> contact_set;
    /// Contacts with a side whose exponent is negative; the drift there was
    /// clamped at |X - B| = kSingularFloor.
    std::size_t singular_contacts = 0;
};

inline constexpr double kSingularFloor = 1e-12;

/// One stretch of the solution between events or driver grid points.
/// X and B are linear on it except inside a smoothing band or on an
/// adaptive step, where the chord is reported.
struct Piece {
    double t0, t1;
    double x0, x1;
    double b0, b1;
    /// +1: X > B, -1: X < B, 0: sliding on B (or inside the smoothing band),
    /// 2: delta push.
    int side;
};

/// Brownian-bridge refinement of the driver near contact. A driver segment
/// of length h is split at its midpoint when Y = B - X is within
/// `reach` sigma sqrt(h) of 0 at its start or at the linearly predicted
/// end (or changes sign), down to `max_level` halvings. Midpoint values
/// follow Levy's construction with normals that depend only on
/// (seed, coarse index, level, position), so every solution started on
/// the same driver sees the same refined path wherever it refines.
struct BridgeRefinement {
    bool enabled = false;
    std::uint64_t seed = 0;
    /// Variance rate of the driver.
    double sigma2 = 1.0;
    int max_level = 10;
    double reach = 3.0;

    /// Standard normal attached to node (level, pos) of coarse segment k.
    double normal(std::size_t k, int level, std::uint64_t pos) const noexcept;
    /// Midpoint of that node given its endpoint values and length h.
    double midpoint(std::size_t k, int level, std::uint64_t pos, double ba, double bb, double h) const noexcept {
        return 0.5 * (ba + bb) + 0.5 * std::sqrt(sigma2 * h) * normal(k, level, pos);
    }
};

struct IntegratorOptions {
    Scheme scheme = Scheme::maximal;
    double width = 0.0;
    /// Local error per adaptive step (sides with nonzero exponent).
    double tol = 1e-10;
    double t_end = std::numeric_limits<double>::infinity();
    BridgeRefinement refine;
};

/// Streams the solution piece by piece. The driver is extended on demand;
/// an infinite t_end runs until the driver cannot grow any further.
class Integrator {
public:
    Integrator(const ModelParams& params, DriverSource& driver, const IntegratorOptions& opt = {});

    /// Fills `out` with the next piece; false at t_end or end of driver.
    bool next(Piece& out);

    double time() const noexcept { return t_; }
    double x() const noexcept { return x_; }
    std::size_t singular_contacts() const noexcept { return singular_; }
    const std::vector<Interval>& contact_set() const noexcept { return contacts_; }

private:
    struct Segment {
        double ta, tb, te, ba, bb, m;
        double at(double t) const noexcept { return t >= tb ? bb : ba + m * (t - ta); }
    };
    struct Node {
        double ta, tb, ba, bb;
        double sd; // sigma sqrt(tb - ta)
        int level;
        std::uint64_t pos;
    };

    bool locate(Segment& s);
    bool locate_refined(Segment& s);
    bool refinable(const Node& n) const noexcept;
    bool pwc_step(const Segment& s, Piece& out);
    bool general_step(const Segment& s, Piece& out);
    bool smoothed_step(const Segment& s, Piece& out);
    bool linear_side(const Segment& s, int side, double slope, Piece& out);
    bool adaptive_side(const Segment& s, int side, Piece& out);
    int choose_departure(bool up, bool down) const noexcept;
    void emit(const Segment& s, double t1, double x1, int side, Piece& out);
    void slide(const Segment& s, Piece& out);
    double side_drift(int side, double d) const noexcept;

    ModelParams p_;
    DriverSource& drv_;
    IntegratorOptions opt_;
    double t_;
    double x_;
    std::size_t k_ = 0;
    double push_until_ = -std::numeric_limits<double>::infinity();
    double h_ = 0.0;
    bool in_contact_ = false;
    std::size_t singular_ = 0;
    std::vector<Interval> contacts_;
    std::vector<Node> stack_;
};

/// Event-exact solution for alpha1 = alpha2 = 0 up to t_end (default: end
/// of the driver). Throws DomainError if the driver does not cover
/// [t0, t_end], ConfigError for nonzero exponents.
SolutionPath solve(const ModelParams& params, const SampledPath& driver,
                   Scheme scheme = Scheme::maximal,
                   double t_end = std::numeric_limits<double>::quiet_NaN());

/// Any exponents > -1; sides with alpha = 0 are still integrated exactly.
SolutionPath solve_general(const ModelParams& params, const SampledPath& driver, double tol,
                           Scheme scheme = Scheme::maximal,
                           double t_end = std::numeric_limits<double>::quiet_NaN());

SolutionPath solve_smoothed(const ModelParams& params, const SampledPath& driver, double epsilon,
                            double t_end = std::numeric_limits<double>::quiet_NaN());

SolutionPath solve_delta(const ModelParams& params, const SampledPath& driver, double delta,
                         double t_end = std::numeric_limits<double>::quiet_NaN());

/// Runs an integrator to completion and records every piece endpoint.
SolutionPath collect(const ModelParams& params, DriverSource& driver, const IntegratorOptions& opt);

struct FlowResult {
    std::vector<double> x_grid;
    std::vector<double> values;
    std::vector<SolutionPath> paths; // only when requested
};

/// X^x(t_eval) for each x in a strictly increasing grid, all on one driver.
FlowResult solve_flow(const ModelParams& params, const SampledPath& driver,
                      const std::vector<double>& x_grid, double t_eval, bool keep_paths = false,
                      Scheme scheme = Scheme::maximal);

struct ConvergenceRow {
    double epsilon;
    double sup_gap;
    double lipschitz;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    /// Gaps strictly decrease along the list (reported, not required).
    bool monotone = true;
};

/// Sup-norm gap on the driver grid between the smoothed solutions and the
/// maximal solution, for a decreasing list of band widths.
ConvergenceTable convergence_study(const ModelParams& params, const SampledPath& driver,
                                   const std::vector<double>& epsilons);

/// Largest |dX/dt| over the samples of a path.
double lipschitz_constant(const SampledPath& path);

/// CSV `t_enter,t_exit`.
void write_contact_csv(std::ostream& os, const SolutionPath& sol);

} // namespace bifsim
