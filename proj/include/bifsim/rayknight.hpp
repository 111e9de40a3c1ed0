#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "bifsim/escape.hpp"
#include "bifsim/model.hpp"
#include "bifsim/paths.hpp"
#include "bifsim/random.hpp"

namespace bifsim {

/// Terminal local times L^x_inf for a grid of initial conditions, all
/// driven by one Brownian path.
struct ProfileSample {
    std::vector<double> x_grid;
    std::vector<double> L_inf;
    Seed trial_seed;
};

/// One run per x on the shared driver. For x >= 0 in increasing order the
/// run of x stops once the run of the previous x has escaped upward and Y
/// has left the band, since X^x >= X^x' keeps it above B from then on. A
/// grid point whose predecessor never touched B gets L = 0 without a run.
ProfileSample local_time_profile(const ModelParams& params, DriverSource& driver,
                                 const std::vector<double>& x_grid, const EscapeCriterion& criterion,
                                 const EscapeOptions& opt = {});

/// Same on a lazily generated Brownian driver with step dt.
ProfileSample local_time_profile(const ModelParams& params, double dt, const Seed& seed,
                                 const std::vector<double>& x_grid, const EscapeCriterion& criterion,
                                 const EscapeOptions& opt = {});

struct RkRow {
    double bin_lo = 0.0;
    double bin_hi = 0.0;
    /// Mean of (L^{x+-delta} - L^x) / delta over pairs with L^x in the bin.
    double emp_drift = 0.0;
    /// Average of the theory drift over the same L^x values.
    double theory_drift = 0.0;
    /// Sample variance of L^{x+delta} - L^x, divided by delta.
    double emp_var = 0.0;
    double theory_var = 0.0;
    double se_drift = 0.0;
    double se_var = 0.0;
    std::size_t n = 0;
};

struct RkTable {
    double delta = 0.0;
    double bin_width = 0.0;
    /// x >= 0 going up: against rk_drift_pos and rk_variance.
    std::vector<RkRow> positive;
    /// From x = 0 going down one step: against rk_drift_neg (variance
    /// column carries no theory value and is NaN).
    std::vector<RkRow> negative;
};

/// Bins consecutive grid pairs of every profile by L at the lower end.
/// The grids must be uniform with step delta. Bins below `min_count`
/// samples are kept and reported, never dropped.
RkTable rk_moment_check(const std::vector<ProfileSample>& profiles, const ModelParams& params,
                        double delta, double bin_width = 0.1, std::size_t max_bins = 20);

/// CSV `bin_lo,bin_hi,emp_drift,theory_drift,emp_var,theory_var,se_drift,se_var,n`.
void write_csv(std::ostream& os, const std::vector<RkRow>& rows);

/// Ensemble of Euler paths of dL = mu(L) dx + sqrt(var(L)) dW on the grid
/// 0, dx, ..., x_max, started from Exponential(mean sigma2 / (2 beta2)) and
/// absorbed at 0. values[i] is path i. With `deterministic` set the noise
/// is dropped (the ODE dL/dx = mu(L)).
struct RkEnsemble {
    std::vector<double> x_grid;
    std::vector<std::vector<double>> values;

    /// Values of every path at grid index k.
    std::vector<double> marginal(std::size_t k) const;
};

RkEnsemble simulate_rk_diffusion(const ModelParams& params, double x_max, double dx, std::uint64_t seed,
                                 std::size_t n, bool deterministic = false);

struct FlowCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double rel_err = 0.0;
    /// Trapezoid on every other point disagrees with the full rule by more
    /// than 1% of the scale |x2 - x1|.
    bool refine_needed = false;
    std::vector<double> x_sub;
    std::vector<double> L_sub;
};

/// X^{x2}_t - X^{x1}_t from two solves against the trapezoid rule of
/// exp(-2 L^x_t (beta1 - beta2) / sigma2) over n_sub equally spaced x,
/// with L^x_t from the occupation estimator (bandwidth eps, 0 = default).
FlowCheck verify_flow_derivative(const ModelParams& params, const SampledPath& driver, double x1,
                                 double x2, double t_eval, std::size_t n_sub = 21, double eps = 0.0);

} // namespace bifsim
