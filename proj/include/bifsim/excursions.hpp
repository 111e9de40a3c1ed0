#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "bifsim/escape.hpp"
#include "bifsim/localtime.hpp"
#include "bifsim/model.hpp"
#include "bifsim/paths.hpp"
#include "bifsim/random.hpp"
#include "bifsim/stats.hpp"

namespace bifsim {

struct ExcursionRecord {
    double t_start = 0.0;
    /// End of the excursion; for an open one, the last sample time.
    double t_end = 0.0;
    /// +1 for Y > 0, -1 for Y < 0.
    int sign = 1;
    double height = 0.0;
    /// Infinite when open.
    double lifetime = 0.0;
    bool open = false;
    /// L at t_start (NaN when no curve was supplied).
    double L_start = 0.0;
};

/// 4 sigma sqrt(dt).
double default_resolution(double sigma2, double dt);

/// Maximal sign-constant stretches of Y with height >= resolution, in time
/// order. Zero crossings between samples are placed by linear
/// interpolation. Stretches below the resolution count as part of the zero
/// set. A path that starts away from 0 yields a first record beginning at
/// its first sample.
std::vector<ExcursionRecord> decompose(const SampledPath& Y, double resolution,
                                       const LocalTimeCurve* L = nullptr);

/// CSV `t_start,t_end,sign,height,lifetime,L_start`; open records carry
/// `inf` as lifetime.
void write_csv(std::ostream& os, const std::vector<ExcursionRecord>& records);

struct BifurcationReport {
    Direction direction = Direction::none;
    double T_star = 0.0;
    /// Occupation estimate of L at T_star.
    double L_at_Tstar = 0.0;
    double escape_time = 0.0;
    double epsilon = 0.0;
    std::size_t singular_contacts = 0;
};

/// Runs the solution on `driver` until the escape criterion fires. The path
/// must be long enough; direction none means the horizon or the end of the
/// driver was reached first.
BifurcationReport detect_bifurcation(const ModelParams& params, const SampledPath& driver,
                                     const EscapeCriterion& criterion, const EscapeOptions& opt = {});

/// Same on a lazily generated Brownian driver with step dt (trial `seed`).
BifurcationReport detect_bifurcation(const ModelParams& params, double dt, const Seed& seed,
                                     const EscapeCriterion& criterion, const EscapeOptions& opt = {});

/// Trials 0..n-1 of `master`, in trial order.
std::vector<BifurcationReport> bifurcation_ensemble(const ModelParams& params, double dt,
                                                    std::size_t trials, std::uint64_t master,
                                                    const EscapeCriterion& criterion,
                                                    const EscapeOptions& opt = {});

/// L accumulated up to the bifurcation. Throws HorizonExceeded, carrying
/// the partial value, when no escape happens within the horizon.
double terminal_local_time(const ModelParams& params, DriverSource& driver,
                           const EscapeCriterion& criterion, const EscapeOptions& opt = {});

struct LifetimeStats {
    std::size_t n = 0;
    double local_time = 0.0;
    /// Total lifetime of closed excursions per unit local time.
    double mean_per_unit_L = 0.0;
    /// Theory value 1/|beta1| + 1/|beta2|.
    double theory_mean = 0.0;
    std::vector<double> edges;
    std::vector<double> observed;
    /// Expected counts from the lifetime density, scaled to the observed
    /// total (shape comparison).
    std::vector<double> expected;
    /// Observed count over the unscaled expected count above edges.front().
    double intensity_ratio = 0.0;
    TestResult chi_square;
    bool low_statistics = false;
};

/// Lifetimes of closed records compared with the per-side densities
///   t^(-3/2) exp(-beta_j^2 t / (2 sigma2)) / (sigma sqrt(2 pi)).
/// Requires beta1 > 0 > beta2 (every excursion ends). Lifetimes are binned on
/// `edges` (the last bin is open to infinity); shorter ones are ignored by
/// the histogram but count toward the mean.
LifetimeStats excursion_lifetime_stats(const std::vector<ExcursionRecord>& records, double local_time,
                                       const ModelParams& params, const std::vector<double>& edges);

/// Expected number of excursions per unit local time on one side with
/// lifetime in [a, b) (b may be infinite), alpha = 0.
double lifetime_mass(double a, double b, double beta, double sigma2);

} // namespace bifsim
