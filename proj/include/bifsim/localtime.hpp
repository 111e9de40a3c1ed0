#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "bifsim/model.hpp"
#include "bifsim/paths.hpp"

namespace bifsim {

// Local time of Y at 0 is normalized so that, per unit of it, excursions of
// height > h on either side have intensity ~ 1/h as h -> 0. This is half of
// the semimartingale local time: for a Brownian Y, E L_1 = sigma sqrt(2/pi) / 2.

/// Side drifts of X near contact (alpha = 0 sides; 0 elsewhere), used to
/// remove the leading-order bias of the band estimators. All zero means Y is
/// treated as driftless.
struct BiasModel {
    double beta1 = 0.0;
    double beta2 = 0.0;

    static BiasModel of(const ModelParams& p) noexcept {
        return {p.alpha1 == 0.0 ? p.beta1 : 0.0, p.alpha2 == 0.0 ? p.beta2 : 0.0};
    }

    /// Expected band occupation divided by its driftless value. A side whose
    /// drift pulls Y back to 0 has local-time profile exp(-2|beta| y / sigma2)
    /// near 0; a repelling side has a flat profile.
    double occupation_factor(double eps, double sigma2) const;
    /// Expected number of completed band crossings, (0, eps) downward plus
    /// (-eps, 0) upward, per unit local time.
    double crossing_rate(double eps, double sigma2) const;
};

struct LocalTimeCurve {
    std::vector<double> times;
    std::vector<double> L;
    double x_label = 0.0;
    double epsilon = 0.0;
    double sigma2 = 1.0;
    /// Set by the crossing estimator when no crossing was completed.
    bool low_statistics = false;

    double final_value() const { return L.empty() ? 0.0 : L.back(); }
    /// Step/linear lookup: value at time t (0 before the first sample).
    double at(double t) const;
};

/// 2 sigma sqrt(dt).
double default_bandwidth(double sigma2, double dt);

/// Streaming occupation estimator over linear pieces of Y:
///   L = sigma2 / (4 eps) * Leb{s : |Y_s| <= eps} / occupation_factor.
class OccupationCounter {
public:
    OccupationCounter(double eps, double sigma2, const BiasModel& bias = {});
    void add(double t0, double t1, double y0, double y1) noexcept;
    double value() const noexcept { return scale_ * occupation_; }
    double occupation() const noexcept { return occupation_; }
    double epsilon() const noexcept { return eps_; }
    /// Band time of one linear piece.
    static double band_time(double dt, double y0, double y1, double eps) noexcept;

private:
    double eps_;
    double scale_;
    double occupation_ = 0.0;
};

/// Expected overshoot of a Gaussian random walk with step variance
/// sigma2 dt over a level, -zeta(1/2) / sqrt(2 pi) * sigma sqrt(dt).
/// A path sampled on a grid only registers a band crossing after
/// overshooting each band edge it has to detect, so the effective band is
/// wider by this much per edge.
double sampling_overshoot(double sigma2, double dt);

/// Streaming crossing estimator: completed downcrossings of (0, eps) plus
/// upcrossings of (-eps, 0), divided by BiasModel::crossing_rate evaluated
/// at the effective width eps + overshoot.
class CrossingCounter {
public:
    CrossingCounter(double eps, double sigma2, const BiasModel& bias = {}, double overshoot = 0.0);
    /// Feeds Y at the end of a piece (and once at the start).
    /// Returns true when a crossing completes at this sample.
    bool observe(double y) noexcept;
    std::size_t crossings() const noexcept { return count_; }
    double value() const noexcept { return static_cast<double>(count_) / rate_; }

private:
    double eps_;
    double rate_;
    int armed_ = 0; // +1 after Y >= eps, -1 after Y <= -eps
    std::size_t count_ = 0;
};

/// Exact occupation estimator on a piecewise-linear Y.
LocalTimeCurve occupation_local_time(const SampledPath& Y, double eps, double sigma2,
                                     const BiasModel& bias = {});

/// Crossing estimator; all-zero curve with low_statistics set when no
/// crossing completes. `overshoot` is the total sampling overshoot over
/// both band edges, 2 sampling_overshoot(sigma2, dt) for a path sampled on
/// a grid of step dt (solver difference paths included: their contacts are
/// exact, but only where the interpolated driver meets X).
LocalTimeCurve downcrossing_local_time(const SampledPath& Y, double eps, double sigma2,
                                       const BiasModel& bias = {}, double overshoot = 0.0);

/// Y = B - X on the sample times of X (which include the driver grid).
SampledPath difference_path(const SampledPath& B, const SampledPath& X);

/// CSV `t,L`.
void write_csv(std::ostream& os, const LocalTimeCurve& curve);

} // namespace bifsim
