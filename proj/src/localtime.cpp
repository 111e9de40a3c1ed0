#include "bifsim/localtime.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "bifsim/error.hpp"

namespace bifsim {

namespace {

void check_band(double eps, double sigma2) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw ConfigError("epsilon must be positive");
    if (!(sigma2 > 0.0)) throw ConfigError("sigma2 must be positive");
}

// int_0^eps exp(-k y) dy
double decayed_width(double k, double eps) {
    if (k * eps < 1e-12) return eps;
    return -std::expm1(-k * eps) / k;
}

double side_crossing_rate(double beta, double eps, double sigma2) {
    const double k = 2.0 * std::abs(beta) / sigma2;
    if (k * eps < 1e-12) return 1.0 / eps;
    return k / std::expm1(k * eps);
}

} // namespace

double BiasModel::occupation_factor(double eps, double sigma2) const {
    // upper side (Y > 0) attracts when beta1 > 0, lower side when beta2 < 0
    const double ku = beta1 > 0.0 ? 2.0 * beta1 / sigma2 : 0.0;
    const double kl = beta2 < 0.0 ? -2.0 * beta2 / sigma2 : 0.0;
    return (decayed_width(ku, eps) + decayed_width(kl, eps)) / (2.0 * eps);
}

double BiasModel::crossing_rate(double eps, double sigma2) const {
    return side_crossing_rate(beta1, eps, sigma2) + side_crossing_rate(beta2, eps, sigma2);
}

double LocalTimeCurve::at(double t) const {
    if (times.empty() || t < times.front()) return 0.0;
    if (t >= times.back()) return L.back();
    auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - times.begin()) - 1;
    const double w = (t - times[k]) / (times[k + 1] - times[k]);
    return L[k] + w * (L[k + 1] - L[k]);
}

double default_bandwidth(double sigma2, double dt) { return 2.0 * std::sqrt(sigma2 * dt); }

OccupationCounter::OccupationCounter(double eps, double sigma2, const BiasModel& bias) : eps_(eps) {
    check_band(eps, sigma2);
    scale_ = sigma2 / (4.0 * eps * bias.occupation_factor(eps, sigma2));
}

double OccupationCounter::band_time(double dt, double y0, double y1, double eps) noexcept {
    const double dy = y1 - y0;
    if (dy == 0.0) return std::abs(y0) <= eps ? dt : 0.0;
    double u0 = (-eps - y0) / dy;
    double u1 = (eps - y0) / dy;
    if (u0 > u1) std::swap(u0, u1);
    u0 = std::max(u0, 0.0);
    u1 = std::min(u1, 1.0);
    return u1 > u0 ? (u1 - u0) * dt : 0.0;
}

void OccupationCounter::add(double t0, double t1, double y0, double y1) noexcept {
    occupation_ += band_time(t1 - t0, y0, y1, eps_);
}

double sampling_overshoot(double sigma2, double dt) {
    // -zeta(1/2) / sqrt(2 pi)
    constexpr double rho = 0.5825971579390106;
    return rho * std::sqrt(sigma2 * dt);
}

CrossingCounter::CrossingCounter(double eps, double sigma2, const BiasModel& bias, double overshoot)
    : eps_(eps) {
    check_band(eps, sigma2);
    if (!(overshoot >= 0.0)) throw ConfigError("overshoot must be >= 0");
    rate_ = bias.crossing_rate(eps + overshoot, sigma2);
}

bool CrossingCounter::observe(double y) noexcept {
    if (y >= eps_) {
        armed_ = 1;
    } else if (y <= -eps_) {
        armed_ = -1;
    } else if ((armed_ == 1 && y <= 0.0) || (armed_ == -1 && y >= 0.0)) {
        armed_ = 0;
        ++count_;
        return true;
    }
    return false;
}

LocalTimeCurve occupation_local_time(const SampledPath& Y, double eps, double sigma2,
                                     const BiasModel& bias) {
    OccupationCounter occ(eps, sigma2, bias);
    LocalTimeCurve c;
    c.epsilon = eps;
    c.sigma2 = sigma2;
    if (Y.empty()) return c;
    c.times = Y.times;
    c.L.assign(Y.size(), 0.0);
    for (std::size_t k = 1; k < Y.size(); ++k) {
        occ.add(Y.times[k - 1], Y.times[k], Y.values[k - 1], Y.values[k]);
        c.L[k] = occ.value();
    }
    return c;
}

LocalTimeCurve downcrossing_local_time(const SampledPath& Y, double eps, double sigma2,
                                       const BiasModel& bias, double overshoot) {
    CrossingCounter cc(eps, sigma2, bias, overshoot);
    LocalTimeCurve c;
    c.epsilon = eps;
    c.sigma2 = sigma2;
    if (Y.empty()) return c;
    c.times = Y.times;
    c.L.assign(Y.size(), 0.0);
    for (std::size_t k = 0; k < Y.size(); ++k) {
        // a crossing of a band boundary between samples is resolved by the
        // sample values alone since Y is linear in between
        cc.observe(Y.values[k]);
        c.L[k] = cc.value();
    }
    c.low_statistics = cc.crossings() == 0;
    return c;
}

SampledPath difference_path(const SampledPath& B, const SampledPath& X) {
    SampledPath Y;
    Y.kind = PathKind::difference;
    Y.times = X.times;
    Y.values.resize(X.size());
    for (std::size_t k = 0; k < X.size(); ++k) Y.values[k] = B.at(X.times[k]) - X.values[k];
    return Y;
}

void write_csv(std::ostream& os, const LocalTimeCurve& curve) {
    const auto old = os.precision(17);
    os << "t,L\n";
    for (std::size_t k = 0; k < curve.times.size(); ++k) os << curve.times[k] << ',' << curve.L[k] << '\n';
    os.precision(old);
}

} // namespace bifsim
