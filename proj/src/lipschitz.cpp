#include "bifsim/lipschitz.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "bifsim/error.hpp"
#include "bifsim/montecarlo.hpp"

namespace bifsim {

namespace {

void check_beta(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw ConfigError("Lipschitz constant beta must be positive");
}

SampledPath envelope(const SampledPath& B, double beta, double sign) {
    check_beta(beta);
    B.validate();
    if (B.empty()) throw ConfigError("empty driver");
    const std::size_t n = B.size();
    const auto& t = B.times;
    auto v = [&](std::size_t j) { return sign * B.values[j]; };
    // running argmax of v_j + beta t_j forward and v_j - beta t_j backward
    std::vector<std::size_t> fwd(n), bwd(n);
    fwd[0] = 0;
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t j = fwd[i - 1];
        fwd[i] = v(j) - beta * (t[i] - t[j]) > v(i) ? j : i;
    }
    bwd[n - 1] = n - 1;
    for (std::size_t i = n - 1; i-- > 0;) {
        const std::size_t j = bwd[i + 1];
        bwd[i] = v(j) - beta * (t[j] - t[i]) > v(i) ? j : i;
    }
    SampledPath out;
    out.times = t;
    out.values.resize(n);
    out.kind = PathKind::envelope;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = v(fwd[i]) - beta * (t[i] - t[fwd[i]]);
        const double b = v(bwd[i]) - beta * (t[bwd[i]] - t[i]);
        out.values[i] = sign * std::max(a, b);
    }
    return out;
}

// Mean of the samples with t in [w.t0, w.t1] (uniform grids).
double window_mean(const SampledPath& p, const Window& w, auto&& f) {
    double s = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p.times[i] < w.t0 || p.times[i] > w.t1) continue;
        s += f(i);
        ++n;
    }
    if (n == 0) throw ConfigError("inner window contains no grid points");
    return s / static_cast<double>(n);
}

} // namespace

SampledPath upper_envelope(const SampledPath& driver, double beta) { return envelope(driver, beta, 1.0); }
SampledPath lower_envelope(const SampledPath& driver, double beta) { return envelope(driver, beta, -1.0); }

EnvelopePair envelopes(const SampledPath& driver, double beta, double margin) {
    if (!(margin >= 0.0)) throw ConfigError("margin must be >= 0");
    EnvelopePair e;
    e.upper = upper_envelope(driver, beta);
    e.lower = lower_envelope(driver, beta);
    e.beta = beta;
    e.inner_window = {driver.front_time() + margin, driver.back_time() - margin};
    return e;
}

double default_margin(double beta, double sigma2) { return 10.0 * sigma2 / beta; }

ModelParams xstar_params(double beta, double sigma2) {
    check_beta(beta);
    ModelParams p;
    p.beta1 = -beta;
    p.beta2 = beta;
    p.sigma2 = sigma2;
    return p;
}

XStarResult find_xstar_bisection(double beta, const SampledPath& driver, double tol, double bound,
                                 const EscapeOptions& opt) {
    check_beta(beta);
    if (!(tol > 0.0)) throw ConfigError("tol must be positive");
    driver.validate();
    if (driver.size() < 2) throw ConfigError("driver needs at least two samples");
    // a deterministic driver gets barriers for unit variance
    ModelParams p = xstar_params(beta, driver.sigma2 > 0.0 ? driver.sigma2 : 1.0);
    p.t0 = driver.front_time();
    const double T = driver.back_time() - p.t0;
    EscapeCriterion crit = EscapeCriterion::for_params(p, bound, T);

    double maxabs = 0.0;
    for (double b : driver.values) maxabs = std::max(maxabs, std::abs(b));
    XStarResult r;
    r.lo = -(maxabs + beta * T);
    r.hi = maxabs + beta * T;

    FixedDriver d(driver);
    while (r.hi - r.lo > tol) {
        const double mid = r.lo + 0.5 * (r.hi - r.lo);
        if (mid <= r.lo || mid >= r.hi) break;
        p.x0 = mid;
        const Direction dir = run_to_escape(p, d, crit, opt).direction;
        if (dir == Direction::none)
            throw HorizonExceeded("the solution from " + std::to_string(mid) +
                                      " has not escaped by the end of the driver; enlarge the horizon",
                                  r.hi - r.lo);
        (dir == Direction::positive ? r.hi : r.lo) = mid;
        ++r.iterations;
    }
    r.x_bar = r.lo + 0.5 * (r.hi - r.lo);
    p.x0 = r.x_bar;
    r.path = solve(p, driver);

    const double half = p.t0 + 0.5 * T;
    const SampledPath& X = r.path.base;
    bool met = false;
    double prev = 0.0;
    bool have_prev = false;
    for (std::size_t i = 0; i < X.size() && !met; ++i) {
        if (X.times[i] < half) continue;
        const double y = driver.at(X.times[i]) - X.values[i];
        if (y == 0.0 || (have_prev && (y > 0.0) != (prev > 0.0))) met = true;
        prev = y;
        have_prev = true;
    }
    r.horizon_flag = !met;
    return r;
}

StationaryPair sample_stationary_pair(double beta, double sigma2, double T, std::size_t n_steps,
                                      const Seed& seed, int refine_levels) {
    check_beta(beta);
    if (!(sigma2 > 0.0)) throw ConfigError("sigma2 must be positive");
    if (!(T > 0.0) || n_steps == 0) throw ConfigError("need T > 0 and n_steps > 0");
    if (refine_levels < 0) throw ConfigError("refine_levels must be >= 0");

    const SampledPath Bh = sample_brownian(GridSpec{0.0, T, n_steps}, sigma2, seed);
    RandomStream rs(seed.with_lane(2));
    const double mag = rs.exponential(sigma2 / (2.0 * beta));
    const double y0 = rs.uniform() < 0.5 ? -mag : mag;

    ModelParams p;
    p.beta1 = beta;
    p.beta2 = -beta;
    p.sigma2 = sigma2;
    p.x0 = -y0;
    IntegratorOptions io;
    io.t_end = T;
    if (refine_levels > 0) {
        io.refine.enabled = true;
        io.refine.seed = seed.with_lane(3).key();
        io.refine.sigma2 = sigma2;
        io.refine.max_level = refine_levels;
    }
    FixedDriver d(Bh);
    Integrator it(p, d, io);
    const std::size_t n = Bh.size();
    std::vector<double> Xh(n);
    Xh[0] = p.x0;
    std::size_t j = 1;
    Piece pc;
    while (j < n && it.next(pc)) {
        while (j < n && pc.t1 >= Bh.times[j]) {
            const double tj = Bh.times[j];
            Xh[j] = pc.t1 == tj ? pc.x1 : pc.x0 + (pc.x1 - pc.x0) * (tj - pc.t0) / (pc.t1 - pc.t0);
            ++j;
        }
    }
    if (j < n) throw NumericalError("stationary pair: integrator stopped before the end of the window");

    StationaryPair out;
    out.y0 = y0;
    const double BT = Bh.values[n - 1];
    out.driver.times.resize(n);
    out.driver.values.resize(n);
    out.xstar.times.resize(n);
    out.xstar.values.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t r = n - 1 - k;
        const double t = k == 0 ? 0.0 : T - Bh.times[r];
        out.driver.times[k] = t;
        out.xstar.times[k] = t;
        out.driver.values[k] = Bh.values[r] - BT;
        out.xstar.values[k] = Xh[r] - BT;
    }
    out.driver.kind = PathKind::driver;
    out.driver.sigma2 = sigma2;
    out.xstar.kind = PathKind::solution;
    return out;
}

Window inner_window(const SampledPath& path, double margin) {
    if (!(margin >= 0.0)) throw ConfigError("margin must be >= 0");
    if (path.empty()) throw ConfigError("empty path");
    const Window w{path.front_time() + margin, path.back_time() - margin};
    if (w.empty()) throw ConfigError("inner window is empty; reduce the margin or lengthen T");
    return w;
}

PairGaps pair_gaps(const StationaryPair& pair, double beta, const Window& window) {
    const SampledPath& B = pair.driver;
    if (B.times != pair.xstar.times) throw ConfigError("pair paths must share one grid");
    const SampledPath up = upper_envelope(B, beta);
    const SampledPath lo = lower_envelope(B, beta);
    PairGaps g;
    g.abs_gap = window_mean(B, window, [&](std::size_t i) { return std::abs(B.values[i] - pair.xstar.values[i]); });
    g.upper = window_mean(B, window, [&](std::size_t i) { return up.values[i] - B.values[i]; });
    g.lower = window_mean(B, window, [&](std::size_t i) { return B.values[i] - lo.values[i]; });
    g.width = window_mean(B, window, [&](std::size_t i) { return up.values[i] - lo.values[i]; });
    return g;
}

GapEstimates gap_statistics(const std::vector<PairGaps>& per_trial, double beta, double sigma2,
                            const Window& window) {
    check_beta(beta);
    if (per_trial.empty()) throw ConfigError("no trials");
    const std::size_t n = per_trial.size();
    std::vector<double> a(n), u(n), l(n), w(n);
    for (std::size_t k = 0; k < n; ++k) {
        a[k] = per_trial[k].abs_gap;
        u[k] = per_trial[k].upper;
        l[k] = per_trial[k].lower;
        w[k] = per_trial[k].width;
    }
    GapEstimates g;
    g.window = window;
    const double s = sigma2 / beta;
    g.abs_gap = estimate(a, 0, 0.5 * s);
    g.upper = estimate(u, 0, 0.75 * s);
    g.lower = estimate(l, 0, 0.75 * s);
    g.width = estimate(w, 0, 1.5 * s);
    g.low_statistics = n < 30 || window.t1 - window.t0 < 10.0 * sigma2 / (beta * beta);
    return g;
}

GapEstimates gap_statistics(const std::vector<StationaryPair>& pairs, double beta, double sigma2,
                            double margin) {
    check_beta(beta);
    if (pairs.empty()) throw ConfigError("no stationary pairs");
    const Window w = inner_window(pairs.front().driver, margin);
    std::vector<PairGaps> g;
    g.reserve(pairs.size());
    for (const auto& p : pairs) g.push_back(pair_gaps(p, beta, w));
    return gap_statistics(g, beta, sigma2, w);
}

GapEstimates gap_ensemble(double beta, double sigma2, double T, std::size_t n_steps, std::size_t trials,
                          std::uint64_t master, double margin) {
    if (trials == 0) throw ConfigError("trials must be positive");
    const Window w{margin, T - margin};
    if (!(margin >= 0.0) || w.empty()) throw ConfigError("inner window is empty; reduce the margin or lengthen T");
    const auto g = run_trials<PairGaps>(trials, [&](std::size_t i) {
        return pair_gaps(sample_stationary_pair(beta, sigma2, T, n_steps, Seed{master, i, 0}), beta, w);
    });
    auto est = gap_statistics(g, beta, sigma2, w);
    for (McEstimate* m : {&est.abs_gap, &est.upper, &est.lower, &est.width}) m->master_seed = master;
    return est;
}

std::vector<GrowthPoint> log_growth_estimate(const SampledPath& gap) {
    gap.validate();
    std::vector<GrowthPoint> out;
    if (gap.empty()) return out;
    const double end = gap.back_time();
    for (double lo = 4.0; lo < end; lo *= 2.0) {
        GrowthPoint g{lo, std::min(2.0 * lo, end), 0.0};
        for (std::size_t i = 0; i < gap.size(); ++i) {
            const double t = gap.times[i];
            if (t < g.t_lo || t > g.t_hi) continue;
            g.value = std::max(g.value, gap.values[i] / std::log(t));
        }
        out.push_back(g);
    }
    return out;
}

SampledPath abs_difference(const SampledPath& a, const SampledPath& b) {
    if (a.times != b.times) throw ConfigError("paths must share one grid");
    SampledPath out;
    out.times = a.times;
    out.values.resize(a.size());
    out.kind = PathKind::difference;
    for (std::size_t i = 0; i < a.size(); ++i) out.values[i] = std::abs(a.values[i] - b.values[i]);
    return out;
}

void write_envelope_csv(std::ostream& os, const SampledPath& driver, const EnvelopePair& env) {
    os << "t,B,Zplus,Zminus\n";
    os.precision(17);
    for (std::size_t i = 0; i < driver.size(); ++i)
        os << driver.times[i] << ',' << driver.values[i] << ',' << env.upper.values[i] << ','
           << env.lower.values[i] << '\n';
}

void write_pair_csv(std::ostream& os, const StationaryPair& pair) {
    os << "t,B,Xstar\n";
    os.precision(17);
    for (std::size_t i = 0; i < pair.driver.size(); ++i)
        os << pair.driver.times[i] << ',' << pair.driver.values[i] << ',' << pair.xstar.values[i] << '\n';
}

} // namespace bifsim
