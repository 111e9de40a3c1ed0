#include "bifsim/rayknight.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "bifsim/analytics.hpp"
#include "bifsim/error.hpp"
#include "bifsim/localtime.hpp"
#include "bifsim/montecarlo.hpp"
#include "bifsim/solver.hpp"
#include "bifsim/stats.hpp"

namespace bifsim {

namespace {

void check_grid(const std::vector<double>& xs) {
    if (xs.empty()) throw ConfigError("x_grid must not be empty");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1])) throw ConfigError("x_grid must be strictly increasing");
}

struct Accum {
    std::vector<double> d;
    std::vector<double> th_drift;
    std::vector<double> th_var;
};

RkRow summarize(double lo, double hi, const Accum& a, double delta, bool has_var_theory) {
    RkRow r;
    r.bin_lo = lo;
    r.bin_hi = hi;
    r.n = a.d.size();
    if (r.n == 0) {
        r.emp_drift = r.emp_var = r.se_drift = r.se_var = std::numeric_limits<double>::quiet_NaN();
        r.theory_drift = r.theory_var = std::numeric_limits<double>::quiet_NaN();
        return r;
    }
    const auto e = estimate(a.d);
    r.emp_drift = e.mean / delta;
    r.se_drift = e.stderr_ / delta;
    r.theory_drift = pairwise_sum(a.th_drift) / static_cast<double>(r.n);
    r.theory_var = has_var_theory ? pairwise_sum(a.th_var) / static_cast<double>(r.n)
                                  : std::numeric_limits<double>::quiet_NaN();
    if (r.n < 2) {
        r.emp_var = r.se_var = std::numeric_limits<double>::quiet_NaN();
        return r;
    }
    const double v = sample_variance(a.d);
    r.emp_var = v / delta;
    // SE of a sample variance from the fourth central moment
    std::vector<double> q(r.n);
    for (std::size_t i = 0; i < r.n; ++i) {
        const double c = a.d[i] - e.mean;
        q[i] = c * c * c * c;
    }
    const double m4 = pairwise_sum(q) / static_cast<double>(r.n);
    r.se_var = std::sqrt(std::max(m4 - v * v, 0.0) / static_cast<double>(r.n)) / delta;
    return r;
}

} // namespace

ProfileSample local_time_profile(const ModelParams& params, DriverSource& driver,
                                 const std::vector<double>& x_grid, const EscapeCriterion& criterion,
                                 const EscapeOptions& opt) {
    check_grid(x_grid);
    ProfileSample s;
    s.x_grid = x_grid;
    s.L_inf.assign(x_grid.size(), 0.0);
    bool have_prev = false;
    bool prev_touched = true;
    double prev_Tstar = 0.0;
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
        const double x = x_grid[i];
        EscapeOptions o = opt;
        if (have_prev && x >= 0.0) {
            if (!prev_touched) continue; // stays 0 from here on
            o.known_side = Direction::positive;
            o.known_after = prev_Tstar;
        }
        const EscapeTrace tr = run_to_escape(params.with_x0(x), driver, criterion, o);
        if (tr.direction == Direction::none)
            throw HorizonExceeded("profile: no bifurcation before the horizon", tr.L_occupation);
        s.L_inf[i] = tr.L_occupation;
        if (x >= 0.0 && tr.direction == Direction::positive) {
            have_prev = true;
            prev_Tstar = tr.T_star;
            prev_touched = tr.T_star > params.t0 || tr.L_occupation > 0.0;
        } else {
            have_prev = false;
        }
    }
    return s;
}

ProfileSample local_time_profile(const ModelParams& params, double dt, const Seed& seed,
                                 const std::vector<double>& x_grid, const EscapeCriterion& criterion,
                                 const EscapeOptions& opt) {
    BrownianExtender d(dt, params.sigma2, seed);
    EscapeOptions o = opt;
    if (o.refine.enabled) {
        o.refine.seed = seed.with_lane(1).key();
        o.refine.sigma2 = params.sigma2;
    }
    ProfileSample s = local_time_profile(params, d, x_grid, criterion, o);
    s.trial_seed = seed;
    return s;
}

RkTable rk_moment_check(const std::vector<ProfileSample>& profiles, const ModelParams& params,
                        double delta, double bin_width, std::size_t max_bins) {
    if (!(delta > 0.0)) throw ConfigError("delta must be positive");
    if (!(bin_width > 0.0)) throw ConfigError("bin width must be positive");
    if (max_bins == 0) throw ConfigError("max_bins must be positive");
    rk_variance(0.0, params); // regime check
    std::vector<Accum> pos(max_bins), neg(max_bins);
    const double tol = 1e-9 * std::max(1.0, delta);
    auto bin_of = [&](double a) {
        return std::min(static_cast<std::size_t>(std::max(a, 0.0) / bin_width), max_bins - 1);
    };
    for (const auto& p : profiles) {
        if (p.x_grid.size() != p.L_inf.size()) throw ConfigError("profile lengths differ");
        for (std::size_t k = 0; k + 1 < p.x_grid.size(); ++k) {
            if (std::abs(p.x_grid[k + 1] - p.x_grid[k] - delta) > tol)
                throw ConfigError("profile grid step differs from delta");
            const double x = p.x_grid[k];
            if (x >= -tol) {
                const double a = p.L_inf[k];
                auto& acc = pos[bin_of(a)];
                acc.d.push_back(p.L_inf[k + 1] - a);
                acc.th_drift.push_back(rk_drift_pos(a, params));
                acc.th_var.push_back(rk_variance(a, params));
            }
            if (std::abs(p.x_grid[k + 1]) <= tol) {
                const double a = p.L_inf[k + 1];
                auto& acc = neg[bin_of(a)];
                acc.d.push_back(p.L_inf[k] - a);
                acc.th_drift.push_back(rk_drift_neg(a, params));
            }
        }
    }
    RkTable t;
    t.delta = delta;
    t.bin_width = bin_width;
    for (std::size_t b = 0; b < max_bins; ++b) {
        const double lo = b * bin_width;
        const double hi = b + 1 == max_bins ? std::numeric_limits<double>::infinity() : lo + bin_width;
        t.positive.push_back(summarize(lo, hi, pos[b], delta, true));
        t.negative.push_back(summarize(lo, hi, neg[b], delta, false));
    }
    return t;
}

void write_csv(std::ostream& os, const std::vector<RkRow>& rows) {
    const auto old = os.precision(17);
    os << "bin_lo,bin_hi,emp_drift,theory_drift,emp_var,theory_var,se_drift,se_var,n\n";
    for (const auto& r : rows)
        os << r.bin_lo << ',' << r.bin_hi << ',' << r.emp_drift << ',' << r.theory_drift << ',' << r.emp_var
           << ',' << r.theory_var << ',' << r.se_drift << ',' << r.se_var << ',' << r.n << '\n';
    os.precision(old);
}

std::vector<double> RkEnsemble::marginal(std::size_t k) const {
    std::vector<double> m;
    m.reserve(values.size());
    for (const auto& v : values) m.push_back(v.at(k));
    return m;
}

RkEnsemble simulate_rk_diffusion(const ModelParams& params, double x_max, double dx, std::uint64_t seed,
                                 std::size_t n, bool deterministic) {
    rk_variance(0.0, params);
    if (!(dx > 0.0) || !(x_max >= 0.0)) throw ConfigError("need dx > 0 and x_max >= 0");
    if (n == 0) throw ConfigError("ensemble size must be positive");
    const auto steps = static_cast<std::size_t>(std::llround(x_max / dx));
    RkEnsemble e;
    for (std::size_t k = 0; k <= steps; ++k) e.x_grid.push_back(k * dx);
    const double mean0 = params.sigma2 / (2.0 * params.beta2);
    e.values = run_trials<std::vector<double>>(n, [&](std::size_t i) {
        RandomStream rng(Seed{seed, i, 0});
        std::vector<double> v(steps + 1);
        double L = rng.exponential(mean0);
        v[0] = L;
        for (std::size_t k = 1; k <= steps; ++k) {
            if (L > 0.0) {
                L += rk_drift_pos(L, params) * dx;
                if (!deterministic) L += std::sqrt(rk_variance(L > 0.0 ? L : 0.0, params) * dx) * rng.normal();
                if (L <= 0.0) L = 0.0;
            }
            v[k] = L;
        }
        return v;
    });
    return e;
}

FlowCheck verify_flow_derivative(const ModelParams& params, const SampledPath& driver, double x1,
                                 double x2, double t_eval, std::size_t n_sub, double eps) {
    if (!(params.beta1 > params.beta2 && params.beta2 > 0.0))
        throw SemanticsError("the flow-derivative identity is stated for beta1 > beta2 > 0");
    if (!(x1 <= x2)) throw ConfigError("need x1 <= x2");
    if (n_sub < 2) throw ConfigError("need at least two quadrature points");
    FlowCheck fc;
    if (x1 == x2) return fc;
    const double dt = driver.times[1] - driver.times[0];
    if (!(eps > 0.0)) eps = default_bandwidth(params.sigma2, dt);
    const double h = (x2 - x1) / static_cast<double>(n_sub - 1);
    const BiasModel bias = BiasModel::of(params);
    std::vector<double> f(n_sub);
    double xa = 0.0, xb = 0.0;
    for (std::size_t i = 0; i < n_sub; ++i) {
        const double x = i + 1 == n_sub ? x2 : x1 + h * static_cast<double>(i);
        const SolutionPath sol = solve(params.with_x0(x), driver, Scheme::maximal, t_eval);
        const SampledPath Y = difference_path(driver, sol.base);
        const double L = occupation_local_time(Y, eps, params.sigma2, bias).final_value();
        fc.x_sub.push_back(x);
        fc.L_sub.push_back(L);
        f[i] = flow_derivative(L, params);
        if (i == 0) xa = sol.base.values.back();
        if (i + 1 == n_sub) xb = sol.base.values.back();
    }
    auto trapezoid = [&](std::size_t stride) {
        double s = 0.5 * (f.front() + f.back());
        for (std::size_t i = stride; i + 1 < n_sub; i += stride) s += f[i];
        return s * h * static_cast<double>(stride);
    };
    fc.lhs = xb - xa;
    fc.rhs = trapezoid(1);
    fc.rel_err = std::abs(fc.lhs - fc.rhs) / std::abs(fc.lhs);
    if ((n_sub - 1) % 2 == 0)
        fc.refine_needed = std::abs(trapezoid(2) - fc.rhs) > 0.01 * (x2 - x1);
    return fc;
}

} // namespace bifsim
