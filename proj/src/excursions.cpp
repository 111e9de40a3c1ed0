#include "bifsim/excursions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "bifsim/error.hpp"
#include "bifsim/montecarlo.hpp"

namespace bifsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int sign_of(double y) { return y > 0.0 ? 1 : (y < 0.0 ? -1 : 0); }

// int_t^inf s^(-3/2) exp(-c s) ds
double tail_integral(double t, double c) {
    if (std::isinf(t)) return 0.0;
    if (c == 0.0) return 2.0 / std::sqrt(t);
    return 2.0 * std::exp(-c * t) / std::sqrt(t) - 2.0 * std::sqrt(std::numbers::pi * c) * std::erfc(std::sqrt(c * t));
}

BifurcationReport to_report(const EscapeTrace& tr) {
    BifurcationReport r;
    r.direction = tr.direction;
    r.T_star = tr.T_star;
    r.L_at_Tstar = tr.L_occupation;
    r.escape_time = tr.escape_time;
    r.epsilon = tr.epsilon;
    r.singular_contacts = tr.singular_contacts;
    return r;
}

} // namespace

double default_resolution(double sigma2, double dt) { return 4.0 * std::sqrt(sigma2 * dt); }

std::vector<ExcursionRecord> decompose(const SampledPath& Y, double resolution, const LocalTimeCurve* L) {
    if (!(resolution >= 0.0)) throw ConfigError("resolution must be >= 0");
    std::vector<ExcursionRecord> out;
    if (Y.empty()) return out;
    auto Lat = [&](double t) { return L ? L->at(t) : std::numeric_limits<double>::quiet_NaN(); };

    ExcursionRecord cur;
    bool active = false;
    auto close = [&](double t_end) {
        cur.t_end = t_end;
        cur.lifetime = t_end - cur.t_start;
        if (cur.height >= resolution && cur.height > 0.0) out.push_back(cur);
        active = false;
    };
    auto open_at = [&](double t, int s) {
        cur = ExcursionRecord{};
        cur.t_start = t;
        cur.sign = s;
        cur.L_start = Lat(t);
        active = true;
    };

    if (sign_of(Y.values[0]) != 0) {
        open_at(Y.times[0], sign_of(Y.values[0]));
        cur.height = std::abs(Y.values[0]);
    }
    for (std::size_t k = 1; k < Y.size(); ++k) {
        const double y0 = Y.values[k - 1], y1 = Y.values[k];
        const int s0 = sign_of(y0), s1 = sign_of(y1);
        if (s0 != 0 && s1 != 0 && s0 != s1) {
            const double tz = Y.times[k - 1] + (Y.times[k] - Y.times[k - 1]) * (y0 / (y0 - y1));
            if (active) close(tz);
            open_at(tz, s1);
        } else if (s1 == 0) {
            if (active) close(Y.times[k]);
            continue;
        } else if (s0 == 0) {
            open_at(Y.times[k - 1], s1);
        }
        cur.height = std::max(cur.height, std::abs(y1));
    }
    if (active && cur.height >= resolution && cur.height > 0.0) {
        cur.t_end = Y.times.back();
        cur.lifetime = kInf;
        cur.open = true;
        out.push_back(cur);
    }
    return out;
}

void write_csv(std::ostream& os, const std::vector<ExcursionRecord>& records) {
    const auto old = os.precision(17);
    os << "t_start,t_end,sign,height,lifetime,L_start\n";
    for (const auto& r : records) {
        os << r.t_start << ',' << r.t_end << ',' << (r.sign > 0 ? '+' : '-') << ',' << r.height << ',';
        if (r.open)
            os << "inf";
        else
            os << r.lifetime;
        os << ',' << r.L_start << '\n';
    }
    os.precision(old);
}

BifurcationReport detect_bifurcation(const ModelParams& params, const SampledPath& driver,
                                     const EscapeCriterion& criterion, const EscapeOptions& opt) {
    FixedDriver d(driver);
    EscapeCriterion c = criterion;
    c.horizon = std::min(c.horizon, driver.back_time() - params.t0);
    return to_report(run_to_escape(params, d, c, opt));
}

BifurcationReport detect_bifurcation(const ModelParams& params, double dt, const Seed& seed,
                                     const EscapeCriterion& criterion, const EscapeOptions& opt) {
    BrownianExtender d(dt, params.sigma2, seed);
    return to_report(run_to_escape(params, d, criterion, opt));
}

std::vector<BifurcationReport> bifurcation_ensemble(const ModelParams& params, double dt,
                                                    std::size_t trials, std::uint64_t master,
                                                    const EscapeCriterion& criterion,
                                                    const EscapeOptions& opt) {
    params.validate();
    criterion.validate();
    if (trials == 0) throw ConfigError("trials must be positive");
    return run_trials<BifurcationReport>(trials, [&](std::size_t i) {
        return detect_bifurcation(params, dt, Seed{master, i, 0}, criterion, opt);
    });
}

double terminal_local_time(const ModelParams& params, DriverSource& driver,
                           const EscapeCriterion& criterion, const EscapeOptions& opt) {
    const EscapeTrace tr = run_to_escape(params, driver, criterion, opt);
    if (tr.direction == Direction::none)
        throw HorizonExceeded("no bifurcation before the horizon", tr.L_occupation);
    return tr.L_occupation;
}

double lifetime_mass(double a, double b, double beta, double sigma2) {
    if (!(a > 0.0) || !(b > a)) throw ConfigError("lifetime bin must satisfy 0 < a < b");
    const double c = beta * beta / (2.0 * sigma2);
    return (tail_integral(a, c) - tail_integral(b, c)) / std::sqrt(2.0 * std::numbers::pi * sigma2);
}

LifetimeStats excursion_lifetime_stats(const std::vector<ExcursionRecord>& records, double local_time,
                                       const ModelParams& params, const std::vector<double>& edges) {
    if (!(params.beta1 > 0.0 && params.beta2 < 0.0))
        throw SemanticsError("lifetime statistics need beta1 > 0 > beta2 so that every excursion ends");
    if (edges.empty() || !(edges.front() > 0.0)) throw ConfigError("lifetime edges must be positive");
    for (std::size_t i = 1; i < edges.size(); ++i)
        if (!(edges[i] > edges[i - 1])) throw ConfigError("lifetime edges must increase");

    LifetimeStats st;
    st.local_time = local_time;
    st.theory_mean = 1.0 / params.beta1 - 1.0 / params.beta2;
    st.edges = edges;
    st.observed.assign(edges.size(), 0.0);
    std::vector<double> total_lifetimes;
    for (const auto& r : records) {
        if (r.open) continue;
        ++st.n;
        total_lifetimes.push_back(r.lifetime);
        if (r.lifetime < edges.front()) continue;
        const auto it = std::upper_bound(edges.begin(), edges.end(), r.lifetime);
        st.observed[static_cast<std::size_t>(it - edges.begin()) - 1] += 1.0;
    }
    if (st.n == 0 || !(local_time > 0.0)) {
        st.low_statistics = true;
        return st;
    }
    st.mean_per_unit_L = pairwise_sum(total_lifetimes) / local_time;

    std::vector<double> raw(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const double b = i + 1 < edges.size() ? edges[i + 1] : kInf;
        raw[i] = local_time * (lifetime_mass(edges[i], b, params.beta1, params.sigma2) +
                               lifetime_mass(edges[i], b, params.beta2, params.sigma2));
    }
    const double obs_total = pairwise_sum(st.observed);
    const double raw_total = pairwise_sum(raw);
    st.intensity_ratio = obs_total / raw_total;
    st.expected.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) st.expected[i] = raw[i] * obs_total / raw_total;
    if (obs_total < 50.0) {
        st.low_statistics = true;
        return st;
    }
    st.chi_square = chi_square_gof(st.observed, st.expected, 5.0, 1);
    return st;
}

} // namespace bifsim
