#include "bifsim/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>

#include "bifsim/analytics.hpp"
#include "bifsim/error.hpp"
#include "bifsim/escape.hpp"
#include "bifsim/excursions.hpp"
#include "bifsim/lipschitz.hpp"
#include "bifsim/localtime.hpp"
#include "bifsim/montecarlo.hpp"
#include "bifsim/paths.hpp"
#include "bifsim/rayknight.hpp"
#include "bifsim/solver.hpp"
#include "bifsim/stats.hpp"

namespace bifsim {

namespace {

ModelParams drifts(double b1, double b2, double a1 = 0.0, double a2 = 0.0) {
    ModelParams p;
    p.beta1 = b1;
    p.beta2 = b2;
    p.alpha1 = a1;
    p.alpha2 = a2;
    return p;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct Context {
    std::uint64_t seed;
    std::string csv_dir;
};

CriterionResult start(int id, std::string title, double budget) {
    CriterionResult r;
    r.id = id;
    r.title = std::move(title);
    r.budget_seconds = budget;
    return r;
}

void add(CriterionResult& r, const std::string& name, double v) { r.values.emplace_back(name, v); }

void add(CriterionResult& r, const std::string& prefix, const McEstimate& e) {
    add(r, prefix + "_mean", e.mean);
    add(r, prefix + "_stderr", e.stderr_);
    if (e.theory) add(r, prefix + "_theory", *e.theory);
}

std::vector<double> indicator(const std::vector<BifurcationReport>& reps, Direction d) {
    std::vector<double> v;
    v.reserve(reps.size());
    for (const auto& r : reps) v.push_back(r.direction == d ? 1.0 : 0.0);
    return v;
}

std::size_t undecided(const std::vector<BifurcationReport>& reps) {
    return static_cast<std::size_t>(
        std::count_if(reps.begin(), reps.end(), [](const auto& r) { return r.direction == Direction::none; }));
}

// 1: P(negative) at alpha = 0
CriterionResult bifurcation_probability(const Context& c) {
    auto r = start(1, "bifurcation probability, alpha = 0", 120);
    const auto p = drifts(-2.0, 1.0);
    const auto reps = bifurcation_ensemble(p, 1e-3, 20000, c.seed, EscapeCriterion::for_params(p));
    const auto e = estimate(indicator(reps, Direction::negative), c.seed, p_negative_bifurcation(p));
    const auto none = undecided(reps);
    r.passed = none == 0 && e.within_se(3.0);
    r.summary = fmt("p_negative %.4f +- %.4f vs %.4f (3 SE), undecided %zu", e.mean, e.stderr_, *e.theory, none);
    add(r, "p_negative", e);
    add(r, "undecided", static_cast<double>(none));
    return r;
}

// 2: P(negative) with alpha1 = 1
CriterionResult bifurcation_probability_alpha(const Context& c) {
    auto r = start(2, "bifurcation probability, alpha1 = 1", 300);
    const auto p = drifts(-1.0, 1.0, 1.0, 0.0);
    const auto reps = bifurcation_ensemble(p, 1e-3, 20000, c.seed, EscapeCriterion::for_params(p));
    const auto e = estimate(indicator(reps, Direction::negative), c.seed, p_negative_bifurcation(p));
    // the value quoted in the requirements uses lambda_rate_outer_two
    const double l1 = lambda_rate_outer_two(1.0, 1.0, 1.0);
    const double l2 = lambda_rate(0.0, 1.0, 1.0).value;
    const double quoted = l1 / (l1 + l2);
    const auto none = undecided(reps);
    r.passed = none == 0 && e.within_se(3.0);
    r.summary = fmt("p_negative %.4f +- %.4f vs %.4f (3 SE); quoted %.5f is %.1f SE away, not asserted",
                    e.mean, e.stderr_, *e.theory, quoted, std::abs(e.mean - quoted) / e.stderr_);
    add(r, "p_negative", e);
    add(r, "p_negative_quoted", quoted);
    add(r, "undecided", static_cast<double>(none));
    return r;
}

// 3: E T*
CriterionResult bifurcation_time(const Context& c) {
    auto r = start(3, "expected bifurcation time", 120);
    const auto p = drifts(-1.0, 1.0);
    const auto reps = bifurcation_ensemble(p, 1e-4, 20000, c.seed, EscapeCriterion::for_params(p));
    std::vector<double> t;
    for (const auto& x : reps) t.push_back(x.T_star);
    const auto e = estimate(t, c.seed, expected_bifurcation_time(p));
    const auto none = undecided(reps);
    r.passed = none == 0 && e.within_se(3.0);
    r.summary = fmt("mean T* %.4f +- %.4f vs %.4f (3 SE), undecided %zu", e.mean, e.stderr_, *e.theory, none);
    add(r, "T_star", e);
    return r;
}

// 4: L_T / T with two attracting drifts
CriterionResult local_time_rate_check(const Context& c) {
    auto r = start(4, "local-time rate", 180);
    const auto p = drifts(1.0, -1.0);
    const double T = 200.0, dt = 1e-3;
    const auto rates = run_trials<double>(100, [&](std::size_t i) {
        const auto B = sample_brownian({0.0, T, static_cast<std::size_t>(std::llround(T / dt))}, p.sigma2,
                                       Seed{c.seed, i, 0});
        const auto X = solve(p, B);
        const auto Y = difference_path(B, X.base);
        return occupation_local_time(Y, default_bandwidth(p.sigma2, dt), p.sigma2, BiasModel::of(p))
                   .final_value() /
               T;
    });
    const auto e = estimate(rates, c.seed, local_time_rate(p));
    r.passed = e.within_rel(0.05);
    r.summary = fmt("mean L_T/T %.4f +- %.4f vs %.4f (5%%)", e.mean, e.stderr_, *e.theory);
    add(r, "rate", e);
    return r;
}

// 5: law of L at the bifurcation
CriterionResult terminal_local_time_law(const Context& c) {
    auto r = start(5, "terminal local-time law", 300);
    const auto p = drifts(2.0, 1.0);
    const auto reps = bifurcation_ensemble(p, 1e-4, 5000, c.seed, EscapeCriterion::for_params(p));
    std::vector<double> L;
    for (const auto& x : reps) L.push_back(x.L_at_Tstar);
    const double mean = expected_terminal_local_time(p);
    const auto e = estimate(L, c.seed, mean);
    const auto ks = ks_one_sample(L, [&](double v) { return exponential_cdf(v, mean); });
    const auto none = undecided(reps);
    r.passed = none == 0 && e.within_se(3.0) && ks.p_value > 0.01;
    r.summary = fmt("mean %.4f +- %.4f vs %.4f (3 SE); KS p %.3f (> 0.01)", e.mean, e.stderr_, mean, ks.p_value);
    add(r, "L", e);
    add(r, "ks_p_value", ks.p_value);
    return r;
}

// 6: binned profile moments
CriterionResult ray_knight_moments(const Context& c) {
    auto r = start(6, "local-time profile moments", 1800);
    const auto p = drifts(2.0, 1.0);
    const double dt = 1e-4, delta = 0.01, x_max = 1.5;
    const std::size_t trials = 10000, min_count = 300;
    const int levels = 13;
    std::vector<double> xs;
    for (int k = -1; k * delta <= x_max + 1e-12; ++k) xs.push_back(k * delta);
    EscapeOptions o;
    o.refine.enabled = true;
    o.refine.max_level = levels;
    o.epsilon = 2.0 * std::sqrt(p.sigma2 * dt / std::ldexp(1.0, levels));
    const auto crit = EscapeCriterion::for_params(p);
    const auto prof = run_trials<ProfileSample>(
        trials, [&](std::size_t i) { return local_time_profile(p, dt, Seed{c.seed, i, 0}, xs, crit, o); });
    const auto tab = rk_moment_check(prof, p, delta, 0.1, 20);
    if (!c.csv_dir.empty()) {
        std::ofstream pos(c.csv_dir + "/criterion6_positive.csv"), neg(c.csv_dir + "/criterion6_negative.csv");
        write_csv(pos, tab.positive);
        write_csv(neg, tab.negative);
    }
    std::size_t checked = 0, bad = 0;
    double worst = 0.0;
    for (const auto& row : tab.positive) {
        if (row.n < min_count) continue;
        ++checked;
        const double ed = std::abs(row.emp_drift - row.theory_drift) / std::abs(row.theory_drift);
        const double ev = std::abs(row.emp_var - row.theory_var) / row.theory_var;
        const double e = std::max(ed, ev);
        worst = std::max(worst, e);
        if (!(e <= 0.15)) ++bad;
        add(r, fmt("bin_%.1f_drift", row.bin_lo), row.emp_drift);
        add(r, fmt("bin_%.1f_drift_theory", row.bin_lo), row.theory_drift);
        add(r, fmt("bin_%.1f_var", row.bin_lo), row.emp_var);
        add(r, fmt("bin_%.1f_var_theory", row.bin_lo), row.theory_var);
        add(r, fmt("bin_%.1f_n", row.bin_lo), static_cast<double>(row.n));
    }
    r.passed = checked > 0 && bad == 0;
    r.summary = fmt("%zu bins with >= %zu samples, %zu outside 15%%, worst relative error %.3f", checked, min_count,
                    bad, worst);
    add(r, "bins_checked", static_cast<double>(checked));
    add(r, "worst_relative_error", worst);
    return r;
}

// 7: flow derivative identity
CriterionResult flow_identity(const Context& c) {
    auto r = start(7, "flow-derivative identity", 60);
    const auto p = drifts(2.0, 1.0);
    const auto B = sample_brownian({0.0, 1.0, 10000}, p.sigma2, Seed{c.seed, 0, 0});
    const auto f = verify_flow_derivative(p, B, -0.5, 0.5, 1.0, 21);
    r.passed = f.rel_err < 0.02;
    r.summary = fmt("lhs %.5f rhs %.5f relative error %.4f (< 0.02)", f.lhs, f.rhs, f.rel_err);
    add(r, "lhs", f.lhs);
    add(r, "rhs", f.rhs);
    add(r, "rel_err", f.rel_err);
    return r;
}

// 8: smoothed solutions approach the sharp one
CriterionResult smoothed_convergence(const Context& c) {
    auto r = start(8, "smoothed convergence", 60);
    const auto p = drifts(-1.0, 1.0);
    const auto B = sample_brownian({0.0, 2.0, 2000}, p.sigma2, Seed{c.seed, 0, 0});
    const auto tab = convergence_study(p, B, {0.2, 0.1, 0.05, 0.025, 0.0125});
    const double first = tab.rows.front().sup_gap, last = tab.rows.back().sup_gap;
    r.passed = last < first && last < 0.05 * p.sigma();
    r.summary = fmt("sup gap %.4f at eps 0.2, %.4f at eps 0.0125 (< first and < 0.05 sigma); monotone %s", first,
                    last, tab.monotone ? "yes" : "no");
    for (const auto& row : tab.rows) add(r, fmt("gap_eps_%g", row.epsilon), row.sup_gap);
    add(r, "monotone", tab.monotone ? 1.0 : 0.0);
    return r;
}

// 9: stationary gaps
CriterionResult lipschitz_gaps(const Context& c) {
    auto r = start(9, "Lipschitz gaps", 300);
    const double beta = 1.0, sigma2 = 1.0, T = 200.0, dt = 5e-4;
    const auto g = gap_ensemble(beta, sigma2, T, static_cast<std::size_t>(std::llround(T / dt)), 1000, c.seed,
                                default_margin(beta, sigma2));
    r.passed = !g.low_statistics && g.abs_gap.within_se(3.0) && g.upper.within_rel(0.05);
    r.summary = fmt("E|B - X*| %.4f +- %.4f vs %.4f (3 SE); E(Z+ - B) %.4f vs %.4f (5%%); E(B - Z-) %.4f", g.abs_gap.mean,
                    g.abs_gap.stderr_, *g.abs_gap.theory, g.upper.mean, *g.upper.theory, g.lower.mean);
    add(r, "abs_gap", g.abs_gap);
    add(r, "upper", g.upper);
    add(r, "lower", g.lower);
    add(r, "width", g.width);
    return r;
}

// 10: exact fixtures and oracles
std::string exact_checks(std::uint64_t seed) {
    // Example 2.8: B = 2t on [0, 1] then flat; the maximal solution from 1 is 1 + t
    SampledPath kink;
    for (int k = 0; k <= 10; ++k) kink.push_back(k, k == 0 ? 0.0 : 2.0);
    auto p = drifts(-1.0, 1.0);
    p.x0 = 1.0;
    const auto x = solve(p, kink, Scheme::maximal);
    for (int k = 0; k <= 40; ++k)
        if (x.base.at(k / 4.0) != 1.0 + k / 4.0) return "kink fixture: maximal solution differs from 1 + t";

    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto B = sample_brownian({0.0, 5.0, 400}, 1.0, Seed{seed, s, 1});
        const double beta = 0.5 + 0.25 * static_cast<double>(s % 5);
        const auto up = upper_envelope(B, beta), lo = lower_envelope(B, beta);
        for (std::size_t i = 0; i < B.size(); ++i) {
            double mx = -std::numeric_limits<double>::infinity(), mn = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < B.size(); ++j) {
                const double d = beta * (j <= i ? B.times[i] - B.times[j] : B.times[j] - B.times[i]);
                mx = std::max(mx, B.values[j] - d);
                mn = std::min(mn, B.values[j] + d);
            }
            if (up.values[i] != mx || lo.values[i] != mn) return "envelope differs from the quadratic oracle";
        }
    }

    for (auto q : {drifts(2.0, 1.0), drifts(5.0, 0.5)}) {
        for (double a = 0.0; a < 20.0; a += 0.137) {
            if (std::abs(rk_drift_neg(a, q) - rk_drift_pos(a, q) - 1.0) > 1e-12)
                return "profile drifts do not differ by 1";
            if (std::abs(rk_drift_pos(a, q) + q.beta1 * rk_variance(a, q)) > 1e-12)
                return "profile drift is not -beta1 times the variance";
        }
    }
    for (auto q : {drifts(-1.0, 1.0), drifts(2.0, 1.0), drifts(-1.0, -2.0), drifts(-0.5, 3.0)}) {
        const double closed = expected_bifurcation_time(q), quad = expected_bifurcation_time_quadrature(q);
        if (std::abs(quad - closed) > 1e-8 * closed) return "bifurcation time quadrature differs from closed form";
    }
    for (double b : {0.5, 1.0, 3.0}) {
        const double closed = lambda_rate(0.0, b, 1.0).value, quad = lambda_rate_quadrature(0.0, b, 1.0);
        if (std::abs(quad - closed) > 1e-8 * closed) return "lambda quadrature differs from closed form";
    }

    // flows on random fixtures: monotone in x for every sign pattern,
    // 1-Lipschitz in x when beta1 >= beta2
    RandomStream rng(Seed{seed, 0, 2});
    std::vector<double> xs;
    for (int i = -5; i <= 5; ++i) xs.push_back(0.1 * i);
    for (std::uint64_t s = 0; s < 100; ++s) {
        auto q = drifts(4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0);
        if (s % 2 == 0 && q.beta1 < q.beta2) std::swap(q.beta1, q.beta2);
        const auto B = sample_brownian({0.0, 1.0, 1000}, 1.0, Seed{seed, s, 3});
        const auto f = solve_flow(q, B, xs, 1.0, true);
        for (std::size_t i = 1; i < xs.size(); ++i) {
            for (double t : B.times) {
                const double d = f.paths[i].base.at(t) - f.paths[i - 1].base.at(t);
                if (d < 0.0) return fmt("flow not monotone on random fixture %llu", (unsigned long long)s);
                if (q.beta1 >= q.beta2 && d > xs[i] - xs[i - 1] + 1e-12)
                    return fmt("flow expands on random fixture %llu", (unsigned long long)s);
            }
        }
    }
    return {};
}

CriterionResult exact_fixtures(const Context& c) {
    auto r = start(10, "exact fixtures and oracles", 30);
    const auto err = exact_checks(c.seed);
    r.passed = err.empty();
    r.summary = err.empty() ? "kink fixture, envelope oracle, analytic identities, 100 random flows" : err;
    return r;
}

// 11: log growth brackets on one long pair
CriterionResult log_growth(const Context& c) {
    auto r = start(11, "log-growth brackets", 120);
    const double beta = 1.0;
    const auto pr = sample_stationary_pair(beta, 1.0, 1e4, 1000000, Seed{c.seed, 0, 0});
    const auto gx = log_growth_estimate(abs_difference(pr.driver, pr.xstar));
    const auto gl = log_growth_estimate(abs_difference(lower_envelope(pr.driver, beta), pr.driver));
    const auto gu = log_growth_estimate(abs_difference(upper_envelope(pr.driver, beta), pr.driver));
    if (!c.csv_dir.empty()) {
        std::ofstream os(c.csv_dir + "/criterion11_growth.csv");
        os.precision(17);
        os << "t_lo,t_hi,xstar_gap,lower_envelope_gap,upper_envelope_gap\n";
        for (std::size_t k = 0; k < gx.size(); ++k)
            os << gx[k].t_lo << ',' << gx[k].t_hi << ',' << gx[k].value << ',' << gl[k].value << ','
               << gu[k].value << '\n';
    }
    const double x = gx.back().value, l = gl.back().value;
    r.passed = x >= 0.25 && x <= 0.9 && l >= 0.125;
    r.summary = fmt("final max|B - X*|/log t %.3f in [0.25, 0.9]; max|Z- - B|/log t %.3f >= 0.125; "
                    "max|Z+ - B|/log t %.3f (recorded)",
                    x, l, gu.back().value);
    for (std::size_t k = 0; k < gx.size(); ++k) {
        add(r, fmt("xstar_window_%g", gx[k].t_lo), gx[k].value);
        add(r, fmt("lower_window_%g", gl[k].t_lo), gl[k].value);
        add(r, fmt("upper_window_%g", gu[k].t_lo), gu[k].value);
    }
    return r;
}

using Runner = CriterionResult (*)(const Context&);
constexpr Runner kRunners[kCriterionCount] = {
    bifurcation_probability, bifurcation_probability_alpha, bifurcation_time, local_time_rate_check,
    terminal_local_time_law, ray_knight_moments,           flow_identity,    smoothed_convergence,
    lipschitz_gaps,          exact_fixtures,               log_growth};

} // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt) {
    std::vector<int> ids = opt.only;
    if (ids.empty())
        for (int k = 1; k <= kCriterionCount; ++k) ids.push_back(k);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    for (int k : ids)
        if (k < 1 || k > kCriterionCount) throw ConfigError("criterion id out of range: " + std::to_string(k));
    if (!opt.csv_dir.empty()) std::filesystem::create_directories(opt.csv_dir);

    std::vector<CriterionResult> out;
    for (int k : ids) {
        const Context ctx{opt.seed + static_cast<std::uint64_t>(k), opt.csv_dir};
        const auto t0 = std::chrono::steady_clock::now();
        CriterionResult r;
        try {
            r = kRunners[k - 1](ctx);
        } catch (const std::exception& e) {
            r.id = k;
            r.passed = false;
            r.summary = std::string("error: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (opt.progress) *opt.progress << format_line(r) << std::endl;
        out.push_back(std::move(r));
    }
    return out;
}

std::string format_line(const CriterionResult& r) {
    std::ostringstream os;
    os << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << ' ' << r.title << ": " << r.summary
       << fmt(" (%.1f s, budget %.0f s)", r.seconds, r.budget_seconds);
    return os.str();
}

std::vector<int> parse_criteria(const std::string& list) {
    std::vector<int> ids;
    std::stringstream ss(list);
    std::string item;
    auto to_int = [&](const std::string& s) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size()) throw ConfigError("bad criterion list: " + list);
        return v;
    };
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto dash = item.find('-');
        if (dash == std::string::npos) {
            ids.push_back(to_int(item));
        } else {
            const int a = to_int(item.substr(0, dash)), b = to_int(item.substr(dash + 1));
            if (a > b) throw ConfigError("bad criterion range: " + item);
            for (int k = a; k <= b; ++k) ids.push_back(k);
        }
    }
    for (int k : ids)
        if (k < 1 || k > kCriterionCount) throw ConfigError("criterion id out of range: " + std::to_string(k));
    return ids;
}

} // namespace bifsim
