#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <tuple>

#include "bifsim/acceptance.hpp"
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

#ifndef BIFSIM_VERSION
#define BIFSIM_VERSION "unknown"
#endif

namespace bifcli {

using namespace bifsim;
using json = nlohmann::ordered_json;

namespace {

struct Check {
    std::string name;
    bool passed;
    std::string detail;
};

class Report {
public:
    Report(std::string command, const RunConfig& cfg) : cfg_(cfg) {
        doc_["command"] = std::move(command);
        doc_["version"] = BIFSIM_VERSION;
        doc_["seed"] = cfg.seed;
        doc_["config"] = to_json(cfg);
        doc_["results"] = json::object();
    }

    json& results() { return doc_["results"]; }

    /// Estimate with its theory column; asserted when assert_se > 0.
    void estimate(const std::string& name, const McEstimate& e) {
        json j;
        j["mean"] = e.mean;
        j["stderr"] = e.stderr_;
        j["n_trials"] = e.n_trials;
        j["master_seed"] = e.master_seed;
        j["theory"] = e.theory ? json(*e.theory) : json(nullptr);
        j["z_score"] = e.z_score ? json(*e.z_score) : json(nullptr);
        results()[name] = j;
        if (cfg_.assert_se > 0.0 && e.theory) {
            std::ostringstream d;
            d << "mean " << e.mean << " theory " << *e.theory << " stderr " << e.stderr_;
            check(name, e.within_se(cfg_.assert_se), d.str());
        }
    }

    void check(const std::string& name, bool ok, const std::string& detail) { checks_.push_back({name, ok, detail}); }

    void table(const std::string& name, std::function<void(std::ostream&)> write) {
        tables_.emplace_back(name, std::move(write));
    }

    int finish(std::ostream& os, std::ostream& log) {
        json c = json::array();
        bool all = true;
        for (const auto& k : checks_) {
            c.push_back({{"name", k.name}, {"passed", k.passed}, {"detail", k.detail}});
            all = all && k.passed;
            if (!k.passed) log << "FAILED: " << k.name << " (" << k.detail << ")\n";
        }
        doc_["checks"] = c;
        doc_["passed"] = all;
        if (cfg_.out.empty()) {
            os << doc_.dump(2) << '\n';
        } else {
            write_file(cfg_.out + ".json", [&](std::ostream& f) { f << doc_.dump(2) << '\n'; });
            for (const auto& [name, w] : tables_) write_file(cfg_.out + "_" + name + ".csv", w);
            log << "wrote " << cfg_.out << ".json";
            if (!tables_.empty()) log << " and " << tables_.size() << " csv file(s)";
            log << '\n';
        }
        return all ? 0 : 1;
    }

private:
    static void write_file(const std::string& path, const std::function<void(std::ostream&)>& w) {
        std::ofstream f(path);
        if (!f) throw ConfigError("cannot write " + path);
        w(f);
    }

    const RunConfig& cfg_;
    json doc_;
    std::vector<Check> checks_;
    std::vector<std::pair<std::string, std::function<void(std::ostream&)>>> tables_;
};

double horizon_or(const RunConfig& c, double fallback) { return c.has("horizon") ? c.horizon : fallback; }

std::size_t steps(double T, double dt) { return static_cast<std::size_t>(std::max(1.0, std::round(T / dt))); }

SampledPath make_driver(const RunConfig& c, std::uint64_t trial = 0) {
    if (!c.driver.empty()) {
        const bool bin = c.driver.size() > 4 && c.driver.compare(c.driver.size() - 4, 4, ".bin") == 0;
        std::ifstream is(c.driver, bin ? std::ios::binary : std::ios::in);
        if (!is) throw ConfigError("cannot read driver " + c.driver);
        return bin ? read_binary(is) : read_csv(is);
    }
    const double T = horizon_or(c, 10.0);
    return sample_brownian({c.params.t0, c.params.t0 + T, steps(T, c.dt)}, c.params.sigma2, Seed{c.seed, trial, 0});
}

SolutionPath solve_with(const RunConfig& c, const SampledPath& B) {
    switch (parse_scheme(c.scheme)) {
    case Scheme::smoothed:
        return solve_smoothed(c.params, B, c.width);
    case Scheme::delta_push:
        return solve_delta(c.params, B, c.width);
    default:
        return c.params.piecewise_constant() ? solve(c.params, B, parse_scheme(c.scheme))
                                              : solve_general(c.params, B, 1e-10, parse_scheme(c.scheme));
    }
}

EscapeCriterion criterion_for(const RunConfig& c, double horizon) {
    return c.barrier > 0.0 ? EscapeCriterion::with_barrier(c.params, c.barrier, horizon)
                           : EscapeCriterion::for_params(c.params, c.bound, horizon);
}

double bandwidth(const RunConfig& c, double dt) {
    return c.epsilon > 0.0 ? c.epsilon : default_bandwidth(c.params.sigma2, dt);
}

double first_step(const SampledPath& B) { return B.size() > 1 ? B.times[1] - B.times[0] : 0.0; }

std::optional<double> theory(const std::function<double()>& f) {
    try {
        return f();
    } catch (const SemanticsError&) {
        return std::nullopt;
    }
}

json value_or_null(const std::function<double()>& f) {
    const auto v = theory(f);
    return v ? json(*v) : json(nullptr);
}

int cmd_gen(const RunConfig& c, std::ostream& os, std::ostream& log) {
    Report r("gen", c);
    RunConfig fresh = c;
    fresh.driver.clear();
    const auto B = make_driver(fresh);
    double qv = 0.0;
    for (std::size_t i = 1; i < B.size(); ++i) qv += std::pow(B.values[i] - B.values[i - 1], 2);
    const double T = B.times.back() - B.times.front();
    auto& res = r.results();
    res["n_steps"] = B.size() - 1;
    res["t_end"] = B.times.back();
    res["final_value"] = B.values.back();
    res["quadratic_variation_rate"] = {{"estimate", qv / T}, {"theory", c.params.sigma2}};
    r.table("path", [B](std::ostream& f) { write_csv(f, B, "B"); });
    return r.finish(os, log);
}

int cmd_solve(const RunConfig& c, std::ostream& os, std::ostream& log) {
    Report r("solve", c);
    const auto B = make_driver(c);
    const auto X = solve_with(c, B);
    double contact_time = 0.0;
    for (const auto& iv : X.contact_set) contact_time += iv.exit - iv.enter;
    auto& res = r.results();
    res["scheme"] = to_string(X.scheme);
    res["final_x"] = X.base.values.back();
    res["final_b"] = B.values.back();
    res["lipschitz_constant"] = {{"estimate", lipschitz_constant(X.base)},
                                 {"theory_bound", c.params.piecewise_constant() ? json(c.params.max_speed())
                                                                                : json(nullptr)}};
    res["contact_intervals"] = X.contact_set.size();
    res["contact_time"] = contact_time;
    res["singular_contacts"] = X.singular_contacts;
    r.table("solution", [B, X](std::ostream& f) {
        f.precision(17);
        f << "t,B,X\n";
        for (std::size_t i = 0; i < X.base.size(); ++i)
            f << X.base.times[i] << ',' << B.at(X.base.times[i]) << ',' << X.base.values[i] << '\n';
    });
    r.table("contacts", [X](std::ostream& f) { write_contact_csv(f, X); });
    return r.finish(os, log);
}

int cmd_bifurcate(const RunConfig& c, std::ostream& os, std::ostream& log) {
    Report r("bifurcate", c);
    const auto crit = criterion_for(c, horizon_or(c, 1e4));
    EscapeOptions o;
    o.scheme = parse_scheme(c.scheme);
    o.epsilon = c.epsilon;
    if (o.scheme == Scheme::smoothed || o.scheme == Scheme::delta_push)
        throw ConfigError("bifurcate supports the maximal and minimal schemes");
    const auto reps = bifurcation_ensemble(c.params, c.dt, c.trials, c.seed, crit, o);
    std::vector<double> neg, tstar, L;
    std::size_t none = 0;
    for (const auto& x : reps) {
        neg.push_back(x.direction == Direction::negative ? 1.0 : 0.0);
        tstar.push_back(x.T_star);
        L.push_back(x.L_at_Tstar);
        none += x.direction == Direction::none;
    }
    auto& res = r.results();
    res["barrier_upper"] = std::isinf(crit.barrier_upper) ? json(nullptr) : json(crit.barrier_upper);
    res["barrier_lower"] = std::isinf(crit.barrier_lower) ? json(nullptr) : json(crit.barrier_lower);
    res["undecided"] = none;
    r.estimate("p_negative", estimate(neg, c.seed, theory([&] { return p_negative_bifurcation(c.params); })));
    r.estimate("T_star", estimate(tstar, c.seed, theory([&] { return expected_bifurcation_time(c.params); })));
    r.estimate("L_at_T_star",
               estimate(L, c.seed, theory([&] { return expected_terminal_local_time(c.params); })));
    if (c.assert_se > 0.0) r.check("undecided", none == 0, std::to_string(none) + " trials reached the horizon");
    r.table("trials", [reps](std::ostream& f) {
        f.precision(17);
        f << "trial,direction,T_star,L,escape_time\n";
        for (std::size_t i = 0; i < reps.size(); ++i)
            f << i << ',' << to_string(reps[i].direction) << ',' << reps[i].T_star << ',' << reps[i].L_at_Tstar
              << ',' << reps[i].escape_time << '\n';
    });
    return r.finish(os, log);
}

struct LocalTimeRun {
    double occupation = 0.0;
    double crossings = 0.0;
    double T = 0.0;
    LocalTimeCurve occ_curve, cross_curve;
    SampledPath Y;
};

LocalTimeRun local_time_run(const RunConfig& c, std::uint64_t trial, bool keep) {
    const auto B = make_driver(c, trial);
    const auto X = solve_with(c, B);
    LocalTimeRun run;
    run.Y = difference_path(B, X.base);
    const double dt = first_step(B), eps = bandwidth(c, dt);
    const auto bias = BiasModel::of(c.params);
    auto occ = occupation_local_time(run.Y, eps, c.params.sigma2, bias);
    auto cr = downcrossing_local_time(run.Y, eps, c.params.sigma2, bias, 2.0 * sampling_overshoot(c.params.sigma2, dt));
    run.occupation = occ.final_value();
    run.crossings = cr.final_value();
    run.T = B.times.back() - B.times.front();
    if (keep) {
        run.occ_curve = std::move(occ);
        run.cross_curve = std::move(cr);
    } else {
        run.Y = {};
    }
    return run;
}

int cmd_localtime(const RunConfig& c, std::ostream& os, std::ostream& log) {
    Report r("localtime", c);
    const std::size_t n = c.driver.empty() ? c.trials : 1;
    const auto runs =
        run_trials<LocalTimeRun>(n, [&](std::size_t i) { return local_time_run(c, i, i == 0); });
    std::vector<double> occ, cross, rate;
    for (const auto& x : runs) {
        occ.push_back(x.occupation);
        cross.push_back(x.crossings);
        rate.push_back(x.occupation / x.T);
    }
    r.results()["T"] = runs[0].T;
    r.estimate("L_T_occupation", estimate(occ, c.seed));
    r.estimate("L_T_crossings", estimate(cross, c.seed));
    r.estimate("rate", estimate(rate, c.seed, theory([&] { return local_time_rate(c.params); })));
    const auto first = runs[0];
    r.table("occupation", [first](std::ostream& f) { write_csv(f, first.occ_curve); });
    r.table("crossings", [first](std::ostream& f) { write_csv(f, first.cross_curve); });
    return r.finish(os, log);
}

int cmd_excursions(const RunConfig& c, std::ostream& os, std::ostream& log) {
    Report r("excursions", c);
    const auto run = local_time_run(c, 0, true);
    const double res_h = c.resolution > 0.0 ? c.resolution : default_resolution(c.params.sigma2, c.dt);
    const auto recs = decompose(run.Y, res_h, &run.occ_curve);
    std::size_t pos = 0, open = 0;
    for (const auto& e : recs) {
        pos += e.sign > 0;
        open += e.open;
    }
    auto& res = r.results();
    res["resolution"] = res_h;
    res["excursions"] = recs.size();
    res["positive"] = pos;
    res["negative"] = recs.size() - pos;
    res["open"] = open;
    res["local_time"] = run.occupation;
    if (c.params.beta1 > 0.0 && c.params.beta2 < 0.0 && c.params.piecewise_constant()) {
        const std::vector<double> edges{0.05, 0.1, 0.2, 0.4, 0.8, 1.6, 3.2};
        const auto st = excursion_lifetime_stats(recs, run.occupation, c.params, edges);
        res["lifetime_per_unit_L"] = {{"estimate", st.mean_per_unit_L}, {"theory", st.theory_mean}};
        res["lifetime_chi_square"] = {{"statistic", st.chi_square.statistic},
                                      {"dof", st.chi_square.dof},
                                      {"p_value", st.chi_square.p_value}};
        res["intensity_ratio"] = {{"estimate", st.intensity_ratio}, {"theory", 1.0}};
        res["low_statistics"] = st.low_statistics;
    }
    r.table("records", [recs](std::ostream& f) { write_csv(f, recs); });
    return r.finish(os, log);
}

int cmd_rayknight(const RunConfig& c, std::ostream& os, std::ostream& log) {
    Report r("rayknight", c);
    rk_variance(0.0, c.params);
    std::vector<double> xs;
    for (long k = -1; static_cast<double>(k) * c.delta <= c.x_max + 1e-12; ++k)
        xs.push_back(static_cast<double>(k) * c.delta);
    EscapeOptions o;
    o.epsilon = c.epsilon;
    if (c.refine_levels > 0) {
        o.refine.enabled = true;
        o.refine.max_level = static_cast<int>(c.refine_levels);
        if (o.epsilon == 0.0)
            o.epsilon = 2.0 * std::sqrt(c.params.sigma2 * c.dt / std::ldexp(1.0, o.refine.max_level));
    }
    const auto crit = criterion_for(c, horizon_or(c, 1e4));
    const auto prof = run_trials<ProfileSample>(
        c.trials, [&](std::size_t i) { return local_time_profile(c.params, c.dt, Seed{c.seed, i, 0}, xs, crit, o); });
    const auto tab = rk_moment_check(prof, c.params, c.delta, c.bin_width, c.bins);
    auto rows = [&](const std::vector<RkRow>& v) {
        json a = json::array();
        for (const auto& x : v)
            a.push_back({{"bin_lo", x.bin_lo},
                         {"bin_hi", std::isinf(x.bin_hi) ? json(nullptr) : json(x.bin_hi)},
                         {"n", x.n},
                         {"drift", x.emp_drift},
                         {"drift_theory", x.theory_drift},
                         {"drift_se", x.se_drift},
                         {"variance", x.emp_var},
                         {"variance_theory", x.theory_var},
                         {"variance_se", x.se_var}});
        return a;
    };
    std::vector<double> L0;
    for (const auto& p : prof) L0.push_back(p.L_inf[1]);
    auto& res = r.results();
    res["epsilon"] = o.epsilon;
    res["grid_points"] = xs.size();
    res["positive"] = rows(tab.positive);
    res["negative"] = rows(tab.negative);
    r.estimate("L_at_0", estimate(L0, c.seed, c.params.sigma2 / (2.0 * c.params.beta2)));
    if (c.assert_se > 0.0) {
        for (const auto& x : tab.positive) {
            if (x.n < c.min_count) continue;
            const bool ok = std::abs(x.emp_drift - x.theory_drift) <= c.assert_se * x.se_drift &&
                            std::abs(x.emp_var - x.theory_var) <= c.assert_se * x.se_var;
            std::ostringstream d;
            d << "drift " << x.emp_drift << " vs " << x.theory_drift << ", variance " << x.emp_var << " vs "
              << x.theory_var;
            r.check("bin " + std::to_string(x.bin_lo), ok, d.str());
        }
    }
    r.table("positive", [tab](std::ostream& f) { write_csv(f, tab.positive); });
    r.table("negative", [tab](std::ostream& f) { write_csv(f, tab.negative); });
    r.table("profiles", [prof](std::ostream& f) {
        f.precision(17);
        f << "trial,x,L\n";
        for (std::size_t i = 0; i < prof.size(); ++i)
            for (std::size_t k = 0; k < prof[i].x_grid.size(); ++k)
                f << i << ',' << prof[i].x_grid[k] << ',' << prof[i].L_inf[k] << '\n';
    });
    return r.finish(os, log);
}

int cmd_lipschitz(const RunConfig& c, std::ostream& os, std::ostream& log) {
    Report r("lipschitz", c);
    const double s2 = c.params.sigma2, T = horizon_or(c, 200.0);
    const double margin = c.margin > 0.0 ? c.margin : default_margin(c.beta, s2);
    const auto n = steps(T, c.dt);
    const auto g = gap_ensemble(c.beta, s2, T, n, c.trials, c.seed, margin);
    auto& res = r.results();
    res["window"] = {g.window.t0, g.window.t1};
    res["low_statistics"] = g.low_statistics;
    r.estimate("abs_gap", g.abs_gap);
    r.estimate("upper_envelope_gap", g.upper);
    r.estimate("lower_envelope_gap", g.lower);
    r.estimate("envelope_width", g.width);
    if (!c.out.empty()) {
        auto pair = std::make_shared<StationaryPair>(sample_stationary_pair(c.beta, s2, T, n, Seed{c.seed, 0, 0}));
        const double beta = c.beta;
        r.table("pair", [pair](std::ostream& f) { write_pair_csv(f, *pair); });
        r.table("envelopes", [pair, beta, margin](std::ostream& f) {
            write_envelope_csv(f, pair->driver, envelopes(pair->driver, beta, margin));
        });
        r.table("growth", [pair, beta](std::ostream& f) {
            const auto gx = log_growth_estimate(abs_difference(pair->driver, pair->xstar));
            const auto gl = log_growth_estimate(abs_difference(lower_envelope(pair->driver, beta), pair->driver));
            f.precision(17);
            f << "t_lo,t_hi,xstar_gap,lower_envelope_gap\n";
            for (std::size_t k = 0; k < gx.size(); ++k)
                f << gx[k].t_lo << ',' << gx[k].t_hi << ',' << gx[k].value << ',' << gl[k].value << '\n';
        });
    }
    return r.finish(os, log);
}

int cmd_analytics(const RunConfig& c, std::ostream& os, std::ostream& log) {
    Report r("analytics", c);
    const auto& p = c.params;
    auto& res = r.results();
    auto put = [&](const std::string& name, const std::function<double()>& f) { res[name] = value_or_null(f); };
    put("lambda_upper", [&] {
        if (!upper_repels(p)) throw SemanticsError("upper side attracts");
        return lambda_rate(p.alpha1, -p.beta1, p.sigma2, Side::upper).value;
    });
    put("lambda_lower", [&] {
        if (!lower_repels(p)) throw SemanticsError("lower side attracts");
        return lambda_rate(p.alpha2, p.beta2, p.sigma2, Side::lower).value;
    });
    put("lambda_upper_outer_two", [&] {
        if (!upper_repels(p)) throw SemanticsError("upper side attracts");
        return lambda_rate_outer_two(p.alpha1, -p.beta1, p.sigma2);
    });
    put("lambda_lower_outer_two", [&] {
        if (!lower_repels(p)) throw SemanticsError("lower side attracts");
        return lambda_rate_outer_two(p.alpha2, p.beta2, p.sigma2);
    });
    put("p_negative", [&] { return p_negative_bifurcation(p); });
    put("expected_bifurcation_time", [&] { return expected_bifurcation_time(p); });
    put("expected_bifurcation_time_quadrature", [&] { return expected_bifurcation_time_quadrature(p); });
    put("expected_terminal_local_time", [&] { return expected_terminal_local_time(p); });
    put("local_time_rate", [&] { return local_time_rate(p); });
    put("barrier_upper", [&] {
        if (!upper_repels(p)) throw SemanticsError("upper side attracts");
        return escape_barrier(p.alpha1, -p.beta1, p.sigma2, c.bound);
    });
    put("barrier_lower", [&] {
        if (!lower_repels(p)) throw SemanticsError("lower side attracts");
        return escape_barrier(p.alpha2, p.beta2, p.sigma2, c.bound);
    });
    put("finite_lifetime_upper", [&] { return finite_excursion_lifetime(p.alpha1, p.beta1, p.sigma2, Side::upper); });
    put("finite_lifetime_lower", [&] { return finite_excursion_lifetime(p.alpha2, p.beta2, p.sigma2, Side::lower); });
    if (theory([&] { return rk_variance(0.0, p); })) {
        json rk = json::array();
        for (int k = 0; k <= 20; ++k) {
            const double a = 0.1 * k;
            rk.push_back({{"a", a},
                          {"drift_up", rk_drift_pos(a, p)},
                          {"drift_down", rk_drift_neg(a, p)},
                          {"variance", rk_variance(a, p)},
                          {"flow_derivative", flow_derivative(a, p)}});
        }
        res["profile_coefficients"] = rk;
    } else {
        res["profile_coefficients"] = nullptr;
    }
    res["stationary"] = {{"beta", c.beta},
                         {"density_at_0", stationary_density(0.0, c.beta, p.sigma2)},
                         {"mean_abs", stationary_mean_abs(c.beta, p.sigma2)},
                         {"zplus_mean", zplus_mean(c.beta, p.sigma2)}};
    return r.finish(os, log);
}

int cmd_converge(const RunConfig& c, std::ostream& os, std::ostream& log) {
    Report r("converge", c);
    const auto B = make_driver(c);
    const auto tab = convergence_study(c.params, B, parse_list(c.epsilons));
    json rows = json::array();
    for (const auto& x : tab.rows)
        rows.push_back({{"epsilon", x.epsilon}, {"sup_gap", x.sup_gap}, {"lipschitz", x.lipschitz}});
    r.results()["rows"] = rows;
    r.results()["monotone"] = tab.monotone;
    r.results()["lipschitz_bound"] = c.params.max_speed();
    r.table("table", [tab](std::ostream& f) {
        f.precision(17);
        f << "epsilon,sup_gap,lipschitz\n";
        for (const auto& x : tab.rows) f << x.epsilon << ',' << x.sup_gap << ',' << x.lipschitz << '\n';
    });
    return r.finish(os, log);
}

int cmd_acceptance(const RunConfig& c, std::ostream& os, std::ostream& log) {
    Report r("acceptance", c);
    AcceptanceOptions opt;
    if (!c.criteria.empty()) opt.only = parse_criteria(c.criteria);
    if (c.has("seed")) opt.seed = c.seed;
    if (!c.out.empty()) opt.csv_dir = c.out + "_tables";
    opt.progress = &log;
    const auto res = run_acceptance(opt);
    json a = json::array();
    for (const auto& x : res) {
        json v = json::object();
        for (const auto& [k, val] : x.values) v[k] = val;
        a.push_back({{"id", x.id},
                     {"title", x.title},
                     {"passed", x.passed},
                     {"summary", x.summary},
                     {"budget_seconds", x.budget_seconds},
                     {"values", v}});
        r.check("criterion " + std::to_string(x.id) + " " + x.title, x.passed, x.summary);
    }
    r.results()["base_seed"] = opt.seed;
    r.results()["criteria"] = a;
    return r.finish(os, log);
}

using Command = int (*)(const RunConfig&, std::ostream&, std::ostream&);

const std::vector<std::tuple<std::string, std::string, Command>>& commands() {
    static const std::vector<std::tuple<std::string, std::string, Command>> v{
        {"gen", "generate a Brownian driver", cmd_gen},
        {"solve", "solve for one driver", cmd_solve},
        {"bifurcate", "direction, last contact time and local time at the bifurcation", cmd_bifurcate},
        {"localtime", "local time of Y = B - X at 0", cmd_localtime},
        {"excursions", "excursion decomposition of Y", cmd_excursions},
        {"rayknight", "local-time profiles over initial values and their binned moments", cmd_rayknight},
        {"lipschitz", "stationary pairs, envelopes and gap statistics", cmd_lipschitz},
        {"analytics", "closed-form and quadrature values", cmd_analytics},
        {"converge", "smoothed solutions against the sharp one", cmd_converge},
        {"acceptance", "run the acceptance suite", cmd_acceptance},
    };
    return v;
}

} // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [n, h, f] : commands()) v.push_back(n);
        return v;
    }();
    return names;
}

std::string command_help(const std::string& name) {
    for (const auto& [n, h, f] : commands())
        if (n == name) return h;
    return "";
}

int run_command(const std::string& name, const RunConfig& cfg, std::ostream& os, std::ostream& log) {
    for (const auto& [n, h, f] : commands()) {
        if (n != name) continue;
        validate(cfg, name);
        return f(cfg, os, log);
    }
    throw ConfigError("unknown command '" + name + "'");
}

} // namespace bifcli
