#include "bifsim/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "bifsim/error.hpp"
#include "bifsim/random.hpp"

namespace bifsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double snap_tol(double a, double b) {
    return 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(a) + std::abs(b));
}

// Event times this close to a segment end are moved onto it.
bool near_end(double tau, double te) { return te - tau <= 1e-13 * (1.0 + std::abs(te)); }

double resolve_end(const SampledPath& driver, double t_end) {
    return std::isnan(t_end) ? driver.back_time() : t_end;
}

} // namespace

std::string to_string(Scheme s) {
    switch (s) {
    case Scheme::maximal: return "maximal";
    case Scheme::minimal: return "minimal";
    case Scheme::smoothed: return "smoothed";
    case Scheme::delta_push: return "delta_push";
    }
    return "?";
}

Scheme parse_scheme(const std::string& name) {
    if (name == "maximal") return Scheme::maximal;
    if (name == "minimal") return Scheme::minimal;
    if (name == "smoothed") return Scheme::smoothed;
    if (name == "delta" || name == "delta_push") return Scheme::delta_push;
    throw ConfigError("unknown scheme '" + name + "' (maximal, minimal, smoothed, delta_push)");
}

// ---- Integrator -----------------------------------------------------------

Integrator::Integrator(const ModelParams& params, DriverSource& driver, const IntegratorOptions& opt)
    : p_(params), drv_(driver), opt_(opt), t_(params.t0), x_(params.x0) {
    p_.validate();
    if ((opt_.scheme == Scheme::smoothed || opt_.scheme == Scheme::delta_push) && !(opt_.width > 0.0))
        throw ConfigError("smoothed and delta_push schemes need a positive width");
    if ((opt_.scheme == Scheme::smoothed || opt_.scheme == Scheme::delta_push) &&
        !p_.piecewise_constant())
        throw ConfigError("smoothed and delta_push schemes require alpha1 = alpha2 = 0");
    if (!(opt_.tol > 0.0)) throw ConfigError("tol must be positive");
    if (opt_.refine.enabled &&
        (opt_.scheme == Scheme::smoothed || opt_.scheme == Scheme::delta_push || !(opt_.refine.sigma2 > 0.0) ||
         opt_.refine.max_level < 0 || opt_.refine.max_level > 40 || !(opt_.refine.reach > 0.0)))
        throw ConfigError("bridge refinement needs the maximal or minimal scheme, sigma2 > 0, "
                          "reach > 0 and 0 <= max_level <= 40");
    if (std::isnan(opt_.t_end) || opt_.t_end < t_) throw ConfigError("t_end must be >= t0");
    const SampledPath& P = drv_.path();
    if (P.empty() || t_ < P.front_time()) throw DomainError("driver does not cover t0");
    while (P.back_time() <= t_ && t_ < opt_.t_end)
        if (!drv_.extend()) break;
    if (t_ > P.back_time()) throw DomainError("driver does not cover t0");
    k_ = P.segment_index(t_);
    if (opt_.refine.enabled) stack_.reserve(2 * static_cast<std::size_t>(opt_.refine.max_level) + 2);
}

double BridgeRefinement::normal(std::size_t k, int level, std::uint64_t pos) const noexcept {
    const std::uint64_t node = ((static_cast<std::uint64_t>(level) << 56) + pos + 1) * 0xD1B54A32D192ED03ULL;
    // Box-Muller on the two halves of one word
    const std::uint64_t w = mix64(mix64(seed ^ (static_cast<std::uint64_t>(k) * 0x9E3779B97F4A7C15ULL)) ^ node);
    const double u1 = (static_cast<double>(w >> 32) + 0.5) * 0x1.0p-32;
    const double u2 = static_cast<double>(w & 0xFFFFFFFFULL) * 0x1.0p-32;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

bool Integrator::refinable(const Node& n) const noexcept {
    if (n.level >= opt_.refine.max_level || t_ != n.ta) return false;
    const double ya = n.ba - x_;
    if (ya == 0.0) return true;
    const double h = n.tb - n.ta;
    const double slope = ya > 0.0 ? p_.beta1 : p_.beta2;
    const double yb = n.bb - (x_ + slope * h);
    const double reach = opt_.refine.reach * n.sd;
    return ya * yb <= 0.0 || std::min(std::abs(ya), std::abs(yb)) < reach;
}

bool Integrator::locate_refined(Segment& s) {
    const SampledPath& P = drv_.path();
    for (;;) {
        while (!stack_.empty() && t_ >= stack_.back().tb) stack_.pop_back();
        if (stack_.empty()) {
            if (k_ + 1 >= P.size() || t_ >= P.times[k_ + 1]) {
                if (k_ + 1 < P.size()) {
                    ++k_;
                    continue;
                }
                if (!drv_.extend()) {
                    if (std::isfinite(opt_.t_end) && t_ < opt_.t_end)
                        throw DomainError("driver does not cover the requested interval");
                    return false;
                }
                continue;
            }
            const double h0 = P.times[k_ + 1] - P.times[k_];
            stack_.push_back({P.times[k_], P.times[k_ + 1], P.values[k_], P.values[k_ + 1],
                              std::sqrt(opt_.refine.sigma2 * h0), 0, 0});
        }
        const Node n = stack_.back();
        if (refinable(n)) {
            stack_.pop_back();
            const double tm = 0.5 * (n.ta + n.tb);
            const double bm = 0.5 * (n.ba + n.bb) + 0.5 * n.sd * opt_.refine.normal(k_, n.level + 1, n.pos);
            const double sd = n.sd * std::numbers::sqrt2 * 0.5;
            stack_.push_back({tm, n.tb, bm, n.bb, sd, n.level + 1, 2 * n.pos + 1});
            stack_.push_back({n.ta, tm, n.ba, bm, sd, n.level + 1, 2 * n.pos});
            continue;
        }
        s.ta = n.ta;
        s.tb = n.tb;
        s.te = std::min(s.tb, opt_.t_end);
        s.ba = n.ba;
        s.bb = n.bb;
        s.m = (s.bb - s.ba) / (s.tb - s.ta);
        return true;
    }
}

bool Integrator::locate(Segment& s) {
    if (opt_.refine.enabled) return locate_refined(s);
    const SampledPath& P = drv_.path();
    for (;;) {
        if (k_ + 1 < P.size()) {
            if (t_ < P.times[k_ + 1]) break;
            ++k_;
            continue;
        }
        if (!drv_.extend()) {
            if (std::isfinite(opt_.t_end) && t_ < opt_.t_end)
                throw DomainError("driver does not cover the requested interval");
            return false;
        }
    }
    s.ta = P.times[k_];
    s.tb = P.times[k_ + 1];
    s.te = std::min(s.tb, opt_.t_end);
    s.ba = P.values[k_];
    s.bb = P.values[k_ + 1];
    s.m = (s.bb - s.ba) / (s.tb - s.ta);
    return true;
}

bool Integrator::next(Piece& out) {
    for (int guard = 0; guard < 16; ++guard) {
        if (t_ >= opt_.t_end) return false;
        Segment s{};
        if (!locate(s)) return false;
        bool emitted = false;
        switch (opt_.scheme) {
        case Scheme::smoothed: emitted = smoothed_step(s, out); break;
        default: emitted = p_.piecewise_constant() ? pwc_step(s, out) : general_step(s, out);
        }
        if (emitted) return true;
    }
    throw NumericalError("integrator made no progress at t = " + std::to_string(t_));
}

void Integrator::emit(const Segment& s, double t1, double x1, int side, Piece& out) {
    out = Piece{t_, t1, x_, x1, s.at(t_), s.at(t1), side};
    t_ = t1;
    x_ = x1;
    if (side != 0) in_contact_ = false;
}

void Integrator::slide(const Segment& s, Piece& out) {
    double t0 = t_;
    emit(s, s.te, s.at(s.te), 0, out);
    if (!contacts_.empty() && contacts_.back().exit == t0)
        contacts_.back().exit = s.te;
    else
        contacts_.push_back({t0, s.te});
    in_contact_ = true;
}

int Integrator::choose_departure(bool up, bool down) const noexcept {
    if (opt_.scheme == Scheme::minimal) return down ? -1 : (up ? 1 : 0);
    return up ? 1 : (down ? -1 : 0);
}

// Straight-line motion with slope `slope` on side `side` (sign of X - B),
// stopping at the first contact.
bool Integrator::linear_side(const Segment& s, int side, double slope, Piece& out) {
    const double d = x_ - s.at(t_);
    const double rel = slope - s.m;
    if (d != 0.0 && side * rel < 0.0) {
        const double tau = t_ - d / rel;
        if (!(tau > t_) || near_end(t_, tau)) {
            x_ = s.at(t_);
            return false;
        }
        if (tau < s.te && !near_end(tau, s.te)) {
            emit(s, tau, s.at(tau), side, out);
            return true;
        }
        double x1 = x_ + slope * (s.te - t_);
        const double b1 = s.at(s.te);
        if (tau < s.te || (x1 - b1) * side <= 0.0 || std::abs(x1 - b1) <= snap_tol(x1, b1)) x1 = b1;
        emit(s, s.te, x1, side, out);
        return true;
    }
    emit(s, s.te, x_ + slope * (s.te - t_), side, out);
    return true;
}

bool Integrator::pwc_step(const Segment& s, Piece& out) {
    const double b = s.at(t_);
    const double d = x_ - b;
    if (push_until_ > t_) {
        const double t1 = std::min(s.te, push_until_);
        emit(s, t1, x_ + p_.max_speed() * (t1 - t_), 2, out);
        return true;
    }
    if (d == 0.0) {
        if (opt_.scheme == Scheme::delta_push) {
            push_until_ = t_ + opt_.width;
            const double t1 = std::min(s.te, push_until_);
            emit(s, t1, x_ + p_.max_speed() * (t1 - t_), 2, out);
            return true;
        }
        const int dir = choose_departure(p_.beta2 > s.m, p_.beta1 < s.m);
        if (dir == 0) {
            slide(s, out);
            return true;
        }
        emit(s, s.te, x_ + (dir > 0 ? p_.beta2 : p_.beta1) * (s.te - t_), dir, out);
        return true;
    }
    const int side = d > 0.0 ? 1 : -1;
    return linear_side(s, side, side > 0 ? p_.beta2 : p_.beta1, out);
}

// Drift f of X on one side, as a function of d = X - B (evaluated with the
// magnitude |d| regardless of sign so that the branch can overshoot 0 during
// root finding).
double Integrator::side_drift(int side, double d) const noexcept {
    const double beta = side > 0 ? p_.beta2 : p_.beta1;
    const double alpha = side > 0 ? p_.alpha2 : p_.alpha1;
    if (alpha == 0.0) return beta;
    double a = std::abs(d);
    if (alpha < 0.0) a = std::max(a, kSingularFloor);
    return beta * std::pow(a, alpha);
}

bool Integrator::general_step(const Segment& s, Piece& out) {
    const double d = x_ - s.at(t_);
    if (d == 0.0) {
        const bool singular = p_.alpha1 < 0.0 || p_.alpha2 < 0.0;
        if (singular && !in_contact_) ++singular_;
        in_contact_ = true;
        const double f_up = side_drift(1, 0.0);
        const double f_down = side_drift(-1, 0.0);
        const int dir = choose_departure(f_up > s.m, f_down < s.m);
        if (dir == 0) {
            slide(s, out);
            return true;
        }
        const double alpha = dir > 0 ? p_.alpha2 : p_.alpha1;
        if (alpha == 0.0) {
            emit(s, s.te, x_ + (dir > 0 ? p_.beta2 : p_.beta1) * (s.te - t_), dir, out);
            return true;
        }
        return adaptive_side(s, dir, out);
    }
    const int side = d > 0.0 ? 1 : -1;
    const double alpha = side > 0 ? p_.alpha2 : p_.alpha1;
    if (alpha == 0.0) return linear_side(s, side, side > 0 ? p_.beta2 : p_.beta1, out);
    return adaptive_side(s, side, out);
}

// One accepted Dormand-Prince step of D' = f(D) - m on the given side.
bool Integrator::adaptive_side(const Segment& s, int side, Piece& out) {
    const double m = s.m;
    auto g = [&](double y) { return side_drift(side, y) - m; };
    const double d0 = x_ - s.at(t_);

    auto step = [&](double h, double& err) {
        const double k1 = g(d0);
        const double k2 = g(d0 + h * (k1 / 5.0));
        const double k3 = g(d0 + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2));
        const double k4 = g(d0 + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3));
        const double k5 = g(d0 + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 +
                                      64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4));
        const double k6 = g(d0 + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 +
                                      46732.0 / 5247.0 * k3 + 49.0 / 176.0 * k4 -
                                      5103.0 / 18656.0 * k5));
        const double y5 = d0 + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 + 125.0 / 192.0 * k4 -
                                    2187.0 / 6784.0 * k5 + 11.0 / 84.0 * k6);
        const double k7 = g(y5);
        const double y4 = d0 + h * (5179.0 / 57600.0 * k1 + 7571.0 / 16695.0 * k3 +
                                    393.0 / 640.0 * k4 - 92097.0 / 339200.0 * k5 +
                                    187.0 / 2100.0 * k6 + k7 / 40.0);
        err = std::abs(y5 - y4);
        return y5;
    };

    const double span = s.te - t_;
    const double hmin = 1e-15 * (1.0 + std::abs(t_));
    double h = (h_ > 0.0) ? std::min(h_, span) : span;
    double y1 = 0.0;
    for (;;) {
        double err = 0.0;
        y1 = step(h, err);
        if (std::isfinite(y1) && err <= opt_.tol) {
            const double grow = err > 0.0 ? 0.9 * std::pow(opt_.tol / err, 0.2) : 5.0;
            h_ = h * std::clamp(grow, 1.0, 5.0);
            break;
        }
        if (h <= hmin) {
            ++singular_;
            h_ = hmin;
            break;
        }
        const double shrink = std::isfinite(err) && err > 0.0 ? 0.9 * std::pow(opt_.tol / err, 0.2) : 0.1;
        h = std::max(hmin, h * std::clamp(shrink, 0.1, 0.9));
    }

    if (y1 * side <= 0.0) {
        // crossed or touched B inside the step: bisect on the step length
        double lo = 0.0, hi = h;
        for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(t_)); ++it) {
            const double mid = 0.5 * (lo + hi);
            double err = 0.0;
            const double ym = step(mid, err);
            if (ym * side > 0.0)
                lo = mid;
            else
                hi = mid;
        }
        const double tau = t_ + hi;
        if (!(tau > t_) || near_end(t_, tau)) {
            x_ = s.at(t_);
            return false;
        }
        emit(s, std::min(tau, s.te), s.at(std::min(tau, s.te)), side, out);
        return true;
    }
    const double t1 = (h >= span) ? s.te : t_ + h;
    emit(s, t1, s.at(t1) + y1, side, out);
    return true;
}

bool Integrator::smoothed_step(const Segment& s, Piece& out) {
    const double eps = opt_.width;
    const double b0 = s.at(t_);
    double d = x_ - b0;
    if (std::abs(d - eps) <= snap_tol(x_, b0)) d = eps;
    if (std::abs(d + eps) <= snap_tol(x_, b0)) d = -eps;
    const double m = s.m;
    const bool upper = d > eps || (d == eps && p_.beta2 - m > 0.0);
    const bool lower = d < -eps || (d == -eps && p_.beta1 - m < 0.0);

    if (upper || lower) {
        const double slope = upper ? p_.beta2 : p_.beta1;
        const double bnd = upper ? eps : -eps;
        const double rel = slope - m;
        const int side = upper ? 1 : -1;
        if (side * rel < 0.0) {
            const double tau = t_ + (bnd - d) / rel;
            if (!(tau > t_) || near_end(t_, tau)) {
                x_ = b0 + bnd;
                return false;
            }
            if (tau < s.te && !near_end(tau, s.te)) {
                emit(s, tau, s.at(tau) + bnd, side, out);
                return true;
            }
            double x1 = x_ + slope * (s.te - t_);
            const double b1 = s.at(s.te);
            if (tau < s.te || (x1 - b1 - bnd) * side < 0.0) x1 = b1 + bnd;
            emit(s, s.te, x1, side, out);
            return true;
        }
        emit(s, s.te, x_ + slope * (s.te - t_), side, out);
        return true;
    }

    // inside the band: D' = a (D + eps) + beta1 - m
    const double a = (p_.beta2 - p_.beta1) / (2.0 * eps);
    const double c0 = p_.beta1 - m;
    if (a == 0.0) {
        if (c0 == 0.0) {
            emit(s, s.te, s.at(s.te) + d, 0, out);
            return true;
        }
        const double bnd = c0 > 0.0 ? eps : -eps;
        const double tau = t_ + (bnd - d) / c0;
        if (tau < s.te && tau > t_) {
            const double t1 = near_end(tau, s.te) ? s.te : tau;
            emit(s, t1, s.at(t1) + bnd, 0, out);
            return true;
        }
        emit(s, s.te, std::clamp(x_ + p_.beta1 * (s.te - t_), s.at(s.te) - eps, s.at(s.te) + eps), 0,
             out);
        return true;
    }
    const double dstar = -c0 / a - eps;
    double tcap = t_ + 0.01 / std::abs(a);
    if (tcap >= s.te || near_end(tcap, s.te)) tcap = s.te;
    double tau = kInf;
    double bnd = 0.0;
    if (d != dstar) {
        const double rate = a * (d - dstar);
        bnd = rate > 0.0 ? eps : -eps;
        const double ratio = (bnd - dstar) / (d - dstar);
        if (ratio > 0.0) {
            const double sdur = std::log(ratio) / a;
            if (sdur >= 0.0) tau = t_ + sdur;
        }
    }
    if (tau < tcap) {
        if (!(tau > t_) || near_end(t_, tau)) {
            // sitting on the boundary and leaving it
            x_ = b0 + bnd;
            const double slope = bnd > 0.0 ? p_.beta2 : p_.beta1;
            emit(s, s.te, x_ + slope * (s.te - t_), bnd > 0.0 ? 1 : -1, out);
            return true;
        }
        const double t1 = near_end(tau, tcap) ? tcap : tau;
        emit(s, t1, s.at(t1) + bnd, 0, out);
        return true;
    }
    double d1 = dstar + (d - dstar) * std::exp(a * (tcap - t_));
    d1 = std::clamp(d1, -eps, eps);
    emit(s, tcap, s.at(tcap) + d1, 0, out);
    return true;
}

// ---- drivers --------------------------------------------------------------

SolutionPath collect(const ModelParams& params, DriverSource& driver, const IntegratorOptions& opt) {
    Integrator it(params, driver, opt);
    SolutionPath sol;
    sol.params = params;
    sol.scheme = opt.scheme;
    sol.width = opt.width;
    sol.base.kind = PathKind::solution;
    sol.base.push_back(params.t0, params.x0);
    Piece pc{};
    while (it.next(pc)) {
        if (pc.t1 > sol.base.times.back())
            sol.base.push_back(pc.t1, pc.x1);
        else
            sol.base.values.back() = pc.x1;
    }
    sol.contact_set = it.contact_set();
    sol.singular_contacts = it.singular_contacts();
    return sol;
}

SolutionPath solve(const ModelParams& params, const SampledPath& driver, Scheme scheme, double t_end) {
    if (!params.piecewise_constant())
        throw ConfigError("solve requires alpha1 = alpha2 = 0; use solve_general");
    if (scheme != Scheme::maximal && scheme != Scheme::minimal)
        throw ConfigError("solve supports the maximal and minimal schemes");
    FixedDriver d(driver);
    IntegratorOptions opt;
    opt.scheme = scheme;
    opt.t_end = resolve_end(driver, t_end);
    return collect(params, d, opt);
}

SolutionPath solve_general(const ModelParams& params, const SampledPath& driver, double tol,
                           Scheme scheme, double t_end) {
    if (scheme != Scheme::maximal && scheme != Scheme::minimal)
        throw ConfigError("solve_general supports the maximal and minimal schemes");
    FixedDriver d(driver);
    IntegratorOptions opt;
    opt.scheme = scheme;
    opt.tol = tol;
    opt.t_end = resolve_end(driver, t_end);
    return collect(params, d, opt);
}

SolutionPath solve_smoothed(const ModelParams& params, const SampledPath& driver, double epsilon,
                            double t_end) {
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    FixedDriver d(driver);
    IntegratorOptions opt;
    opt.scheme = Scheme::smoothed;
    opt.width = epsilon;
    opt.t_end = resolve_end(driver, t_end);
    return collect(params, d, opt);
}

SolutionPath solve_delta(const ModelParams& params, const SampledPath& driver, double delta,
                         double t_end) {
    if (!(delta > 0.0)) throw ConfigError("delta must be positive");
    FixedDriver d(driver);
    IntegratorOptions opt;
    opt.scheme = Scheme::delta_push;
    opt.width = delta;
    opt.t_end = resolve_end(driver, t_end);
    return collect(params, d, opt);
}

FlowResult solve_flow(const ModelParams& params, const SampledPath& driver,
                      const std::vector<double>& x_grid, double t_eval, bool keep_paths,
                      Scheme scheme) {
    for (std::size_t i = 1; i < x_grid.size(); ++i)
        if (!(x_grid[i] > x_grid[i - 1])) throw ConfigError("x_grid must be strictly increasing");
    FlowResult r;
    r.x_grid = x_grid;
    r.values.reserve(x_grid.size());
    for (double x : x_grid) {
        FixedDriver d(driver);
        IntegratorOptions opt;
        opt.scheme = scheme;
        opt.t_end = t_eval;
        if (keep_paths) {
            r.paths.push_back(collect(params.with_x0(x), d, opt));
            r.values.push_back(r.paths.back().base.values.back());
        } else {
            Integrator it(params.with_x0(x), d, opt);
            Piece pc{};
            while (it.next(pc)) {
            }
            r.values.push_back(it.x());
        }
    }
    return r;
}

double lipschitz_constant(const SampledPath& path) {
    double L = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i)
        L = std::max(L, std::abs(path.values[i] - path.values[i - 1]) /
                            (path.times[i] - path.times[i - 1]));
    return L;
}

ConvergenceTable convergence_study(const ModelParams& params, const SampledPath& driver,
                                   const std::vector<double>& epsilons) {
    if (epsilons.empty()) throw ConfigError("epsilons must not be empty");
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!(epsilons[i] > 0.0)) throw ConfigError("epsilons must be positive");
        if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
            throw ConfigError("epsilons must be strictly decreasing");
    }
    const double t_end = driver.back_time();
    const SolutionPath ref = solve(params, driver, Scheme::maximal, t_end);
    ConvergenceTable tab;
    for (double eps : epsilons) {
        const SolutionPath sm = solve_smoothed(params, driver, eps, t_end);
        double gap = 0.0;
        for (std::size_t k = 0; k < driver.size(); ++k) {
            const double t = driver.times[k];
            if (t < params.t0) continue;
            gap = std::max(gap, std::abs(sm.base.at(t) - ref.base.at(t)));
        }
        if (!tab.rows.empty() && !(gap < tab.rows.back().sup_gap)) tab.monotone = false;
        tab.rows.push_back({eps, gap, lipschitz_constant(sm.base)});
    }
    return tab;
}

void write_contact_csv(std::ostream& os, const SolutionPath& sol) {
    const auto old = os.precision(17);
    os << "t_enter,t_exit\n";
    for (const auto& iv : sol.contact_set) os << iv.enter << ',' << iv.exit << '\n';
    os.precision(old);
}

} // namespace bifsim
