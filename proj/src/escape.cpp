#include "bifsim/escape.hpp"

#include <algorithm>
#include <cmath>

#include "bifsim/analytics.hpp"
#include "bifsim/error.hpp"

namespace bifsim {

EscapeCriterion EscapeCriterion::for_params(const ModelParams& p, double bound, double horizon) {
    p.validate();
    EscapeCriterion c;
    c.bound = bound;
    c.horizon = horizon;
    if (upper_repels(p)) c.barrier_upper = escape_barrier(p.alpha1, p.beta1, p.sigma2, bound);
    if (lower_repels(p)) c.barrier_lower = escape_barrier(p.alpha2, p.beta2, p.sigma2, bound);
    c.validate();
    return c;
}

EscapeCriterion EscapeCriterion::with_barrier(const ModelParams& p, double barrier, double horizon) {
    p.validate();
    if (!(barrier > 0.0)) throw ConfigError("barrier must be positive");
    EscapeCriterion c;
    c.horizon = horizon;
    c.bound = 0.0;
    if (upper_repels(p)) {
        c.barrier_upper = barrier;
        c.bound = std::max(c.bound, return_probability(p.alpha1, p.beta1, p.sigma2, barrier));
    }
    if (lower_repels(p)) {
        c.barrier_lower = barrier;
        c.bound = std::max(c.bound, return_probability(p.alpha2, p.beta2, p.sigma2, barrier));
    }
    c.validate();
    return c;
}

void EscapeCriterion::validate() const {
    if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
    if (!(barrier_upper > 0.0) || !(barrier_lower > 0.0)) throw ConfigError("barriers must be positive");
    if (std::isinf(barrier_upper) && std::isinf(barrier_lower))
        throw SemanticsError("no side repels: the solution never bifurcates");
}

std::string to_string(Direction d) {
    switch (d) {
    case Direction::positive: return "positive";
    case Direction::negative: return "negative";
    case Direction::none: return "none";
    }
    return "?";
}

EscapeTrace run_to_escape(const ModelParams& params, DriverSource& driver,
                          const EscapeCriterion& criterion, const EscapeOptions& opt) {
    criterion.validate();
    const SampledPath& P = driver.path();
    if (P.size() < 2) driver.extend();
    if (P.size() < 2) throw DomainError("driver has no steps");

    EscapeTrace tr;
    const double dt = P.times[1] - P.times[0];
    tr.epsilon = opt.epsilon > 0.0 ? opt.epsilon : default_bandwidth(params.sigma2, dt);
    const BiasModel bias = BiasModel::of(params);
    OccupationCounter occ(tr.epsilon, params.sigma2, bias);
    // a contact is only seen where the interpolated driver meets X, so both
    // band edges carry the sampling overshoot
    CrossingCounter cross(tr.epsilon, params.sigma2, bias, 2.0 * sampling_overshoot(params.sigma2, dt));

    IntegratorOptions io;
    io.scheme = opt.scheme;
    io.tol = opt.tol;
    io.t_end = params.t0 + criterion.horizon;
    io.refine = opt.refine;
    Integrator it(params, driver, io);

    const double y_start = P.at(params.t0) - params.x0;
    tr.T_star = params.t0;
    tr.escape_time = io.t_end;
    cross.observe(y_start);
    if (opt.record) {
        tr.Y.kind = PathKind::difference;
        tr.Y.push_back(params.t0, y_start);
        tr.L.epsilon = tr.epsilon;
        tr.L.sigma2 = params.sigma2;
        tr.L.x_label = params.x0;
        tr.L.times.push_back(params.t0);
        tr.L.L.push_back(0.0);
    }

    Piece pc{};
    while (it.next(pc)) {
        const double y0 = pc.b0 - pc.x0;
        const double y1 = pc.b1 - pc.x1;
        occ.add(pc.t0, pc.t1, y0, y1);
        cross.observe(y1);
        if (y1 == 0.0 || pc.side == 0) tr.T_star = pc.t1;
        if (opt.record) {
            tr.Y.push_back(pc.t1, y1);
            tr.L.times.push_back(pc.t1);
            tr.L.L.push_back(occ.value());
        }
        if (y1 >= criterion.barrier_upper) {
            tr.direction = Direction::negative;
            tr.escape_time = pc.t1;
            break;
        }
        if (-y1 >= criterion.barrier_lower) {
            tr.direction = Direction::positive;
            tr.escape_time = pc.t1;
            break;
        }
        if (pc.t1 >= opt.known_after &&
            ((opt.known_side == Direction::positive && y1 < -tr.epsilon) ||
             (opt.known_side == Direction::negative && y1 > tr.epsilon))) {
            tr.direction = opt.known_side;
            tr.escape_time = pc.t1;
            break;
        }
    }
    tr.L_occupation = occ.value();
    tr.L_crossings = cross.value();
    tr.crossings = cross.crossings();
    tr.singular_contacts = it.singular_contacts();
    return tr;
}

} // namespace bifsim
