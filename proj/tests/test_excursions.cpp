#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bifsim/analytics.hpp"
#include "bifsim/error.hpp"
#include "bifsim/excursions.hpp"
#include "bifsim/solver.hpp"
#include "bifsim/stats.hpp"
#include "fixtures.hpp"

using namespace bifsim;
using doctest::Approx;

namespace {

ModelParams drifts(double b1, double b2, double s2 = 1.0) {
    ModelParams p;
    p.beta1 = b1;
    p.beta2 = b2;
    p.sigma2 = s2;
    return p;
}

struct Recurrent {
    SampledPath Y;
    LocalTimeCurve L;
};

Recurrent recurrent_run(const ModelParams& p, double T, double dt, std::uint64_t seed) {
    const auto B = fixtures::brownian(seed, T, static_cast<std::size_t>(std::llround(T / dt)), p.sigma2);
    Recurrent r;
    r.Y = difference_path(B, solve(p, B).base);
    r.L = occupation_local_time(r.Y, default_bandwidth(p.sigma2, dt), p.sigma2, BiasModel::of(p));
    return r;
}

} // namespace

TEST_CASE("constant positive Y is one open excursion") {
    auto Y = fixtures::make_path({0.0, 1.0, 2.0}, {1.0, 1.0, 1.0});
    const auto recs = decompose(Y, 0.1);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].open);
    CHECK(recs[0].sign == 1);
    CHECK(recs[0].t_start == 0.0);
    CHECK(std::isinf(recs[0].lifetime));
    CHECK(recs[0].height == 1.0);
}

TEST_CASE("triangular pulse") {
    auto Y = fixtures::make_path({0.0, 1.0, 1.5, 3.0, 4.0}, {0.0, 0.0, -0.7, 0.0, 0.0});
    const auto recs = decompose(Y, 0.1);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].sign == -1);
    CHECK(recs[0].t_start == 1.0);
    CHECK(recs[0].t_end == 3.0);
    CHECK(recs[0].lifetime == 2.0);
    CHECK(recs[0].height == 0.7);
    CHECK_FALSE(recs[0].open);
}

TEST_CASE("sign changes between samples and the resolution filter") {
    auto Y = fixtures::make_path({0.0, 1.0, 2.0, 3.0, 4.0}, {0.0, 1.0, -0.05, 1.0, -3.0});
    const auto all = decompose(Y, 0.0);
    REQUIRE(all.size() == 4);
    CHECK(all[1].t_start == Approx(1.0 + 1.0 / 1.05));
    const auto big = decompose(Y, 0.1);
    REQUIRE(big.size() == 3);
    CHECK(big[0].sign == 1);
    CHECK(big[1].sign == 1);
    CHECK(big[2].sign == -1);
    CHECK(big[2].open);
    CHECK(big[2].t_start == Approx(3.25));
}

TEST_CASE("records are ordered and do not overlap") {
    const auto r = recurrent_run(drifts(1.0, -1.0), 20.0, 1e-3, 3);
    const auto recs = decompose(r.Y, default_resolution(1.0, 1e-3), &r.L);
    REQUIRE(recs.size() > 10);
    for (std::size_t i = 0; i < recs.size(); ++i) {
        CHECK(recs[i].height >= default_resolution(1.0, 1e-3));
        if (!recs[i].open) CHECK(recs[i].t_end > recs[i].t_start);
        if (i > 0) {
            CHECK(recs[i].t_start >= recs[i - 1].t_end);
            CHECK(recs[i].L_start >= recs[i - 1].L_start);
        }
    }
}

TEST_CASE("excursion csv") {
    auto Y = fixtures::make_path({0.0, 1.0, 2.0, 3.0}, {0.0, 0.5, 0.0, -1.0});
    std::ostringstream os;
    write_csv(os, decompose(Y, 0.1));
    CHECK(os.str() == "t_start,t_end,sign,height,lifetime,L_start\n"
                      "0,2,+,0.5,2,nan\n"
                      "2,3,-,1,inf,nan\n");
}

TEST_CASE("lifetime mass against quadrature") {
    using boost::math::quadrature::gauss_kronrod;
    for (double beta : {0.5, 1.0, 2.0}) {
        const double q = gauss_kronrod<double, 61>::integrate(
            [&](double t) { return excursion_lifetime_density(t, beta, 1.3); }, 0.2, 3.0, 15, 1e-13);
        CHECK(lifetime_mass(0.2, 3.0, beta, 1.3) == Approx(q).epsilon(1e-10));
    }
    CHECK(lifetime_mass(1.0, std::numeric_limits<double>::infinity(), 0.0, 1.0) ==
          Approx(2.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-14));
}

TEST_CASE("height counts per unit local time") {
    // upper side, beta1 > 0: (2 beta1 / sigma2) / (exp(2 beta1 h / sigma2) - 1)
    const auto p = drifts(1.0, -1.0);
    const double dt = 1e-4;
    const auto r = recurrent_run(p, 400.0, dt, 17);
    const auto recs = decompose(r.Y, default_resolution(1.0, dt), &r.L);
    const double h = 10.0 * default_resolution(1.0, dt);
    double up = 0.0, down = 0.0;
    for (const auto& e : recs) {
        if (e.open || e.height <= h) continue;
        (e.sign > 0 ? up : down) += 1.0;
    }
    const double expect = r.L.final_value() * returning_excursion_rate(h, 1.0, 1.0);
    INFO("L " << r.L.final_value() << " up " << up << " down " << down << " expect " << expect);
    CHECK(std::abs(up - expect) <= 3.0 * std::sqrt(expect));
    CHECK(std::abs(down - expect) <= 3.0 * std::sqrt(expect));
}

TEST_CASE("counts in disjoint local-time windows are Poisson") {
    const auto p = drifts(1.0, -1.0);
    const double dt = 1e-4;
    const auto r = recurrent_run(p, 400.0, dt, 29);
    const auto recs = decompose(r.Y, default_resolution(1.0, dt), &r.L);
    const double h = 10.0 * default_resolution(1.0, dt);
    const double w = 4.0;
    const std::size_t n_win = static_cast<std::size_t>(r.L.final_value() / w);
    REQUIRE(n_win >= 30);
    std::vector<double> counts(n_win, 0.0);
    for (const auto& e : recs) {
        if (e.open || e.height <= h) continue;
        const auto k = static_cast<std::size_t>(e.L_start / w);
        if (k < n_win) counts[k] += 1.0;
    }
    const double m = estimate(counts).mean;
    const double dispersion = sample_variance(counts) / m;
    const double se = std::sqrt(2.0 / (n_win - 1.0));
    INFO("dispersion " << dispersion << " se " << se);
    CHECK(std::abs(dispersion - 1.0) <= 2.0 * se);
}

TEST_CASE("lifetime law with two attracting drifts") {
    const std::vector<double> edges{0.05, 0.1, 0.2, 0.4, 0.8, 1.6, 3.2};
    for (double s2 : {1.0, 2.0}) {
        const auto p = drifts(1.0, -1.0, s2);
        const double dt = 1e-4;
        const auto r = recurrent_run(p, 400.0, dt, 41);
        const auto recs = decompose(r.Y, default_resolution(s2, dt), &r.L);
        const auto st = excursion_lifetime_stats(recs, r.L.final_value(), p, edges);
        INFO("sigma2 " << s2 << " mean " << st.mean_per_unit_L << " chi2 p " << st.chi_square.p_value
                       << " ratio " << st.intensity_ratio);
        CHECK_FALSE(st.low_statistics);
        // independent of sigma2
        CHECK(fixtures::rel_close(st.mean_per_unit_L, 2.0, 0.05));
        CHECK(st.theory_mean == 2.0);
        CHECK(st.chi_square.p_value > 0.01);
    }
    CHECK_THROWS_AS(excursion_lifetime_stats({}, 1.0, drifts(-1.0, 1.0), edges), SemanticsError);
    CHECK(excursion_lifetime_stats({}, 1.0, drifts(1.0, -1.0), edges).low_statistics);
}

TEST_CASE("bifurcation direction frequencies") {
    const auto p = drifts(-2.0, 1.0);
    const auto crit = EscapeCriterion::for_params(p);
    const auto reps = bifurcation_ensemble(p, 1e-3, 2000, 99, crit);
    std::vector<double> neg;
    for (const auto& r : reps) {
        REQUIRE(r.direction != Direction::none);
        neg.push_back(r.direction == Direction::negative ? 1.0 : 0.0);
        CHECK(r.T_star <= r.escape_time);
    }
    const auto e = estimate(neg, 99, 2.0 / 3.0);
    INFO("p_neg " << e.mean << " se " << e.stderr_);
    CHECK(e.within_se(3.0));
}

TEST_CASE("one-signed drifts bifurcate in the certain direction") {
    for (auto p : {drifts(2.0, 1.0), drifts(-1.0, -2.0)}) {
        const auto crit = EscapeCriterion::for_params(p);
        const auto reps = bifurcation_ensemble(p, 1e-3, 50, 5, crit);
        for (const auto& r : reps)
            CHECK(r.direction == (p.beta2 > 0.0 ? Direction::positive : Direction::negative));
    }
    CHECK_THROWS_AS(EscapeCriterion::for_params(drifts(1.0, -1.0)), SemanticsError);
}

TEST_CASE("escape criterion barriers") {
    const auto c = EscapeCriterion::for_params(drifts(-2.0, 1.0));
    CHECK(c.barrier_upper == Approx(std::log(1e4) / 4.0));
    CHECK(c.barrier_lower == Approx(std::log(1e4) / 2.0));
    const auto w = EscapeCriterion::with_barrier(drifts(-2.0, 1.0), 3.0);
    CHECK(w.bound == Approx(std::exp(-6.0)));
    const auto one = EscapeCriterion::for_params(drifts(2.0, 1.0));
    CHECK(std::isinf(one.barrier_upper));
}

TEST_CASE("detection on a fixed driver that ends too early") {
    const auto B = fixtures::brownian(8, 0.01, 10);
    const auto p = drifts(-1.0, 1.0);
    const auto r = detect_bifurcation(p, B, EscapeCriterion::for_params(p));
    CHECK(r.direction == Direction::none);
}
