#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bifsim/error.hpp"
#include "bifsim/solver.hpp"
#include "fixtures.hpp"

using namespace bifsim;

namespace {

double sup_gap(const SampledPath& a, const SampledPath& b, const std::vector<double>& ts) {
    double g = 0.0;
    for (double t : ts) g = std::max(g, std::abs(a.at(t) - b.at(t)));
    return g;
}

} // namespace

TEST_CASE("two-slope fixture: maximal leaves upward at the kink") {
    auto b = fixtures::example_two_eight(10);
    ModelParams p{-1.0, 1.0, 0, 0, 1.0, 0.0, 1.0};
    auto x = solve(p, b, Scheme::maximal);
    for (int k = 0; k <= 40; ++k) {
        const double t = k / 4.0;
        CHECK(x.base.at(t) == 1.0 + t);
    }
}

TEST_CASE("two-slope fixture: minimal leaves downward at the kink") {
    auto b = fixtures::example_two_eight(10);
    ModelParams p{-1.0, 1.0, 0, 0, 1.0, 0.0, 1.0};
    auto x = solve(p, b, Scheme::minimal);
    for (int k = 0; k <= 40; ++k) {
        const double t = k / 4.0;
        const double expect = t <= 1.0 ? 1.0 + t : 2.0 - (t - 1.0);
        CHECK(x.base.at(t) == expect);
    }
    CHECK(x.contact_set.empty());
}

TEST_CASE("equal drifts give a straight line") {
    auto b = fixtures::brownian(3, 2.0, 2000);
    ModelParams p{0.7, 0.7, 0, 0, 1.0, 0.0, -0.3};
    auto x = solve(p, b);
    for (std::size_t k = 0; k < b.size(); k += 7)
        CHECK(x.base.at(b.times[k]) == doctest::Approx(-0.3 + 0.7 * b.times[k]).epsilon(1e-12));
}

TEST_CASE("attracting drifts slide along a slow driver") {
    auto b = fixtures::make_path({0, 1, 2}, {0, 0.5, 0.5});
    ModelParams p{1.0, -1.0, 0, 0, 1.0, 0.0, 0.0};
    auto x = solve(p, b);
    CHECK(x.base.at(0.5) == 0.25);
    CHECK(x.base.at(2.0) == 0.5);
    REQUIRE(x.contact_set.size() == 1);
    CHECK(x.contact_set[0].enter == 0.0);
    CHECK(x.contact_set[0].exit == 2.0);
    std::ostringstream os;
    write_contact_csv(os, x);
    CHECK(os.str() == "t_enter,t_exit\n0,2\n");
}

TEST_CASE("driver must cover the interval") {
    auto b = fixtures::make_path({0, 1}, {0, 0});
    ModelParams p{-1.0, 1.0, 0, 0, 1.0, 0.0, 0.0};
    CHECK_THROWS_AS(solve(p, b, Scheme::maximal, 2.0), DomainError);
    p.t0 = -1.0;
    CHECK_THROWS_AS(solve(p, b), DomainError);
    ModelParams q{-1.0, 1.0, 0.5, 0, 1.0, 0.0, 0.0};
    CHECK_THROWS_AS(solve(q, b), ConfigError);
}

TEST_CASE("maximal dominates minimal and they agree on Brownian drivers") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        auto b = fixtures::brownian(100, 1.0, 1000, 1.0, s);
        ModelParams p{-1.0, 1.0, 0, 0, 1.0, 0.0, 0.0};
        auto hi = solve(p, b, Scheme::maximal);
        auto lo = solve(p, b, Scheme::minimal);
        double gap = 0.0;
        for (double t : b.times) {
            const double d = hi.base.at(t) - lo.base.at(t);
            CHECK(d >= -1e-12);
            gap = std::max(gap, d);
        }
        // non-uniqueness can only come from a contact at time 0
        const double first_leave = 2.0 * b.times[1];
        if (b.values[1] != 0.0) CHECK(gap <= 2.0 * first_leave + 1e-12);
    }
}

TEST_CASE("alpha = 0 solutions are Lipschitz with the drift bound") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        auto b = fixtures::brownian(200, 1.0, 500, 2.0, s);
        ModelParams p{-2.0, 0.5, 0, 0, 2.0, 0.0, 0.1};
        auto x = solve(p, b);
        CHECK(lipschitz_constant(x.base) <= 2.0 * (1 + 1e-9));
    }
}

TEST_CASE("general integrator reduces to the exact one at alpha = 0") {
    auto b = fixtures::brownian(7, 1.0, 1000);
    ModelParams p{-1.0, 2.0, 0, 0, 1.0, 0.0, 0.05};
    auto x = solve(p, b);
    auto g = solve_general(p, b, 1e-10);
    CHECK(sup_gap(x.base, g.base, b.times) < 1e-10);
}

TEST_CASE("linear restoring side decays exponentially") {
    auto b = fixtures::make_path({0, 5}, {0, 0});
    ModelParams p{1.0, -1.0, 0, 1.0, 1.0, 0.0, 1.0};
    auto x = solve_general(p, b, 1e-12);
    for (double t : {0.1, 0.5, 1.0, 2.0, 5.0})
        CHECK(x.base.at(t) == doctest::Approx(std::exp(-t)).epsilon(1e-4));
    for (std::size_t k = 0; k < x.base.size(); ++k)
        CHECK(x.base.values[k] == doctest::Approx(std::exp(-x.base.times[k])).epsilon(1e-8));
}

TEST_CASE("departure from contact on a flat driver") {
    auto b = fixtures::make_path({0, 3}, {0, 0});
    ModelParams p{-1.0, 1.0, 0, 0, 1.0, 0.0, 0.0};
    auto x = solve(p, b);
    CHECK(x.base.at(2.0) == 2.0);
    auto y = solve(p, b, Scheme::minimal);
    CHECK(y.base.at(2.0) == -2.0);
    ModelParams q{-1.0, 1.0, 0.5, 0.5, 1.0, 0.0, 0.0};
    // X = B is the only solution with a vanishing drift at contact
    auto z = solve_general(q, b, 1e-10);
    CHECK(z.base.values.back() == 0.0);
}

TEST_CASE("singular exponents are clamped and flagged") {
    auto b = fixtures::brownian(9, 0.2, 200);
    ModelParams p{-1.0, 1.0, -0.5, -0.5, 1.0, 0.0, 0.0};
    auto x = solve_general(p, b, 1e-8);
    CHECK(x.singular_contacts >= 1);
    CHECK(std::isfinite(x.base.values.back()));
}

TEST_CASE("smoothed scheme: inactive band and initial slope") {
    auto b = fixtures::brownian(10, 1.0, 1000);
    ModelParams p{-1.0, 1.0, 0, 0, 1.0, 0.0, 50.0};
    auto x = solve_smoothed(p, b, 0.1);
    for (std::size_t k = 0; k < b.size(); k += 50)
        CHECK(x.base.at(b.times[k]) == doctest::Approx(50.0 + b.times[k]).epsilon(1e-13));

    auto flat = fixtures::make_path({0, 1}, {0, 0});
    ModelParams q{-1.0, 3.0, 0, 0, 1.0, 0.0, 0.0};
    auto y = solve_smoothed(q, flat, 0.1);
    const double h = 1e-4;
    CHECK(y.base.at(h) / h == doctest::Approx(1.0).epsilon(1e-2));
    CHECK(y.base.values[1] / y.base.times[1] == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("smoothed solutions converge to the sharp one and stay Lipschitz") {
    auto b = fixtures::brownian(12, 2.0, 2000);
    ModelParams p{-1.0, 1.0, 0, 0, 1.0, 0.0, 0.0};
    auto tab = convergence_study(p, b, {0.2, 0.1, 0.05, 0.025, 0.0125});
    REQUIRE(tab.rows.size() == 5);
    for (const auto& r : tab.rows) {
        CHECK(r.sup_gap >= 0.0);
        CHECK(r.lipschitz <= 1.0 + 1e-9);
    }
    CHECK(tab.rows.back().sup_gap < tab.rows.front().sup_gap);
    CHECK_THROWS_AS(convergence_study(p, b, {0.1, 0.2}), ConfigError);
}

TEST_CASE("delta push approaches the maximal solution from above") {
    auto fx = fixtures::example_two_eight(10);
    ModelParams p{-1.0, 1.0, 0, 0, 1.0, 0.0, 1.0};
    for (double delta : {1e-2, 1e-3}) {
        auto x = solve_delta(p, fx, delta);
        for (int k = 0; k <= 10; ++k) CHECK(x.base.at(k) == doctest::Approx(1.0 + k).epsilon(1e-14));
    }

    auto b = fixtures::brownian(13, 1.0, 1000);
    p.x0 = 0.0;
    auto ref = solve(p, b);
    auto d2 = solve_delta(p, b, 1e-2);
    auto d3 = solve_delta(p, b, 1e-3);
    for (double t : b.times) {
        CHECK(d2.base.at(t) >= ref.base.at(t) - 1e-12);
        CHECK(d3.base.at(t) >= ref.base.at(t) - 1e-12);
    }
    CHECK(sup_gap(ref.base, d3.base, b.times) < sup_gap(ref.base, d2.base, b.times));
}

TEST_CASE("flow is increasing and contracts when drifts attract") {
    auto b = fixtures::brownian(14, 1.0, 1000);
    ModelParams p{-1.0, 1.0, 0, 0, 1.0, 0.0, 0.0};
    auto one = solve_flow(p, b, {0.2}, 1.0);
    CHECK(one.values[0] == solve(p.with_x0(0.2), b).base.values.back());

    std::vector<double> xs;
    for (int i = -10; i <= 10; ++i) xs.push_back(0.05 * i);
    auto f = solve_flow(p, b, xs, 1.0);
    for (std::size_t i = 1; i < xs.size(); ++i) CHECK(f.values[i] > f.values[i - 1]);

    ModelParams q{1.0, -1.0, 0, 0, 1.0, 0.0, 0.0};
    auto g = solve_flow(q, b, xs, 1.0);
    for (std::size_t i = 1; i < xs.size(); ++i) {
        CHECK(g.values[i] >= g.values[i - 1]);
        CHECK(g.values[i] - g.values[i - 1] <= xs[i] - xs[i - 1] + 1e-12);
    }
}

TEST_CASE("solutions stay small relative to sqrt(t) near the start") {
    double prev = 1.0;
    for (double t : {1e-2, 1e-3}) {
        int big = 0;
        for (std::uint64_t i = 0; i < 1000; ++i) {
            auto b = fixtures::brownian(15, t, 1000, 1.0, i);
            ModelParams p{-1.0, 1.0, 0, 0, 1.0, 0.0, 0.0};
            auto x = solve(p, b);
            if (std::abs(x.base.values.back()) > std::pow(t, 0.6)) ++big;
        }
        const double frac = big / 1000.0;
        CHECK(frac <= 0.05);
        CHECK(frac <= prev);
        prev = frac;
    }
}
