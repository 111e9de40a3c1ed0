#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "bifsim/analytics.hpp"
#include "bifsim/error.hpp"
#include "bifsim/lipschitz.hpp"
#include "bifsim/montecarlo.hpp"
#include "bifsim/stats.hpp"
#include "fixtures.hpp"

using namespace bifsim;

namespace {

// max_j (B_j - beta |t_i - t_j|), written exactly as the definition reads
SampledPath brute_upper(const SampledPath& B, double beta) {
    SampledPath z = B;
    for (std::size_t i = 0; i < B.size(); ++i) {
        double m = -INFINITY;
        for (std::size_t j = 0; j < B.size(); ++j) {
            const double v = j <= i ? B.values[j] - beta * (B.times[i] - B.times[j])
                                    : B.values[j] - beta * (B.times[j] - B.times[i]);
            m = std::max(m, v);
        }
        z.values[i] = m;
    }
    return z;
}

SampledPath negate(SampledPath p) {
    for (double& v : p.values) v = -v;
    return p;
}

std::vector<StationaryPair> pairs(std::size_t n, double beta, double sigma2, double T, double dt,
                                  std::uint64_t master) {
    return run_trials<StationaryPair>(n, [&](std::size_t i) {
        return sample_stationary_pair(beta, sigma2, T, static_cast<std::size_t>(std::llround(T / dt)),
                                      Seed{master, i, 0});
    });
}

} // namespace

TEST_CASE("an envelope of a beta-Lipschitz path is the path itself") {
    const auto B = fixtures::make_path({0, 1, 2, 3, 4, 5}, {0, 0.5, 0.2, -0.3, -0.3, 0.1});
    CHECK(upper_envelope(B, 0.5).values == B.values);
    CHECK(lower_envelope(B, 0.5).values == B.values);
}

TEST_CASE("hat spike") {
    SampledPath B;
    for (int k = -40; k <= 40; ++k) {
        const double t = 0.05 * k;
        B.push_back(t, k == 0 ? 1.0 : 0.0);
    }
    const auto Z = upper_envelope(B, 0.5);
    for (std::size_t i = 0; i < B.size(); ++i)
        CHECK(Z.values[i] == doctest::Approx(std::max(1.0 - 0.5 * std::abs(B.times[i]), 0.0)).epsilon(1e-14));
}

TEST_CASE("linear-time envelopes equal the quadratic oracle") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto B = fixtures::brownian(300 + s, 5.0, 400);
        const double beta = 0.5 + 0.25 * static_cast<double>(s % 5);
        CHECK(upper_envelope(B, beta).values == brute_upper(B, beta).values);
        CHECK(lower_envelope(B, beta).values == negate(brute_upper(negate(B), beta)).values);
    }
}

TEST_CASE("envelope invariants on a Brownian fixture") {
    const double dt = 1e-3, beta = 1.0;
    const auto B = fixtures::brownian(11, 60.0, 60000);
    const auto e = envelopes(B, beta, default_margin(beta, 1.0));
    double min_up = INFINITY, min_lo = INFINITY;
    for (std::size_t i = 0; i < B.size(); ++i) {
        REQUIRE(e.lower.values[i] <= B.values[i]);
        REQUIRE(B.values[i] <= e.upper.values[i]);
        if (i > 0) {
            REQUIRE(std::abs(e.upper.values[i] - e.upper.values[i - 1]) <= beta * dt * (1 + 1e-9));
            REQUIRE(std::abs(e.lower.values[i] - e.lower.values[i - 1]) <= beta * dt * (1 + 1e-9));
        }
        if (B.times[i] >= e.inner_window.t0 && B.times[i] <= e.inner_window.t1) {
            min_up = std::min(min_up, e.upper.values[i] - B.values[i]);
            min_lo = std::min(min_lo, B.values[i] - e.lower.values[i]);
        }
    }
    CHECK(min_up <= 2.0 * std::sqrt(dt));
    CHECK(min_lo <= 2.0 * std::sqrt(dt));
    CHECK_THROWS_AS(upper_envelope(B, 0.0), ConfigError);
}

TEST_CASE("bisection on a zero driver finds 0") {
    const auto B = fixtures::make_path({0, 10, 20, 30}, {0, 0, 0, 0});
    const auto r = find_xstar_bisection(1.0, B, 1e-10);
    CHECK(std::abs(r.x_bar) <= 1e-10);
    CHECK(r.hi - r.lo <= 1e-10);
}

TEST_CASE("bisection is sandwiched by the envelopes and halves its bracket") {
    const double beta = 1.0;
    for (std::uint64_t s = 0; s < 6; ++s) {
        const auto B = fixtures::brownian(40 + s, 30.0, 30000);
        const auto r = find_xstar_bisection(beta, B, 1e-9, 1e-3);
        const auto e = envelopes(B, beta, 0.0);
        CHECK(e.lower.values[0] <= r.x_bar);
        CHECK(r.x_bar <= e.upper.values[0]);
        double maxabs = 0.0;
        for (double b : B.values) maxabs = std::max(maxabs, std::abs(b));
        const double w0 = 2.0 * (maxabs + beta * 30.0);
        CHECK(r.hi - r.lo == doctest::Approx(w0 / std::ldexp(1.0, static_cast<int>(r.iterations))).epsilon(1e-12));
        CHECK(r.hi - r.lo <= 1e-9);
    }
}

TEST_CASE("a coarse bisection point leaves B early") {
    for (std::uint64_t s = 0; s < 4; ++s) {
        const auto B = fixtures::brownian(70 + s, 60.0, 60000);
        CHECK(find_xstar_bisection(1.0, B, 1e-6, 1e-3).horizon_flag);
    }
}

TEST_CASE("bisection needs time to separate nearby solutions") {
    const auto B = fixtures::brownian(7, 0.5, 500);
    CHECK_THROWS_AS(find_xstar_bisection(1.0, B, 1e-12), HorizonExceeded);
}

TEST_CASE("stationary pair: Lipschitz, recurrent, Brownian driver") {
    const double beta = 1.0, dt = 1e-3;
    const auto pr = sample_stationary_pair(beta, 1.0, 100.0, 100000, Seed{3, 0, 0});
    REQUIRE(pr.driver.times == pr.xstar.times);
    CHECK(pr.driver.values.front() == 0.0);
    CHECK(pr.xstar.values.back() - pr.driver.values.back() == doctest::Approx(-pr.y0).epsilon(1e-12));
    int changes = 0;
    std::vector<double> inc;
    for (std::size_t i = 1; i < pr.driver.size(); ++i) {
        const double h = pr.xstar.times[i] - pr.xstar.times[i - 1];
        REQUIRE(std::abs(pr.xstar.values[i] - pr.xstar.values[i - 1]) <= beta * h * (1 + 1e-9));
        const double a = pr.driver.values[i - 1] - pr.xstar.values[i - 1];
        const double b = pr.driver.values[i] - pr.xstar.values[i];
        changes += (a > 0.0) != (b > 0.0);
        inc.push_back((pr.driver.values[i] - pr.driver.values[i - 1]) / std::sqrt(dt));
    }
    CHECK(changes > 50);
    CHECK(ks_one_sample(inc, normal_cdf).p_value > 0.01);
}

TEST_CASE("stationary pair: middle marginal follows the two-sided exponential") {
    const double beta = 1.0, sigma2 = 1.0;
    // dt = 1e-3 leaves an atom of about 1.5% at 0 from sliding on the grid
    const auto y = run_trials<double>(10000, [&](std::size_t i) {
        const auto p = sample_stationary_pair(beta, sigma2, 4.0, 40000, Seed{17, i, 0});
        return p.driver.values[20000] - p.xstar.values[20000];
    });
    const auto ks = ks_one_sample(y, [&](double v) { return stationary_cdf(v, beta, sigma2); });
    CHECK(ks.p_value > 0.01);
}

TEST_CASE("gap statistics and Brownian scaling") {
    const double beta = 1.0;
    const auto g1 = gap_ensemble(beta, 1.0, 100.0, 400000, 300, 21, default_margin(beta, 1.0));
    CHECK_FALSE(g1.low_statistics);
    CHECK(g1.abs_gap.within_se(3.0));
    CHECK(g1.upper.within_rel(0.05));
    CHECK(g1.lower.within_rel(0.05));
    CHECK(g1.width.within_rel(0.05));
    CHECK(g1.width.mean == doctest::Approx(g1.upper.mean + g1.lower.mean).epsilon(1e-9));

    const auto g2 = gap_ensemble(beta, 2.0, 100.0, 400000, 300, 22, default_margin(beta, 2.0));
    for (auto [a, b] : {std::pair{g1.abs_gap, g2.abs_gap}, {g1.upper, g2.upper}, {g1.lower, g2.lower}}) {
        const double se = std::hypot(2.0 * a.stderr_, b.stderr_);
        CHECK(std::abs(b.mean - 2.0 * a.mean) <= 3.0 * se);
    }
    CHECK_THROWS_AS(gap_statistics(pairs(2, beta, 1.0, 10.0, 1e-2, 1), beta, 1.0, 6.0), ConfigError);
    CHECK(gap_statistics(pairs(2, beta, 1.0, 10.0, 1e-2, 1), beta, 1.0, 1.0).low_statistics);
}

TEST_CASE("log growth of a constant gap vanishes") {
    SampledPath g;
    for (int k = 0; k <= 100000; ++k) g.push_back(0.1 * k, 2.0);
    const auto w = log_growth_estimate(g);
    REQUIRE(w.size() >= 10);
    for (std::size_t i = 1; i < w.size(); ++i) CHECK(w[i].value < w[i - 1].value);
    CHECK(w.back().value == doctest::Approx(2.0 / std::log(8192.0)));
    CHECK(w.back().t_hi == 10000.0);
}

TEST_CASE("log growth brackets on a long stationary pair") {
    const double beta = 1.0;
    const auto pr = sample_stationary_pair(beta, 1.0, 1e4, 1000000, Seed{5, 0, 0});
    const auto gx = log_growth_estimate(abs_difference(pr.driver, pr.xstar));
    CHECK(gx.back().value >= 0.25);
    CHECK(gx.back().value <= 0.9);
    const auto gl = log_growth_estimate(abs_difference(lower_envelope(pr.driver, beta), pr.driver));
    CHECK(gl.back().value >= 0.125);
}

TEST_CASE("bisection and stationary construction agree in law") {
    const double beta = 1.0;
    const auto xb = run_trials<double>(200, [&](std::size_t i) {
        const auto B = fixtures::brownian(900, 30.0, 30000, 1.0, i);
        return find_xstar_bisection(beta, B, 1e-6, 1e-2).x_bar - B.values[0];
    });
    const auto st = run_trials<double>(2000, [&](std::size_t i) {
        const auto p = sample_stationary_pair(beta, 1.0, 20.0, 20000, Seed{901, i, 0});
        return p.xstar.values[0] - p.driver.values[0];
    });
    CHECK(ks_two_sample(xb, st).p_value > 0.01);
}

TEST_CASE("csv layouts") {
    const auto pr = sample_stationary_pair(1.0, 1.0, 1.0, 10, Seed{1, 0, 0});
    std::ostringstream a, b;
    write_pair_csv(a, pr);
    write_envelope_csv(b, pr.driver, envelopes(pr.driver, 1.0, 0.0));
    CHECK(a.str().rfind("t,B,Xstar\n", 0) == 0);
    CHECK(b.str().rfind("t,B,Zplus,Zminus\n", 0) == 0);
    const std::string rows = a.str();
    CHECK(std::count(rows.begin(), rows.end(), '\n') == 12);
}
