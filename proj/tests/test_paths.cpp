#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "bifsim/error.hpp"
#include "bifsim/paths.hpp"
#include "bifsim/solver.hpp"
#include "bifsim/stats.hpp"
#include "fixtures.hpp"

using namespace bifsim;

TEST_CASE("single-step grid has two points starting at zero") {
    auto p = sample_brownian({0.0, 1.0, 1}, 1.0, Seed{7, 0, 0});
    REQUIRE(p.size() == 2);
    CHECK(p.values[0] == 0.0);
    CHECK(p.times[1] == 1.0);
}

TEST_CASE("invalid grids are rejected") {
    CHECK_THROWS_AS(sample_brownian({1.0, 1.0, 4}, 1.0, Seed{1}), ConfigError);
    CHECK_THROWS_AS(sample_brownian({0.0, 1.0, 0}, 1.0, Seed{1}), ConfigError);
    CHECK_THROWS_AS(sample_brownian({0.5, 1.0, 4}, 1.0, Seed{1}), ConfigError);
    CHECK_THROWS_AS(sample_brownian({0.0, 1.0, 4}, 0.0, Seed{1}), ConfigError);
    CHECK_THROWS_AS(sample_two_sided(0.0, 4, 1.0, Seed{1}), ConfigError);
}

TEST_CASE("same seed gives the same path bit for bit") {
    auto a = fixtures::brownian(42, 1.0, 1000, 1.0, 3);
    auto b = fixtures::brownian(42, 1.0, 1000, 1.0, 3);
    auto c = fixtures::brownian(42, 1.0, 1000, 1.0, 4);
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
}

TEST_CASE("second moment of B_1 matches sigma2") {
    for (double s2 : {1.0, 4.0}) {
        std::vector<double> sq(100000);
        for (std::size_t i = 0; i < sq.size(); ++i) {
            auto p = sample_brownian({0.0, 1.0, 4}, s2, Seed{11, i, 0});
            sq[i] = p.values.back() * p.values.back();
        }
        auto e = estimate(sq, 11, s2);
        INFO("sigma2=" << s2 << " mean=" << e.mean << " se=" << e.stderr_);
        CHECK(e.within_se(3.0));
    }
}

TEST_CASE("standardized increments pass a normality test") {
    auto p = fixtures::brownian(5, 10.0, 10000, 2.0);
    const double sd = std::sqrt(2.0 * 1e-3);
    std::vector<double> z;
    for (std::size_t k = 1; k < p.size(); ++k) z.push_back((p.values[k] - p.values[k - 1]) / sd);
    CHECK(ks_one_sample(z, normal_cdf).p_value > 0.01);
}

TEST_CASE("two-sided paths: anchored, independent halves, correct variance") {
    auto p = sample_two_sided(1.0, 8, 1.0, Seed{3});
    REQUIRE(p.size() == 17);
    CHECK(p.times.front() == -1.0);
    CHECK(p.times[8] == 0.0);
    CHECK(p.values[8] == 0.0);

    const std::size_t n = 20000;
    std::vector<double> prod(n), back(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto q = sample_two_sided(1.0, 4, 1.0, Seed{99, i, 0});
        prod[i] = q.values.front() * q.values.back();
        back[i] = q.values.front() * q.values.front();
    }
    auto c = estimate(prod, 99, 0.0);
    auto v = estimate(back, 99, 1.0);
    CHECK(c.within_se(3.0));
    CHECK(v.within_se(3.0));
}

TEST_CASE("bridge refinement keeps coarse samples and has fine-step variance") {
    auto coarse = fixtures::brownian(8, 1.0, 100, 1.5);
    coarse.kind = PathKind::driver;
    auto fine = refine_bridge(coarse, 4, Seed{8, 0, 5});
    REQUIRE(fine.size() == 401);
    for (std::size_t k = 0; k < coarse.size(); ++k) {
        CHECK(fine.times[4 * k] == coarse.times[k]);
        CHECK(fine.values[4 * k] == coarse.values[k]);
    }

    std::vector<double> sq;
    for (std::size_t i = 0; i < 400; ++i) {
        auto c = fixtures::brownian(21, 1.0, 10, 1.5, i);
        auto f = refine_bridge(c, 5, Seed{21, i, 9});
        for (std::size_t k = 1; k < f.size(); ++k)
            sq.push_back(std::pow(f.values[k] - f.values[k - 1], 2));
    }
    auto e = estimate(sq, 21, 1.5 * 0.02);
    CHECK(e.within_se(3.0));
}

TEST_CASE("two refinements by 2 match one refinement by 4 in law") {
    std::vector<double> a, b;
    for (std::size_t i = 0; i < 5000; ++i) {
        auto c = fixtures::brownian(31, 1.0, 1, 1.0, i);
        auto twice = refine_bridge(refine_bridge(c, 2, Seed{31, i, 2}), 2, Seed{31, i, 3});
        auto once = refine_bridge(c, 4, Seed{31, i, 4});
        a.push_back(twice.values[1]);
        b.push_back(once.values[1]);
    }
    CHECK(ks_two_sample(a, b).p_value > 0.01);
}

TEST_CASE("refinement needs a Brownian path") {
    auto p = fixtures::make_path({0, 1}, {0, 1});
    CHECK_THROWS_AS(refine_bridge(p, 2, Seed{1}), UnsupportedPathError);
    auto q = fixtures::brownian(1, 1.0, 4);
    CHECK_THROWS_AS(refine_bridge(q, 1, Seed{1}), ConfigError);
}

TEST_CASE("time reversal is an involution") {
    auto p = sample_two_sided(2.0, 50, 1.0, Seed{4});
    auto r = time_reverse(p);
    CHECK(r.times.front() == -p.times.back());
    auto rr = time_reverse(r);
    CHECK(rr.times == p.times);
    CHECK(rr.values == p.values);

    auto single = fixtures::make_path({2.5}, {1.25});
    auto rs = time_reverse(single);
    CHECK(rs.times[0] == -2.5);
    CHECK(rs.values[0] == 1.25);
}

TEST_CASE("solving backwards with negated drifts retraces the forward solution") {
    // steep zigzag driver: every contact is a transversal crossing; the forward
    // drifts repel so the backward problem is the well-conditioned one
    SampledPath b;
    double t = 0.0, v = 0.0;
    RandomStream rs(Seed{77});
    for (int k = 0; k < 60; ++k) {
        b.push_back(t, v);
        const double len = 0.05 + 0.2 * rs.uniform();
        v += (k % 2 == 0 ? 3.0 : -3.0) * len;
        t += len;
    }
    ModelParams fwd{-1.0, 1.0, 0, 0, 1.0, 0.0, 0.1};
    auto x = solve(fwd, b);

    ModelParams bwd{1.0, -1.0, 0, 0, 1.0, -b.back_time(), x.base.values.back()};
    auto xr = solve(bwd, time_reverse(b));
    auto back = time_reverse(xr.base);
    for (std::size_t k = 0; k < b.size(); ++k)
        CHECK(back.at(b.times[k]) == doctest::Approx(x.base.at(b.times[k])).epsilon(1e-10));
}

TEST_CASE("extender reproduces the one-shot sampler") {
    BrownianExtender ext(1e-3, 2.0, Seed{12, 5, 0}, 64);
    ext.ensure(0.5);
    auto ref = sample_brownian({0.0, 0.5, 500}, 2.0, Seed{12, 5, 0});
    const auto& p = ext.path();
    REQUIRE(p.size() >= 501);
    for (std::size_t k = 0; k <= 500; ++k) CHECK(p.values[k] == ref.values[k]);
}

TEST_CASE("csv and binary round trips") {
    auto p = fixtures::brownian(2, 1.0, 37);
    std::stringstream csv;
    write_csv(csv, p);
    CHECK(csv.str().rfind("t,value\n", 0) == 0);
    auto q = read_csv(csv);
    CHECK(q.times == p.times);
    CHECK(q.values == p.values);

    std::stringstream bin;
    write_binary(bin, p);
    auto r = read_binary(bin);
    CHECK(r.times == p.times);
    CHECK(r.values == p.values);

    std::stringstream bad("nonsense");
    CHECK_THROWS(read_binary(bad));
}

TEST_CASE("interpolation and coverage") {
    auto p = fixtures::make_path({0, 1, 3}, {0, 2, 0});
    CHECK(p.at(0.5) == 1.0);
    CHECK(p.at(2.0) == 1.0);
    CHECK(p.at(3.0) == 0.0);
    CHECK_THROWS_AS(p.at(3.5), DomainError);
    auto s = p.slice(0.5, 2.0);
    CHECK(s.times.front() == 0.5);
    CHECK(s.values.back() == 1.0);
}
