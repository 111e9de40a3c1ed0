#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "bifsim/paths.hpp"

namespace fixtures {

// |a - b| <= tol |b|
inline bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::abs(b); }

inline bifsim::SampledPath make_path(std::vector<double> t, std::vector<double> v) {
    bifsim::SampledPath p;
    p.times = std::move(t);
    p.values = std::move(v);
    p.kind = bifsim::PathKind::other;
    return p;
}

inline bifsim::SampledPath brownian(std::uint64_t seed, double T, std::size_t n, double sigma2 = 1.0,
                                    std::uint64_t trial = 0) {
    return bifsim::sample_brownian({0.0, T, n}, sigma2, bifsim::Seed{seed, trial, 0});
}

// B = 2t on [0,1], then flat at 2, on integer grid points up to T.
inline bifsim::SampledPath example_two_eight(int T = 10) {
    bifsim::SampledPath p;
    for (int k = 0; k <= T; ++k) p.push_back(k, k == 0 ? 0.0 : 2.0);
    return p;
}

} // namespace fixtures
