#pragma once

#include <cmath>
#include <cstdint>

namespace bifsim {

/// Finalizer of SplitMix64. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Identifies one independent random stream.
///
/// A stream key is `mix64(mix64(master) ^ mix64(trial * K1 + lane * K2))`.
/// Trial i of a Monte Carlo run always uses (master, i), so results do not
/// depend on the order in which trials are executed. `lane` separates
/// sub-streams inside a trial (backward half of a two-sided path, bridge
/// refinement, initial draws, ...).
struct Seed {
    std::uint64_t master = 0;
    std::uint64_t trial = 0;
    std::uint64_t lane = 0;

    Seed with_trial(std::uint64_t i) const noexcept { return {master, i, lane}; }
    Seed with_lane(std::uint64_t l) const noexcept { return {master, trial, l}; }

    std::uint64_t key() const noexcept {
        constexpr std::uint64_t k1 = 0x9E3779B97F4A7C15ULL;
        constexpr std::uint64_t k2 = 0xD1B54A32D192ED03ULL;
        return mix64(mix64(master) ^ mix64(trial * k1 + (lane + 1) * k2));
    }
};

/// Counter-based generator: the n-th output is mix64(key + n * golden).
///
/// Gaussians use the Marsaglia polar method on 53-bit uniforms; the second
/// variate of each accepted pair is cached. The algorithm is fixed so that
/// paths are bit-identical across platforms and standard libraries.
class RandomStream {
public:
    explicit RandomStream(const Seed& seed) noexcept : key_(seed.key()) {}

    std::uint64_t next_u64() noexcept {
        ++counter_;
        return mix64(key_ + counter_ * 0x9E3779B97F4A7C15ULL);
    }

    /// Uniform on [0, 1).
    double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1).
    double uniform_open() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    double exponential(double mean) noexcept { return -mean * std::log(uniform_open()); }

    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace bifsim
