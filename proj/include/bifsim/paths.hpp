#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bifsim/random.hpp"

namespace bifsim {

/// Uniform time grid on [t_start, t_end] with n_steps intervals.
struct GridSpec {
    double t_start = 0.0;
    double t_end = 1.0;
    std::size_t n_steps = 1;

    double dt() const noexcept { return (t_end - t_start) / static_cast<double>(n_steps); }
    void validate() const;
    /// Grid on [0, horizon] with the step closest to `dt` that divides it.
    static GridSpec from_step(double horizon, double dt);
};

enum class PathKind { driver, solution, envelope, difference, other };

/// A function of time sampled on a strictly increasing grid and read
/// piecewise-linearly between samples.
struct SampledPath {
    std::vector<double> times;
    std::vector<double> values;
    PathKind kind = PathKind::other;
    /// Variance rate of the Brownian law that produced the path; 0 if none.
    double sigma2 = 0.0;

    std::size_t size() const noexcept { return times.size(); }
    bool empty() const noexcept { return times.empty(); }
    double front_time() const { return times.front(); }
    double back_time() const { return times.back(); }
    bool is_brownian() const noexcept { return kind == PathKind::driver && sigma2 > 0.0; }

    /// Linear interpolation; throws DomainError outside [front_time, back_time].
    double at(double t) const;
    /// Index k with times[k] <= t < times[k+1] (last segment for t == back_time).
    std::size_t segment_index(double t) const;
    /// Throws ConfigError unless lengths match and times strictly increase.
    void validate() const;
    /// Restriction to [t0, t1]; endpoints are added by interpolation if needed.
    SampledPath slice(double t0, double t1) const;
    void push_back(double t, double v) {
        times.push_back(t);
        values.push_back(v);
    }
};

/// Brownian path on `grid` with E B_t^2 = sigma2 |t| and B_0 = 0.
///
/// t_start must be <= 0. If the grid straddles 0, time 0 must be a grid point
/// and the two halves are independent (lanes 0 and 1 of `seed`). A grid that
/// ends at or before 0 is anchored at time 0 outside the window.
SampledPath sample_brownian(const GridSpec& grid, double sigma2, const Seed& seed);

/// Two-sided path on [-T, T] with n_steps intervals per side; value 0 at 0.
SampledPath sample_two_sided(double T, std::size_t n_steps, double sigma2, const Seed& seed);

/// Inserts factor-1 Brownian-bridge points inside every interval.
/// Original samples are kept bit-for-bit.
SampledPath refine_bridge(const SampledPath& path, std::size_t factor, const Seed& seed);

/// t -> -t. Involutive.
SampledPath time_reverse(const SampledPath& path);

/// Source of driver samples for the solvers; may grow on demand.
class DriverSource {
public:
    virtual ~DriverSource() = default;
    virtual const SampledPath& path() const = 0;
    /// Appends samples at the end; false when the path cannot grow.
    virtual bool extend() = 0;
};

/// Wraps a finite path.
class FixedDriver final : public DriverSource {
public:
    explicit FixedDriver(const SampledPath& p) : path_(p) {}
    const SampledPath& path() const override { return path_; }
    bool extend() override { return false; }

private:
    const SampledPath& path_;
};

/// Brownian path from (0, 0) that is generated in chunks as the solver asks
/// for more. Its samples coincide with `sample_brownian` on [0, k dt] for
/// the same seed.
class BrownianExtender final : public DriverSource {
public:
    BrownianExtender(double dt, double sigma2, const Seed& seed, std::size_t chunk = 4096,
                     double max_time = 1e9);
    const SampledPath& path() const override { return path_; }
    bool extend() override;
    /// Extends until the path covers time t (or max_time is reached).
    void ensure(double t);
    double dt() const noexcept { return dt_; }

private:
    SampledPath path_;
    RandomStream stream_;
    double dt_;
    double scale_;
    std::size_t chunk_;
    double max_time_;
};

// ---- serialization --------------------------------------------------------

/// CSV with a two-column header, `t,value` by default.
void write_csv(std::ostream& os, const SampledPath& path, const std::string& value_name = "value");
SampledPath read_csv(std::istream& is);

/// Binary columnar layout, all little-endian:
///   8 bytes  magic "BIFPATH1"
///   u64      n
///   f64 x n  times
///   f64 x n  values
void write_binary(std::ostream& os, const SampledPath& path);
SampledPath read_binary(std::istream& is);

} // namespace bifsim
