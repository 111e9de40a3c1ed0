#include "bifsim/paths.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

#include "bifsim/error.hpp"

namespace bifsim {

void GridSpec::validate() const {
    if (!(t_start < t_end)) throw ConfigError("grid: t_start must be < t_end");
    if (n_steps < 1) throw ConfigError("grid: n_steps must be >= 1");
    if (!(dt() > 0.0)) throw ConfigError("grid: step must be positive");
}

GridSpec GridSpec::from_step(double horizon, double dt) {
    if (!(horizon > 0.0) || !(dt > 0.0)) throw ConfigError("grid: horizon and dt must be positive");
    const auto n = static_cast<std::size_t>(std::max(1.0, std::round(horizon / dt)));
    return {0.0, horizon, n};
}

double SampledPath::at(double t) const {
    if (empty() || t < times.front() || t > times.back())
        throw DomainError("path does not cover t = " + std::to_string(t));
    const std::size_t k = segment_index(t);
    if (k + 1 >= size()) return values.back();
    const double t0 = times[k], t1 = times[k + 1];
    const double w = (t - t0) / (t1 - t0);
    return values[k] + w * (values[k + 1] - values[k]);
}

std::size_t SampledPath::segment_index(double t) const {
    if (size() < 2) return 0;
    auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.begin()) return 0;
    std::size_t k = static_cast<std::size_t>(it - times.begin()) - 1;
    return std::min(k, size() - 2);
}

void SampledPath::validate() const {
    if (times.size() != values.size()) throw ConfigError("path: times/values length mismatch");
    for (std::size_t k = 1; k < times.size(); ++k)
        if (!(times[k] > times[k - 1])) throw ConfigError("path: times must be strictly increasing");
}

SampledPath SampledPath::slice(double t0, double t1) const {
    if (!(t0 <= t1)) throw ConfigError("slice: t0 must be <= t1");
    SampledPath out;
    out.kind = kind;
    out.sigma2 = sigma2;
    out.push_back(t0, at(t0));
    for (std::size_t k = 0; k < size(); ++k)
        if (times[k] > t0 && times[k] < t1) out.push_back(times[k], values[k]);
    if (t1 > t0) out.push_back(t1, at(t1));
    return out;
}

namespace {

void check_sigma2(double sigma2) {
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw ConfigError("sigma2 must be positive");
}

} // namespace

SampledPath sample_brownian(const GridSpec& grid, double sigma2, const Seed& seed) {
    grid.validate();
    check_sigma2(sigma2);
    if (grid.t_start > 0.0)
        throw ConfigError("grid: t_start > 0 is not supported; generate from 0 and slice");

    const std::size_t n = grid.n_steps;
    const double dt = grid.dt();
    const double scale = std::sqrt(sigma2 * dt);

    SampledPath p;
    p.kind = PathKind::driver;
    p.sigma2 = sigma2;
    p.times.resize(n + 1);
    p.values.assign(n + 1, 0.0);
    for (std::size_t k = 0; k <= n; ++k) p.times[k] = grid.t_start + static_cast<double>(k) * dt;
    p.times[n] = grid.t_end;

    if (grid.t_start == 0.0) {
        RandomStream fwd(seed.with_lane(0));
        for (std::size_t k = 1; k <= n; ++k) p.values[k] = p.values[k - 1] + scale * fwd.normal();
        return p;
    }

    if (grid.t_end <= 0.0) {
        // anchor at time 0 beyond the right end of the window
        RandomStream bwd(seed.with_lane(1));
        p.values[n] = std::sqrt(sigma2 * -grid.t_end) * bwd.normal();
        for (std::size_t k = n; k-- > 0;) p.values[k] = p.values[k + 1] + scale * bwd.normal();
        return p;
    }

    const double k0_real = -grid.t_start / dt;
    const auto k0 = static_cast<std::size_t>(std::llround(k0_real));
    if (std::abs(k0_real - static_cast<double>(k0)) > 1e-9 || k0 == 0 || k0 >= n)
        throw ConfigError("grid: time 0 must be a grid point when t_start < 0 < t_end");
    p.times[k0] = 0.0;
    RandomStream fwd(seed.with_lane(0));
    for (std::size_t k = k0 + 1; k <= n; ++k) p.values[k] = p.values[k - 1] + scale * fwd.normal();
    RandomStream bwd(seed.with_lane(1));
    for (std::size_t k = k0; k-- > 0;) p.values[k] = p.values[k + 1] + scale * bwd.normal();
    return p;
}

SampledPath sample_two_sided(double T, std::size_t n_steps, double sigma2, const Seed& seed) {
    if (!(T > 0.0)) throw ConfigError("two-sided path: T must be positive");
    if (n_steps < 1) throw ConfigError("two-sided path: n_steps must be >= 1");
    return sample_brownian(GridSpec{-T, T, 2 * n_steps}, sigma2, seed);
}

SampledPath refine_bridge(const SampledPath& path, std::size_t factor, const Seed& seed) {
    if (factor < 2) throw ConfigError("refine_bridge: factor must be >= 2");
    if (!path.is_brownian())
        throw UnsupportedPathError("refine_bridge: path is not a Brownian driver with known sigma2");
    path.validate();

    SampledPath out;
    out.kind = path.kind;
    out.sigma2 = path.sigma2;
    const std::size_t n = path.size();
    out.times.reserve((n - 1) * factor + 1);
    out.values.reserve((n - 1) * factor + 1);

    RandomStream rs(seed);
    const double f = static_cast<double>(factor);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double s = path.times[k], u = path.times[k + 1];
        const double b = path.values[k + 1];
        out.push_back(s, path.values[k]);
        double left_t = s, left_v = path.values[k];
        for (std::size_t j = 1; j < factor; ++j) {
            const double r = s + (u - s) * (static_cast<double>(j) / f);
            const double w = (r - left_t) / (u - left_t);
            const double mean = left_v + w * (b - left_v);
            const double var = path.sigma2 * (r - left_t) * (u - r) / (u - left_t);
            const double v = mean + std::sqrt(var) * rs.normal();
            out.push_back(r, v);
            left_t = r;
            left_v = v;
        }
    }
    out.push_back(path.times.back(), path.values.back());
    return out;
}

SampledPath time_reverse(const SampledPath& path) {
    SampledPath out;
    out.kind = path.kind;
    out.sigma2 = path.sigma2;
    out.times.resize(path.size());
    out.values.resize(path.size());
    const std::size_t n = path.size();
    for (std::size_t k = 0; k < n; ++k) {
        out.times[k] = -path.times[n - 1 - k];
        out.values[k] = path.values[n - 1 - k];
    }
    return out;
}

BrownianExtender::BrownianExtender(double dt, double sigma2, const Seed& seed, std::size_t chunk,
                                   double max_time)
    : stream_(seed.with_lane(0)), dt_(dt), chunk_(std::max<std::size_t>(chunk, 1)),
      max_time_(max_time) {
    if (!(dt > 0.0)) throw ConfigError("driver: dt must be positive");
    check_sigma2(sigma2);
    scale_ = std::sqrt(sigma2 * dt);
    path_.kind = PathKind::driver;
    path_.sigma2 = sigma2;
    path_.push_back(0.0, 0.0);
}

bool BrownianExtender::extend() {
    if (path_.times.back() >= max_time_) return false;
    const std::size_t n0 = path_.size();
    for (std::size_t j = 0; j < chunk_; ++j) {
        const std::size_t k = n0 + j;
        path_.push_back(static_cast<double>(k) * dt_, path_.values.back() + scale_ * stream_.normal());
    }
    return true;
}

void BrownianExtender::ensure(double t) {
    while (path_.times.back() < t && extend()) {
    }
}

// ---- serialization --------------------------------------------------------

void write_csv(std::ostream& os, const SampledPath& path, const std::string& value_name) {
    os << "t," << value_name << '\n';
    os.precision(17);
    for (std::size_t k = 0; k < path.size(); ++k) os << path.times[k] << ',' << path.values[k] << '\n';
}

SampledPath read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("csv: missing header");
    SampledPath p;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ConfigError("csv: expected two columns");
        p.push_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
    }
    p.validate();
    return p;
}

namespace {

constexpr std::array<char, 8> kMagic = {'B', 'I', 'F', 'P', 'A', 'T', 'H', '1'};

template <class T>
T to_little(T v) {
    if constexpr (std::endian::native == std::endian::little) {
        return v;
    } else {
        auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
        std::reverse(bytes.begin(), bytes.end());
        return std::bit_cast<T>(bytes);
    }
}

template <class T>
void put(std::ostream& os, T v) {
    v = to_little(v);
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
    T v{};
    if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw ConfigError("binary path: truncated");
    return to_little(v);
}

} // namespace

void write_binary(std::ostream& os, const SampledPath& path) {
    os.write(kMagic.data(), kMagic.size());
    put<std::uint64_t>(os, path.size());
    for (double t : path.times) put(os, t);
    for (double v : path.values) put(os, v);
}

SampledPath read_binary(std::istream& is) {
    std::array<char, 8> magic{};
    if (!is.read(magic.data(), magic.size()) || magic != kMagic)
        throw ConfigError("binary path: bad magic");
    const auto n = get<std::uint64_t>(is);
    SampledPath p;
    p.times.resize(n);
    p.values.resize(n);
    for (auto& t : p.times) t = get<double>(is);
    for (auto& v : p.values) v = get<double>(is);
    p.validate();
    return p;
}

} // namespace bifsim
