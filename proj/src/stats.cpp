#include "bifsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include <boost/math/distributions/chi_squared.hpp>

#include "bifsim/error.hpp"
#include "bifsim/montecarlo.hpp"

namespace bifsim {

double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 16) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

bool McEstimate::within_se(double k) const {
    if (!theory) return false;
    return std::abs(mean - *theory) <= k * stderr_;
}

bool McEstimate::within_rel(double rel) const {
    if (!theory) return false;
    return std::abs(mean - *theory) <= rel * std::abs(*theory);
}

double sample_variance(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    const double mean = pairwise_sum(xs) / static_cast<double>(xs.size());
    std::vector<double> sq(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) sq[i] = (xs[i] - mean) * (xs[i] - mean);
    return pairwise_sum(sq) / static_cast<double>(xs.size() - 1);
}

McEstimate estimate(std::span<const double> xs, std::uint64_t master_seed, std::optional<double> theory) {
    McEstimate e;
    e.n_trials = xs.size();
    e.master_seed = master_seed;
    e.theory = theory;
    if (xs.empty()) return e;
    e.mean = pairwise_sum(xs) / static_cast<double>(xs.size());
    e.stderr_ = std::sqrt(sample_variance(xs) / static_cast<double>(xs.size()));
    if (theory && e.stderr_ > 0.0) e.z_score = (e.mean - *theory) / e.stderr_;
    return e;
}

double kolmogorov_sf(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 0.2) return 1.0;
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        s += (k % 2 == 1 ? term : -term);
        if (term < 1e-17) break;
    }
    return std::clamp(2.0 * s, 0.0, 1.0);
}

TestResult ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf) {
    if (xs.empty()) throw ConfigError("ks_one_sample: empty sample");
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    const double sn = std::sqrt(n);
    return {d, kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d), 0.0};
}

TestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw ConfigError("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    const double ne = std::sqrt(na * nb / (na + nb));
    return {d, kolmogorov_sf((ne + 0.12 + 0.11 / ne) * d), 0.0};
}

TestResult chi_square_gof(const std::vector<double>& observed, const std::vector<double>& expected,
                          double min_expected, int fitted_params) {
    if (observed.size() != expected.size() || observed.empty())
        throw ConfigError("chi_square_gof: observed/expected size mismatch");
    std::vector<double> o, e;
    double acc_o = 0.0, acc_e = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        acc_o += observed[i];
        acc_e += expected[i];
        if (acc_e >= min_expected) {
            o.push_back(acc_o);
            e.push_back(acc_e);
            acc_o = acc_e = 0.0;
        }
    }
    if (acc_e > 0.0) {
        if (e.empty()) {
            o.push_back(acc_o);
            e.push_back(acc_e);
        } else {
            o.back() += acc_o;
            e.back() += acc_e;
        }
    }
    double stat = 0.0;
    for (std::size_t i = 0; i < o.size(); ++i) stat += (o[i] - e[i]) * (o[i] - e[i]) / e[i];
    const double dof = static_cast<double>(o.size()) - 1.0 - fitted_params;
    if (dof < 1.0) throw ConfigError("chi_square_gof: not enough populated bins");
    boost::math::chi_squared dist(dof);
    return {stat, boost::math::cdf(boost::math::complement(dist, stat)), dof};
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double exponential_cdf(double x, double mean) { return x <= 0.0 ? 0.0 : -std::expm1(-x / mean); }

std::size_t worker_count() {
    if (const char* env = std::getenv("BIFSIM_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v >= 1) return static_cast<std::size_t>(v);
        } catch (...) {
        }
        throw ConfigError(std::string("BIFSIM_THREADS must be a positive integer, got '") + env + "'");
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : hc;
}

} // namespace bifsim
