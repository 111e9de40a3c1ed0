#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace bifsim {

/// Pairwise summation; the result depends only on the order of `xs`.
double pairwise_sum(std::span<const double> xs);

struct McEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n_trials = 0;
    std::uint64_t master_seed = 0;
    std::optional<double> theory;
    std::optional<double> z_score;

    /// |mean - theory| <= k * stderr (false without a theory value).
    bool within_se(double k) const;
    /// |mean - theory| <= rel * |theory|.
    bool within_rel(double rel) const;
};

/// Sample mean and standard error (sample sd / sqrt(n)), two-pass.
McEstimate estimate(std::span<const double> xs, std::uint64_t master_seed = 0,
                    std::optional<double> theory = std::nullopt);

double sample_variance(std::span<const double> xs);

struct TestResult {
    double statistic = 0.0;
    double p_value = 0.0;
    double dof = 0.0;
};

/// P(K > lambda) for the Kolmogorov distribution.
double kolmogorov_sf(double lambda);

/// One-sample Kolmogorov-Smirnov test against a continuous CDF, asymptotic
/// p-value with the Stephens small-sample correction.
TestResult ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov test.
TestResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Pearson chi-square goodness of fit; bins with expected < min_expected are
/// pooled with their right neighbour. dof = bins - 1 - fitted_params.
TestResult chi_square_gof(const std::vector<double>& observed, const std::vector<double>& expected,
                          double min_expected = 5.0, int fitted_params = 0);

double normal_cdf(double x);
double exponential_cdf(double x, double mean);

} // namespace bifsim
