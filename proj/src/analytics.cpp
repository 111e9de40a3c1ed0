#include "bifsim/analytics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "bifsim/error.hpp"

namespace bifsim {

namespace {

constexpr double kQuadTol = 1e-11;

void check_side_inputs(double alpha, double beta, double sigma2) {
    if (!(alpha > -1.0) || !std::isfinite(alpha)) throw ConfigError("alpha must exceed -1");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw ConfigError("beta must be positive");
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw ConfigError("sigma2 must be positive");
}

// int_0^inf f on [0, inf) with a relative error check.
template <class F>
double integrate_half_line(F f, const char* what) {
    boost::math::quadrature::exp_sinh<double> integrator;
    double err = 0.0, l1 = 0.0;
    const double v = integrator.integrate(f, kQuadTol, &err, &l1);
    if (!std::isfinite(v) || err > 1e-8 * std::abs(v))
        throw NumericalError(std::string(what) + ": quadrature error estimate " + std::to_string(err) +
                             " for value " + std::to_string(v));
    return v;
}

bool side_repels(double beta, Side side) { return side == Side::upper ? beta < 0.0 : beta > 0.0; }

} // namespace

RateLambda lambda_rate(double alpha, double beta, double sigma2, Side side) {
    check_side_inputs(alpha, beta, sigma2);
    const double p = alpha + 1.0;
    const double v = std::pow(2.0 * beta, 1.0 / p) * std::pow(p, alpha / p) /
                     (std::pow(sigma2, 1.0 / p) * std::tgamma(1.0 / p));
    return {v, side, alpha, beta, sigma2};
}

double lambda_rate_outer_two(double alpha, double beta, double sigma2) {
    check_side_inputs(alpha, beta, sigma2);
    const double p = alpha + 1.0;
    return 2.0 * std::pow(beta, 1.0 / p) * std::pow(p, alpha / p) /
           (std::pow(sigma2, 1.0 / p) * std::tgamma(1.0 / p));
}

double lambda_rate_quadrature(double alpha, double beta, double sigma2) {
    check_side_inputs(alpha, beta, sigma2);
    const double p = alpha + 1.0;
    const double c = 2.0 * beta / (sigma2 * p);
    const double I = integrate_half_line([&](double y) { return std::exp(-c * std::pow(y, p)); },
                                         "lambda_rate_quadrature");
    return 1.0 / I;
}

bool upper_repels(const ModelParams& p) noexcept { return p.beta1 < 0.0; }
bool lower_repels(const ModelParams& p) noexcept { return p.beta2 > 0.0; }

double p_negative_bifurcation(const ModelParams& p) {
    p.validate();
    if (!(p.beta1 < 0.0 && p.beta2 > 0.0))
        throw SemanticsError(
            "bifurcation direction is random only for beta1 < 0 < beta2; with drifts of one sign "
            "the direction is certain and with beta1 > 0 > beta2 there is no bifurcation");
    const double l1 = lambda_rate(p.alpha1, -p.beta1, p.sigma2, Side::upper).value;
    const double l2 = lambda_rate(p.alpha2, p.beta2, p.sigma2, Side::lower).value;
    return l1 / (l1 + l2);
}

double finite_excursion_lifetime(double alpha, double beta, double sigma2, Side side) {
    check_side_inputs(alpha, std::abs(beta), sigma2);
    const double p = alpha + 1.0;
    const double a = 1.0 / p;
    const double c = 2.0 * std::abs(beta) / (sigma2 * p);
    if (!side_repels(beta, side)) {
        // occupation density per unit local time is (2/sigma2) exp(-c y^p)
        const double I = integrate_half_line([&](double y) { return std::exp(-c * std::pow(y, p)); },
                                             "finite_excursion_lifetime");
        return 2.0 / sigma2 * I;
    }
    // repelling side: occupation density weighted by the squared return
    // probability Q(a, c y^p); substituting w = c^a y
    auto f = [&](double w) {
        const double x = std::pow(w, p);
        if (x > 700.0) return 0.0;
        const double q = boost::math::gamma_q(a, x);
        return q * q * std::exp(x);
    };
    const double J = integrate_half_line(f, "finite_excursion_lifetime");
    return 2.0 / (sigma2 * std::pow(c, a)) * J;
}

double expected_terminal_local_time(const ModelParams& p) {
    p.validate();
    double rate = 0.0;
    if (upper_repels(p)) rate += lambda_rate(p.alpha1, -p.beta1, p.sigma2, Side::upper).value;
    if (lower_repels(p)) rate += lambda_rate(p.alpha2, p.beta2, p.sigma2, Side::lower).value;
    if (rate == 0.0) throw SemanticsError("no side repels: the solution never bifurcates");
    return 1.0 / rate;
}

double local_time_rate(const ModelParams& p) {
    p.validate();
    if (!(p.beta1 > 0.0 && p.beta2 < 0.0) || !p.piecewise_constant())
        throw SemanticsError("local-time rate needs beta1 > 0 > beta2 and alpha = 0");
    return 1.0 / (1.0 / p.beta1 - 1.0 / p.beta2);
}

double expected_bifurcation_time_quadrature(const ModelParams& p) {
    p.validate();
    if (p.beta1 == 0.0 || p.beta2 == 0.0)
        throw SemanticsError("a zero drift gives excursions of infinite mean lifetime");
    const double m1 = finite_excursion_lifetime(p.alpha1, p.beta1, p.sigma2, Side::upper);
    const double m2 = finite_excursion_lifetime(p.alpha2, p.beta2, p.sigma2, Side::lower);
    return (m1 + m2) * expected_terminal_local_time(p);
}

double expected_bifurcation_time(const ModelParams& p) {
    p.validate();
    if (!p.piecewise_constant()) return expected_bifurcation_time_quadrature(p);
    const double b1 = p.beta1, b2 = p.beta2, s2 = p.sigma2;
    if (b1 < 0.0 && b2 > 0.0) return s2 / std::abs(2.0 * b1 * b2);
    if (b1 > 0.0 && b2 > 0.0) return s2 * (b1 + b2) / (2.0 * b1 * b2 * b2);
    if (b1 < 0.0 && b2 < 0.0) return s2 * (b1 + b2) / (2.0 * b2 * b1 * b1);
    throw SemanticsError("expected bifurcation time needs a repelling side and nonzero drifts");
}

double return_probability(double alpha, double beta, double sigma2, double c) {
    check_side_inputs(alpha, std::abs(beta), sigma2);
    if (c <= 0.0) return 1.0;
    const double p = alpha + 1.0;
    const double kappa = 2.0 * std::abs(beta) / (sigma2 * p);
    return boost::math::gamma_q(1.0 / p, kappa * std::pow(c, p));
}

double escape_barrier(double alpha, double beta, double sigma2, double bound) {
    check_side_inputs(alpha, std::abs(beta), sigma2);
    if (!(bound > 0.0 && bound < 1.0)) throw ConfigError("misclassification bound must be in (0, 1)");
    const double p = alpha + 1.0;
    const double kappa = 2.0 * std::abs(beta) / (sigma2 * p);
    return std::pow(boost::math::gamma_q_inv(1.0 / p, bound) / kappa, 1.0 / p);
}

namespace {

double rk_decay(double a, const ModelParams& p) {
    if (!(p.beta1 > p.beta2 && p.beta2 > 0.0))
        throw SemanticsError("the local-time profile is a diffusion with these coefficients only "
                             "for beta1 > beta2 > 0");
    if (!(a >= 0.0)) throw SemanticsError("local time level must be >= 0");
    return -std::expm1(-2.0 * a * (p.beta1 - p.beta2) / p.sigma2);
}

} // namespace

double rk_drift_pos(double a, const ModelParams& p) {
    return -(p.beta1 / (p.beta1 - p.beta2)) * rk_decay(a, p);
}

double rk_variance(double a, const ModelParams& p) { return rk_decay(a, p) / (p.beta1 - p.beta2); }

double rk_drift_neg(double a, const ModelParams& p) {
    const double one_minus = rk_decay(a, p);
    const double d = p.beta1 - p.beta2;
    return -p.beta2 / d + (p.beta1 / d) * (1.0 - one_minus);
}

double flow_derivative(double L, const ModelParams& p) {
    if (!(L >= 0.0)) throw ConfigError("local time must be >= 0");
    return std::exp(-2.0 * L * (p.beta1 - p.beta2) / p.sigma2);
}

double stationary_density(double y, double beta, double sigma2) {
    return beta / sigma2 * std::exp(-2.0 * beta * std::abs(y) / sigma2);
}

double stationary_cdf(double y, double beta, double sigma2) {
    const double e = 0.5 * std::exp(-2.0 * beta * std::abs(y) / sigma2);
    return y < 0.0 ? e : 1.0 - e;
}

double zplus_cdf(double a, double beta, double sigma2) {
    if (a <= 0.0) return 0.0;
    const double u = -std::expm1(-2.0 * a * beta / sigma2);
    return u * u;
}

double stationary_mean_abs(double beta, double sigma2) { return sigma2 / (2.0 * beta); }

double zplus_mean(double beta, double sigma2) { return 3.0 * sigma2 / (4.0 * beta); }

double excursion_lifetime_density(double t, double beta, double sigma2) {
    if (t <= 0.0) return 0.0;
    return std::exp(-beta * beta * t / (2.0 * sigma2)) /
           (std::sqrt(2.0 * std::numbers::pi * sigma2) * t * std::sqrt(t));
}

double returning_excursion_rate(double h, double beta, double sigma2) {
    if (!(h > 0.0)) throw ConfigError("height must be positive");
    const double k = 2.0 * std::abs(beta) / sigma2;
    if (k * h < 1e-12) return 1.0 / h;
    return k / std::expm1(k * h);
}

} // namespace bifsim
