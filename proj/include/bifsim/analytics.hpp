#pragma once

#include "bifsim/model.hpp"

namespace bifsim {

/// Y = B - X lives above 0 (upper, X < B) or below 0 (lower, X > B).
enum class Side { upper, lower };

struct RateLambda {
    double value = 0.0;
    Side side = Side::upper;
    double alpha = 0.0;
    double beta = 0.0;
    double sigma2 = 1.0;
};

/// Intensity, per unit local time, of excursions that never return, for a
/// side whose drift |beta| |y|^alpha pushes Y away from 0:
///   lambda = 1 / int_0^inf exp(-2 beta y^(alpha+1) / (sigma2 (alpha+1))) dy
///          = (2 beta)^(1/(alpha+1)) (alpha+1)^(alpha/(alpha+1))
///            / (sigma^(2/(alpha+1)) Gamma(1/(alpha+1))).
/// At alpha = 0 this is 2 beta / sigma2.
RateLambda lambda_rate(double alpha, double beta, double sigma2, Side side = Side::upper);

/// The variant with the factor 2 outside the root,
///   2 beta^(1/(alpha+1)) (alpha+1)^(alpha/(alpha+1)) / (sigma^(2/(alpha+1)) Gamma(1/(alpha+1))).
/// Agrees with lambda_rate only at alpha = 0; kept for comparison reports.
double lambda_rate_outer_two(double alpha, double beta, double sigma2);

/// Same quantity as lambda_rate by direct quadrature of the scale density.
double lambda_rate_quadrature(double alpha, double beta, double sigma2);

/// Side drifts that push Y away from 0: upper iff beta1 < 0, lower iff beta2 > 0.
bool upper_repels(const ModelParams& p) noexcept;
bool lower_repels(const ModelParams& p) noexcept;

/// lambda1 / (lambda1 + lambda2). Requires beta1 < 0 < beta2.
double p_negative_bifurcation(const ModelParams& p);

/// Expected last contact time for x0 = 0. Closed forms when
/// alpha1 = alpha2 = 0; otherwise the quadrature branch.
double expected_bifurcation_time(const ModelParams& p);

/// (m1 + m2) / (sum of lambda over repelling sides), with m_j from
/// finite_excursion_lifetime. Valid for any exponents > -1.
double expected_bifurcation_time_quadrature(const ModelParams& p);

/// Expected total lifetime of finite excursions per unit local time on one
/// side. `beta` is the drift coefficient of X on that side (beta1 for the
/// upper side, beta2 for the lower side); the side repels when the drift
/// points away from 0. Relative accuracy 1e-8 or NumericalError.
double finite_excursion_lifetime(double alpha, double beta, double sigma2, Side side);

/// Expected local time accumulated before the first infinite excursion.
double expected_terminal_local_time(const ModelParams& p);

/// Long-run L_T / T when both sides attract (beta1 > 0 > beta2, alpha = 0):
/// 1 / (1/|beta1| + 1/|beta2|).
double local_time_rate(const ModelParams& p);

/// Probability that Y, started at distance c from 0 on a repelling side,
/// ever returns to 0.
double return_probability(double alpha, double beta, double sigma2, double c);

/// Smallest c with return_probability(alpha, beta, sigma2, c) <= bound.
double escape_barrier(double alpha, double beta, double sigma2, double bound);

// ---- local-time profile diffusion (beta1 > beta2 > 0) ----------------------

/// Throws SemanticsError unless beta1 > beta2 > 0 and a >= 0.
double rk_drift_pos(double a, const ModelParams& p);
double rk_variance(double a, const ModelParams& p);
double rk_drift_neg(double a, const ModelParams& p);

/// exp(-2 L (beta1 - beta2) / sigma2).
double flow_derivative(double L, const ModelParams& p);

// ---- stationary two-drift difference ---------------------------------------

/// (beta / sigma2) exp(-2 beta |y| / sigma2).
double stationary_density(double y, double beta, double sigma2);
double stationary_cdf(double y, double beta, double sigma2);
/// [1 - exp(-2 a beta / sigma2)]^2 for a >= 0.
double zplus_cdf(double a, double beta, double sigma2);
/// E|Y| under the stationary density: sigma2 / (2 beta).
double stationary_mean_abs(double beta, double sigma2);
/// E Z+_0 - B_0 = 3 sigma2 / (4 beta).
double zplus_mean(double beta, double sigma2);

/// Lifetime density per unit local time of finite excursions on one side
/// with drift magnitude |beta| (alpha = 0):
///   t^(-3/2) exp(-beta^2 t / (2 sigma2)) / (sigma sqrt(2 pi)).
double excursion_lifetime_density(double t, double beta, double sigma2);

/// Expected number, per unit local time, of excursions on one side
/// (alpha = 0, drift magnitude |beta|) that reach height h and return.
double returning_excursion_rate(double h, double beta, double sigma2);

} // namespace bifsim
