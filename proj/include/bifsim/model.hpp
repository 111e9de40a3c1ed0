#pragma once

#include <algorithm>
#include <cmath>

namespace bifsim {

/// Coefficients of dX/dt = beta1 |X-B|^alpha1 (X < B), beta2 |X-B|^alpha2 (X > B),
/// the driver variance rate, and the initial condition X(t0) = x0.
struct ModelParams {
    double beta1 = -1.0;
    double beta2 = 1.0;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double sigma2 = 1.0;
    double t0 = 0.0;
    double x0 = 0.0;

    /// Throws ConfigError on alpha <= -1, sigma2 <= 0 or non-finite values.
    void validate() const;

    bool piecewise_constant() const noexcept { return alpha1 == 0.0 && alpha2 == 0.0; }
    /// Lipschitz bound of alpha = 0 solutions.
    double max_speed() const noexcept { return std::max(std::abs(beta1), std::abs(beta2)); }
    double sigma() const noexcept { return std::sqrt(sigma2); }

    ModelParams with_x0(double x) const noexcept {
        ModelParams p = *this;
        p.x0 = x;
        return p;
    }
};

} // namespace bifsim
