#include "bifsim/model.hpp"

#include "bifsim/error.hpp"

namespace bifsim {

void ModelParams::validate() const {
    for (double v : {beta1, beta2, alpha1, alpha2, sigma2, t0, x0})
        if (!std::isfinite(v)) throw ConfigError("model parameters must be finite");
    if (!(alpha1 > -1.0) || !(alpha2 > -1.0)) throw ConfigError("alpha1 and alpha2 must exceed -1");
    if (!(sigma2 > 0.0)) throw ConfigError("sigma2 must be positive");
}

} // namespace bifsim
