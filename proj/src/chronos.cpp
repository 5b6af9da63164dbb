#include "gisl/chronos.hpp"

#include <cmath>
#include <stdexcept>

namespace gisl {

double chronos_cell_count(double n0, double p, double r_star, double r, double t) {
    if (!(n0 > 0)) throw std::invalid_argument("initial count must be positive");
    if (!(p >= 0 && p <= 1)) throw std::invalid_argument("fraction must lie in [0, 1]");
    if (!(t >= 0)) throw std::invalid_argument("time must be non-negative");
    // A zero-weight branch contributes nothing even when its exponential overflows.
    double perturbed = p > 0 ? p * std::exp(r_star * t) : 0.0;
    double unperturbed = p < 1 ? (1 - p) * std::exp(r * t) : 0.0;
    double v = n0 * (perturbed + unperturbed);
    if (!std::isfinite(v)) throw std::overflow_error("cell count overflows");
    return v;
}

double chronos_zscore(double v0, double p_c, double p_j, double r, double fitness, double t, double d) {
    if (!(p_c >= 0 && p_c <= 1 && p_j >= 0 && p_j <= 1)) throw std::invalid_argument("probabilities must lie in [0, 1]");
    if (!(d >= 0)) throw std::invalid_argument("delay must be non-negative");
    if (t < d) return v0;
    double v = v0 * (1 + p_c * p_j * std::expm1(r * fitness * (t - d)));
    if (!std::isfinite(v)) throw std::overflow_error("score overflows");
    return v;
}

}  // namespace gisl
