#include "wavesel/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wavesel {

double Rng::normal() {
    double u1 = uniform01();
    const double u2 = uniform01();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::gamma(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0)) {
        throw std::invalid_argument("Rng::gamma: shape and scale must be positive");
    }
    if (shape < 1.0) {
        // Boost: X ~ Gamma(shape+1) scaled by U^{1/shape}.
        const double u = uniform01();
        return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double z = normal();
        double v = 1.0 + c * z;
        if (v <= 0.0) continue;
        v = v * v * v;
        const double u = uniform01();
        if (u < 1.0 - 0.0331 * z * z * z * z) return scale * d * v;
        if (u > 0.0 && std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) {
            return scale * d * v;
        }
    }
}

double Rng::inverse_gaussian(double mean, double shape) {
    if (!(mean > 0.0) || !(shape > 0.0)) {
        throw std::invalid_argument("Rng::inverse_gaussian: mean and shape must be positive");
    }
    const double z = normal();
    const double v = z * z;
    const double x = mean + mean * mean * v / (2.0 * shape) -
                     mean / (2.0 * shape) *
                         std::sqrt(4.0 * mean * shape * v + mean * mean * v * v);
    const double u = uniform01();
    if (u <= mean / (mean + x)) return x;
    return mean * mean / x;
}

}  // namespace wavesel
