#pragma once

#include <cstdint>

namespace wavesel {

/**
 * Deterministic splitmix64 stream with distribution samplers.
 *
 * Standard-library distributions are implementation-defined, so the samplers
 * are spelled out here; a given (seed, replicate) pair produces the same
 * draws on every platform and under any thread schedule.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    /// Independent stream for one Monte Carlo replicate.
    static Rng replicate_stream(std::uint64_t seed, std::uint64_t replicate) {
        // Decorrelate the replicate counter before mixing it into the seed.
        Rng mix(seed ^ (0x9E3779B97F4A7C15ULL * (replicate + 1)));
        mix.next_u64();
        return mix;
    }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + uniform01() * (b - a); }

    /// Standard normal via Box-Muller.
    double normal();
    double normal(double mean, double sd) { return mean + sd * normal(); }

    /// Gamma(shape, scale) via Marsaglia-Tsang squeeze.
    double gamma(double shape, double scale);

    /// Inverse Gaussian / Wald(mean, shape) via the Michael-Schucany-Haas
    /// root transformation.
    double inverse_gaussian(double mean, double shape);

private:
    std::uint64_t state_;
};

}  // namespace wavesel
