#pragma once

#include <cstddef>
#include <vector>

#include "wavesel/filters.hpp"

namespace wavesel {

/**
 * Multilevel DWT coefficient pyramid for a signal of length 2^J.
 *
 * `approx` holds the 2^{j0} approximation coefficients at the coarse level;
 * `details[i]` holds the 2^{j0+i} detail coefficients of level j0+i for
 * i = 0 .. J-1-j0. Total coefficient count is always 2^J.
 */
struct CoefficientPyramid {
    int coarse_level = 0;  ///< j0
    int max_level = 0;     ///< J
    std::vector<double> approx;
    std::vector<std::vector<double>> details;
    bool thresholded = false;

    int detail_level(std::size_t i) const { return coarse_level + static_cast<int>(i); }

    std::size_t total_size() const {
        std::size_t n = approx.size();
        for (const auto& d : details) n += d.size();
        return n;
    }
};

/// Forward periodized orthonormal DWT down to coarse level j0.
/// The signal length must be an exact power of two and 0 <= j0 < J.
CoefficientPyramid dwt(const std::vector<double>& signal, const FilterPair& fp,
                       int coarse_level);

/// Inverse transform; exact left inverse of dwt for well-formed pyramids.
std::vector<double> idwt(const CoefficientPyramid& pyr, const FilterPair& fp);

}  // namespace wavesel
