#pragma once

#include <cstddef>
#include <vector>

namespace wavesel {

/**
 * Non-equispaced observations mapped onto the dyadic grid
 * t_k = (k + 1/2) * 2^{-J}, k = 0 .. 2^J - 1.
 *
 * Cell k receives the observation with x in [k 2^{-J}, (k+1) 2^{-J}) that is
 * nearest to the cell center (ties go to the lower observation index). Empty
 * cells copy the nearest populated cell to their left; leading empty cells
 * copy the first populated cell. `source_index` records the donor
 * observation per cell.
 */
struct GriddedSample {
    int resolution = 0;  ///< J
    std::vector<double> grid_t;
    std::vector<double> grid_y;
    std::vector<std::size_t> source_index;
    /// Fraction of populated cells that held more than one observation.
    double multiplicity_fraction = 0.0;
};

/// Smallest J with 2^J >= n, capped at 12.
int choose_resolution(std::size_t n);

/// Map sorted x in [0,1] (with matching y) onto the dyadic grid.
GriddedSample map_to_grid(const std::vector<double>& x, const std::vector<double>& y,
                          int resolution);

/// Cell index of a point in [0,1] at resolution J (x = 1 clamps to the last cell).
std::size_t grid_cell(double x, int resolution);

}  // namespace wavesel
