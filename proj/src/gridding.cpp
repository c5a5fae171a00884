#include "wavesel/gridding.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace wavesel {

int choose_resolution(std::size_t n) {
    int j = 2;
    while (j < 12 && (std::size_t{1} << j) < n) ++j;
    return j;
}

std::size_t grid_cell(double x, int resolution) {
    const std::size_t cells = std::size_t{1} << resolution;
    auto k = static_cast<long>(std::floor(x * static_cast<double>(cells)));
    if (k < 0) k = 0;
    if (k >= static_cast<long>(cells)) k = static_cast<long>(cells) - 1;
    return static_cast<std::size_t>(k);
}

GriddedSample map_to_grid(const std::vector<double>& x, const std::vector<double>& y,
                          int resolution) {
    if (x.empty()) throw std::invalid_argument("map_to_grid: empty input");
    if (x.size() != y.size()) throw std::invalid_argument("map_to_grid: x/y length mismatch");
    if (resolution < 2) throw std::invalid_argument("map_to_grid: resolution must be >= 2");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] >= 0.0 && x[i] <= 1.0)) {
            throw std::invalid_argument("map_to_grid: x values must lie in [0,1]");
        }
        if (i > 0 && x[i] < x[i - 1]) {
            throw std::invalid_argument("map_to_grid: x must be sorted ascending");
        }
    }

    const std::size_t cells = std::size_t{1} << resolution;
    const double width = 1.0 / static_cast<double>(cells);
    constexpr auto kEmpty = std::numeric_limits<std::size_t>::max();

    GriddedSample gs;
    gs.resolution = resolution;
    gs.grid_t.resize(cells);
    gs.grid_y.assign(cells, 0.0);
    gs.source_index.assign(cells, kEmpty);

    std::vector<double> best_dist(cells, 0.0);
    std::vector<std::size_t> occupancy(cells, 0);
    for (std::size_t k = 0; k < cells; ++k) {
        gs.grid_t[k] = (static_cast<double>(k) + 0.5) * width;
    }

    for (std::size_t i = 0; i < x.size(); ++i) {
        const std::size_t k = grid_cell(x[i], resolution);
        const double dist = std::abs(x[i] - gs.grid_t[k]);
        ++occupancy[k];
        if (gs.source_index[k] == kEmpty || dist < best_dist[k]) {
            // strict comparison: ties keep the lower observation index
            gs.source_index[k] = i;
            best_dist[k] = dist;
        }
    }
    std::size_t populated = 0;
    std::size_t crowded = 0;
    for (std::size_t k = 0; k < cells; ++k) {
        if (occupancy[k] > 0) ++populated;
        if (occupancy[k] > 1) ++crowded;
    }
    gs.multiplicity_fraction =
        populated > 0 ? static_cast<double>(crowded) / static_cast<double>(populated) : 0.0;

    // Left fill; leading empty cells borrow the first populated cell.
    std::size_t first_populated = kEmpty;
    for (std::size_t k = 0; k < cells; ++k) {
        if (gs.source_index[k] != kEmpty) {
            first_populated = k;
            break;
        }
    }
    std::size_t donor = gs.source_index[first_populated];
    for (std::size_t k = 0; k < cells; ++k) {
        if (gs.source_index[k] == kEmpty) {
            gs.source_index[k] = donor;
        } else {
            donor = gs.source_index[k];
        }
        gs.grid_y[k] = y[gs.source_index[k]];
    }
    return gs;
}

}  // namespace wavesel
