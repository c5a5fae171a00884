#pragma once

#include <string>
#include <vector>

namespace wavesel {

/**
 * Orthonormal scale/wavelet filter pair.
 *
 * The scale filter h occupies indices [0, 2N-1] where N is the number of
 * vanishing moments. The wavelet filter g is derived through the quadrature
 * mirror relation g_n = (-1)^n h_{1-n}, which places its support on
 * [2-2N, 1]; g is therefore stored densely together with an explicit first
 * index so the relation stays checkable tap by tap.
 */
struct FilterPair {
    std::vector<double> h;      ///< scale taps, h[i] holds tap index i
    std::vector<double> g;      ///< wavelet taps, g[i] holds tap index g_offset + i
    int g_offset = 0;           ///< tap index of g.front()
    int vanishing_moments = 0;  ///< N

    int length() const { return static_cast<int>(h.size()); }

    /// Scale tap at index n, zero outside [0, 2N-1].
    double h_at(int n) const {
        return (n >= 0 && n < length()) ? h[static_cast<std::size_t>(n)] : 0.0;
    }

    /// Wavelet tap at index n, zero outside [g_offset, g_offset + 2N - 1].
    double g_at(int n) const {
        const int i = n - g_offset;
        return (i >= 0 && i < length()) ? g[static_cast<std::size_t>(i)] : 0.0;
    }
};

/// Haar filter pair: h = (sqrt2/2, sqrt2/2).
FilterPair make_haar();

/// Extremal-phase Daubechies filter with `n_moments` vanishing moments.
/// Supported orders: 1 (Haar) through 4. Throws std::invalid_argument otherwise.
FilterPair make_daubechies(int n_moments);

/// Parse a basis name ("haar", "daub2".."daub4", "db2".."db4").
FilterPair make_basis(const std::string& name);

}  // namespace wavesel
