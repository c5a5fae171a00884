#include "wavesel/filters.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace wavesel {

namespace {

// Extremal-phase taps from spectral factorization of the Daubechies
// polynomial, rounded to double. Order-2 taps also exist in closed form,
// h0 = (1+sqrt3)/(4 sqrt2) etc.; the table keeps all orders uniform.
constexpr double kDb2[4] = {
    0.48296291314453414, 0.83651630373780772, 0.22414386804201339,
    -0.12940952255126034,
};
constexpr double kDb3[6] = {
    0.33267055295008262,  0.80689150931109258,  0.45987750211849157,
    -0.13501102001025459, -0.085441273882026662, 0.035226291885709537,
};
constexpr double kDb4[8] = {
    0.23037781330889650,  0.71484657055291565,  0.63088076792985891,
    -0.027983769416859854, -0.18703481171909308, 0.030841381835560764,
    0.032883011666885200, -0.010597401785069032,
};

FilterPair from_scale_taps(std::vector<double> h, int n_moments) {
    FilterPair fp;
    fp.h = std::move(h);
    fp.vanishing_moments = n_moments;
    // g_n = (-1)^n h_{1-n}: support n in [2-2N, 1].
    const int len = fp.length();
    fp.g_offset = 2 - len;
    fp.g.resize(static_cast<std::size_t>(len));
    for (int i = 0; i < len; ++i) {
        const int n = fp.g_offset + i;
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        fp.g[static_cast<std::size_t>(i)] = sign * fp.h_at(1 - n);
    }
    return fp;
}

}  // namespace

FilterPair make_haar() {
    const double a = std::sqrt(2.0) / 2.0;
    return from_scale_taps({a, a}, 1);
}

FilterPair make_daubechies(int n_moments) {
    switch (n_moments) {
        case 1:
            return make_haar();
        case 2:
            return from_scale_taps(std::vector<double>(kDb2, kDb2 + 4), 2);
        case 3:
            return from_scale_taps(std::vector<double>(kDb3, kDb3 + 6), 3);
        case 4:
            return from_scale_taps(std::vector<double>(kDb4, kDb4 + 8), 4);
        default:
            throw std::invalid_argument(
                "make_daubechies: unsupported order " + std::to_string(n_moments) +
                " (supported: 1..4)");
    }
}

FilterPair make_basis(const std::string& name) {
    if (name == "haar") return make_haar();
    for (const char* prefix : {"daub", "db"}) {
        const std::string p(prefix);
        if (name.rfind(p, 0) == 0 && name.size() > p.size()) {
            const std::string digits = name.substr(p.size());
            if (digits.find_first_not_of("0123456789") == std::string::npos) {
                return make_daubechies(std::stoi(digits));
            }
        }
    }
    throw std::invalid_argument("make_basis: unknown wavelet basis '" + name + "'");
}

}  // namespace wavesel
