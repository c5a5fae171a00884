#include "wavesel/wavelet_fit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wavesel {

namespace {

double median_inplace(std::vector<double>& v) {
    if (v.empty()) return 0.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
    double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    std::nth_element(v.begin(), v.begin() + static_cast<long>(mid) - 1, v.end());
    return 0.5 * (v[mid - 1] + hi);
}

/**
 * Variance factor of each finest-level detail coefficient under iid noise on
 * the observations, accounting for grid cells that copy a donor: taps landing
 * on cells fed by the same observation see one noise draw, not several, so
 * the coefficient's variance is sigma^2 * sum over distinct donors of
 * (sum of that donor's taps)^2 instead of sigma^2 * ||g||^2 = sigma^2.
 * Ignoring this deflates the MAD noise estimate by ~40% when a third of the
 * cells are copies, which under-thresholds every level.
 */
std::vector<double> finest_variance_factors(const GriddedSample& gs, const FilterPair& fp) {
    const std::size_t n = gs.grid_y.size();
    const std::size_t half = n / 2;
    const int len = fp.length();
    std::vector<double> factors(half, 0.0);
    std::vector<std::pair<std::size_t, double>> donor_weight;
    donor_weight.reserve(static_cast<std::size_t>(len));
    for (std::size_t k = 0; k < half; ++k) {
        donor_weight.clear();
        for (int i = 0; i < len; ++i) {
            long idx = (2 * static_cast<long>(k) + fp.g_offset + i) % static_cast<long>(n);
            if (idx < 0) idx += static_cast<long>(n);
            const std::size_t donor = gs.source_index[static_cast<std::size_t>(idx)];
            const double w = fp.g[static_cast<std::size_t>(i)];
            bool merged = false;
            for (auto& dw : donor_weight) {
                if (dw.first == donor) {
                    dw.second += w;
                    merged = true;
                    break;
                }
            }
            if (!merged) donor_weight.emplace_back(donor, w);
        }
        double v = 0.0;
        for (const auto& dw : donor_weight) v += dw.second * dw.second;
        factors[k] = v;
    }
    return factors;
}

}  // namespace

ShrinkRule parse_shrink_rule(const std::string& name) {
    if (name == "soft") return ShrinkRule::Soft;
    if (name == "hard") return ShrinkRule::Hard;
    throw std::invalid_argument("unknown threshold rule '" + name + "' (soft|hard)");
}

double universal_lambda(const CoefficientPyramid& pyr) {
    if (pyr.details.empty()) return 0.0;
    const auto& finest = pyr.details.back();
    std::vector<double> abs_d(finest.size());
    std::transform(finest.begin(), finest.end(), abs_d.begin(),
                   [](double d) { return std::abs(d); });
    const double sigma = median_inplace(abs_d) / 0.6745;
    const auto n = static_cast<double>(std::size_t{1} << pyr.max_level);
    return sigma * std::sqrt(2.0 * std::log(n));
}

CoefficientPyramid threshold(const CoefficientPyramid& pyr, const ThresholdPolicy& policy,
                             double lambda) {
    CoefficientPyramid out = pyr;
    out.thresholded = true;
    for (std::size_t i = 0; i < out.details.size(); ++i) {
        if (out.detail_level(i) <= out.coarse_level) continue;  // coarse block preserved
        for (double& d : out.details[i]) {
            if (std::abs(d) <= lambda) {
                d = 0.0;
            } else if (policy.rule == ShrinkRule::Soft) {
                d = (d > 0.0) ? d - lambda : d + lambda;
            }
        }
    }
    return out;
}

CoefficientPyramid threshold(const CoefficientPyramid& pyr, const ThresholdPolicy& policy) {
    return threshold(pyr, policy, universal_lambda(pyr));
}

WaveletFit fit_wavelet(const std::vector<double>& x, const std::vector<double>& y,
                       const FilterPair& fp, int coarse_level,
                       const ThresholdPolicy& policy) {
    if (y.size() < 8) throw std::invalid_argument("fit_wavelet: need at least 8 observations");

    const int resolution = choose_resolution(x.size());
    if (coarse_level < 0 || coarse_level >= resolution) {
        throw std::invalid_argument("fit_wavelet: coarse level out of range for grid");
    }
    const GriddedSample gs = map_to_grid(x, y, resolution);

    // The transform is circular, and a sequence whose two ends sit at
    // different levels acquires a wrap-around jump there; its detail
    // coefficients survive shrinkage and distort the fit at both ends.
    // Remove the least-squares line first, shrink the residual, and restore
    // the line afterwards.
    const std::size_t grid_n = gs.grid_y.size();
    double mean_k = 0.5 * static_cast<double>(grid_n - 1);
    double mean_y = 0.0;
    for (double v : gs.grid_y) mean_y += v;
    mean_y /= static_cast<double>(grid_n);
    double skk = 0.0;
    double sky = 0.0;
    for (std::size_t k = 0; k < grid_n; ++k) {
        const double dk = static_cast<double>(k) - mean_k;
        skk += dk * dk;
        sky += dk * (gs.grid_y[k] - mean_y);
    }
    const double trend_slope = (skk > 0.0) ? sky / skk : 0.0;
    std::vector<double> detrended(grid_n);
    for (std::size_t k = 0; k < grid_n; ++k) {
        detrended[k] =
            gs.grid_y[k] - (mean_y + trend_slope * (static_cast<double>(k) - mean_k));
    }
    const CoefficientPyramid raw = dwt(detrended, fp, coarse_level);

    WaveletFit fit;
    fit.sigma_hat = 0.0;
    fit.lambda = 0.0;
    if (!raw.details.empty()) {
        // MAD noise scale from the finest level, standardized per coefficient
        // by its donor-aware variance factor; windows fed almost entirely by
        // one copied observation carry no usable noise information.
        const std::vector<double> factors = finest_variance_factors(gs, fp);
        const auto& finest = raw.details.back();
        std::vector<double> standardized;
        standardized.reserve(finest.size());
        for (std::size_t k = 0; k < finest.size() && k < factors.size(); ++k) {
            if (factors[k] >= 0.25) {
                standardized.push_back(std::abs(finest[k]) / std::sqrt(factors[k]));
            }
        }
        if (standardized.empty()) {
            for (double d : finest) standardized.push_back(std::abs(d));
        }
        fit.sigma_hat = median_inplace(standardized) / 0.6745;
        fit.lambda = fit.sigma_hat * std::sqrt(2.0 * std::log(static_cast<double>(grid_n)));
    }
    fit.pyramid = threshold(raw, policy, fit.lambda);
    fit.multiplicity_fraction = gs.multiplicity_fraction;

    // Null fractions for levels 1 .. J-1; levels <= j0 are untouched by
    // construction and report 0.
    fit.null_fraction_by_level.assign(static_cast<std::size_t>(raw.max_level - 1), 0.0);
    for (std::size_t i = 0; i < fit.pyramid.details.size(); ++i) {
        const int level = fit.pyramid.detail_level(i);
        if (level <= fit.pyramid.coarse_level) continue;
        const auto& d = fit.pyramid.details[i];
        const auto zeros = static_cast<double>(
            std::count(d.begin(), d.end(), 0.0));
        fit.null_fraction_by_level[static_cast<std::size_t>(level - 1)] =
            d.empty() ? 0.0 : zeros / static_cast<double>(d.size());
    }

    std::vector<double> grid_fit = idwt(fit.pyramid, fp);
    for (std::size_t k = 0; k < grid_n; ++k) {
        grid_fit[k] += mean_y + trend_slope * (static_cast<double>(k) - mean_k);
    }
    fit.fitted.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        fit.fitted[i] = grid_fit[grid_cell(x[i], resolution)];
    }
    return fit;
}

WaveletFit fit_wavelet(const std::vector<double>& x, const std::vector<double>& y,
                       const WaveletOptions& options) {
    ThresholdPolicy policy;
    policy.rule = options.rule;
    return fit_wavelet(x, y, make_basis(options.basis), options.coarse_level, policy);
}

}  // namespace wavesel
