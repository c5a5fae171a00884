#pragma once

#include <string>
#include <vector>

#include "wavesel/dwt.hpp"
#include "wavesel/filters.hpp"
#include "wavesel/gridding.hpp"

namespace wavesel {

enum class ShrinkRule { Soft, Hard };
enum class LambdaRule { Universal };
enum class SigmaEstimator { MadFinest };

/// Detail-coefficient shrinkage policy. The cutoff is the universal
/// threshold lambda = sigma_hat * sqrt(2 ln n) with sigma_hat the MAD of the
/// finest detail level divided by 0.6745.
struct ThresholdPolicy {
    ShrinkRule rule = ShrinkRule::Soft;
    LambdaRule lambda_rule = LambdaRule::Universal;
    SigmaEstimator sigma_estimator = SigmaEstimator::MadFinest;
};

ShrinkRule parse_shrink_rule(const std::string& name);

/// Universal threshold computed from the pyramid's finest detail level.
double universal_lambda(const CoefficientPyramid& pyr);

/**
 * Shrink detail coefficients: |d| <= lambda is zeroed, soft shrinkage moves
 * survivors toward zero by lambda. Approximation coefficients and detail
 * levels at or below the coarse level j0 are never touched, so the coarse
 * block passes through intact. The two-argument form derives lambda from the
 * pyramid via universal_lambda; the three-argument form applies a caller
 * -supplied cutoff (fit_wavelet passes a donor-aware estimate there).
 */
CoefficientPyramid threshold(const CoefficientPyramid& pyr, const ThresholdPolicy& policy);
CoefficientPyramid threshold(const CoefficientPyramid& pyr, const ThresholdPolicy& policy,
                             double lambda);

/// Nonparametric wavelet regression fit on the dyadic grid.
struct WaveletFit {
    CoefficientPyramid pyramid;   ///< post-threshold coefficients
    std::vector<double> fitted;   ///< reconstruction read back at the observations
    /// Entry l-1 is the fraction of level-l detail coefficients that are zero
    /// after thresholding, l = 1 .. J-1. Levels at or below j0 (including the
    /// phantom levels folded into the coarse block) report 0.
    std::vector<double> null_fraction_by_level;
    double lambda = 0.0;
    double sigma_hat = 0.0;
    double multiplicity_fraction = 0.0;
};

/// Wavelet basis + shrinkage settings used across the selection pipeline.
struct WaveletOptions {
    std::string basis = "daub2";
    int coarse_level = 2;
    ShrinkRule rule = ShrinkRule::Soft;
};

/**
 * Grid the observations (x sorted ascending in [0,1]), run the periodized
 * DWT, threshold, reconstruct, and read the fit back at each observation's
 * cell. Requires at least 8 observations.
 */
WaveletFit fit_wavelet(const std::vector<double>& x, const std::vector<double>& y,
                       const FilterPair& fp, int coarse_level,
                       const ThresholdPolicy& policy);

WaveletFit fit_wavelet(const std::vector<double>& x, const std::vector<double>& y,
                       const WaveletOptions& options);

}  // namespace wavesel
