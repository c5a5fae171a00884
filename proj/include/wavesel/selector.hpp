#pragma once

#include "wavesel/glm.hpp"
#include "wavesel/nls.hpp"
#include "wavesel/wavelet_fit.hpp"

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wavesel {

/// The rescale step needs max(eta) > min(eta); a constant linear predictor
/// cannot be normalized onto [0,1].
struct DegeneratePredictorError : std::invalid_argument {
    DegeneratePredictorError() : std::invalid_argument("degenerate linear predictor") {}
};

/// One entry in the competition: either a nonlinear curve fitted by least
/// squares or a family/link pair fitted by IRLS. Ids must be unique within a
/// selection run. Each candidate carries its own fitting recipe: nonlinear
/// entries default to the iterative least-squares engine, but an entry may
/// supply a closed-form estimator instead (see the reciprocal line).
struct CandidateModel {
    enum class Kind { Nonlinear, Glm };
    std::string id;
    Kind kind = Kind::Nonlinear;
    NlsModel nls;               // Kind::Nonlinear
    Family family = Family::Gaussian;  // Kind::Glm
    Link link = Link::Identity;
    /// Optional replacement estimator for Kind::Nonlinear; receives (x, y).
    /// Empty means fit_nls with the model's start heuristic.
    std::function<NlsFit(const std::vector<double>&, const std::vector<double>&)> nls_fitter;
};

CandidateModel make_nls_candidate(NlsModel model);
CandidateModel make_glm_candidate(Family family, Link link);

/// The builtin reciprocal-line candidate 1/(b1 + b2 x). The curve is
/// intrinsically linear, so its estimator is the exact least-squares solution
/// on the reciprocal scale (fit_reciprocal_line) rather than the iterative
/// engine.
CandidateModel make_reciprocal_line_candidate();

struct CandidateScore {
    std::string id;
    double rmse = 0.0;
    double mae = 0.0;
    bool fit_ok = false;
    std::string error;           ///< reason when fit_ok is false
    std::vector<double> fitted;  ///< candidate means on the training rows
};

struct SelectionReport {
    std::vector<CandidateScore> scores;  ///< in candidate order
    std::string winner_rmse;             ///< empty when no candidate fitted
    std::string winner_mae;
    std::vector<double> null_fraction_by_level;
    double eta_min = 0.0;
    double eta_max = 0.0;
    std::vector<double> wavelet_fitted;  ///< reference curve, training order
    std::vector<double> eta_scaled;      ///< rescaled linear predictor, training order
    double lambda = 0.0;
    double sigma_hat = 0.0;
};

/// Root mean squared difference and median absolute difference between two
/// equal-length finite vectors. Throws std::invalid_argument on length
/// mismatch, empty input, or non-finite entries.
std::pair<double, double> score(const std::vector<double>& mu_hat,
                                const std::vector<double>& mu_tilde);

/// The nonparametric reference curve of the selection pipeline: ordinary
/// least squares for the linear predictor, min-max rescale onto [0,1],
/// wavelet regression of y on the rescaled predictor. `mu_tilde` is returned
/// in training-row order.
struct WaveletReference {
    std::vector<double> mu_tilde;
    std::vector<double> eta_scaled;  ///< rescaled linear predictor, training order
    std::vector<double> null_fraction_by_level;
    double eta_min = 0.0;
    double eta_max = 0.0;
    double lambda = 0.0;
    double sigma_hat = 0.0;
};

WaveletReference wavelet_reference(const Eigen::MatrixXd& X, const std::vector<double>& y,
                                   const WaveletOptions& options = {});

/**
 * Pick the candidate whose fitted values are closest to a nonparametric
 * wavelet reference curve:
 *
 *   1. beta_ols = (X^T X)^{-1} X^T y, eta = X beta_ols
 *   2. rescale eta to [0,1] by (eta - min) / (max - min)
 *   3. wavelet-fit y against the rescaled eta (reference curve mu_tilde)
 *   4. fit every candidate to the original data by its own estimator
 *   5. rank candidates by RMSE and by median absolute difference to mu_tilde
 *
 * X must carry the intercept in column 0; nonlinear candidates additionally
 * require exactly one predictor column (column 1). Needs n >= 16 rows and at
 * least two candidates. A constant linear predictor raises
 * std::invalid_argument("degenerate linear predictor"). A candidate whose
 * fitter throws is reported with fit_ok = false and never aborts the run;
 * ties on the winning value break toward the lexicographically first id.
 */
SelectionReport wp_select(const Eigen::MatrixXd& X, const std::vector<double>& y,
                          const std::vector<CandidateModel>& candidates,
                          const WaveletOptions& wavelet = {});

}  // namespace wavesel
