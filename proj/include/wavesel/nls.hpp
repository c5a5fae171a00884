#pragma once

#include <functional>
#include <string>
#include <vector>

namespace wavesel {

/// A scalar regression curve y = f(x, beta) with `arity` parameters.
/// `jacobian` fills df/dbeta at one x (optional; central finite differences
/// are used when absent). `start_heuristic` proposes beta0 from data and may
/// leave a note when it had to fall back to a generic start.
struct NlsModel {
    std::string id;
    int arity = 0;
    std::function<double(double, const std::vector<double>&)> f;
    std::function<void(double, const std::vector<double>&, std::vector<double>&)> jacobian;
    std::function<std::vector<double>(const std::vector<double>&, const std::vector<double>&,
                                      std::string*)>
        start_heuristic;
    std::string domain_note;
};

struct NlsFit {
    std::vector<double> beta_hat;
    double sse = 0.0;
    std::vector<double> fitted;
    int iterations = 0;
    bool converged = false;
};

/// Iteration cap for fit_nls. A result with converged=false and fewer
/// iterations than this stalled at maximum damping (no finite improving step
/// exists) or reached an unidentified solution; one that used the full budget
/// merely ran out of iterations and still carries its best point.
inline constexpr int kNlsMaxIterations = 200;

/// Largest acceptable condition number of J^T J at a converged solution.
/// Beyond it the parameters are not jointly identified by the data (some
/// direction in parameter space leaves the fitted curve unchanged to working
/// precision) and fit_nls reports converged=false. Well-posed fits measure
/// below 1e4 on all catalog curves; degenerate ones measure above 1e6.
inline constexpr double kNlsIdentifiabilityLimit = 1e6;

/// The five curves with printed closed forms:
///   f1  = b1 / (b2 + e^{b3 x})      (logistic-type decay)
///   f2  = b1 + e^{-b2 x}            (shifted exponential decay)
///   f3  = b2 x / (b1 + x)           (saturation / Michaelis-Menten)
///   f4  = b1 cos(2x) + b2 sin(x)    (harmonic, linear in parameters)
///   f24 = 1 / (b1 + b2 x)           (reciprocal line)
/// Further models are supplied by the caller (see expr.hpp).
std::vector<NlsModel> builtin_catalog();

/// Look up one builtin by id; throws std::invalid_argument for unknown ids.
NlsModel builtin_model(const std::string& id);

/// Deterministic documented starts for the builtin ids:
///   f1: logistic amplitude max(y), midpoint at half-amplitude, logit-linear
///       regression for the rate and offset
///   f2: b1 ~ min(y) minus a small margin, log-linear regression for b2
///   f3: b2 ~ max(y), b1 ~ the x closest to half of max(y)
///   f4: exact ordinary least squares on the (cos 2x, sin x) basis
///   f24: ordinary least squares on 1/y
/// When a heuristic's transform is undefined for the data (for example y <= 0
/// where a logarithm or reciprocal is needed) the result falls back to all
/// ones and `warning` (when non-null) says so. Unknown ids also fall back.
std::vector<double> start_heuristics(const std::string& model_id, const std::vector<double>& x,
                                     const std::vector<double>& y,
                                     std::string* warning = nullptr);

/**
 * Levenberg-Marquardt least squares. Damping starts at 1e-3, divides by 10 on
 * an accepted step and multiplies by 10 on a rejected one, scaling by
 * diag(J^T J). Stops when the relative SSE change of an accepted step falls
 * below 1e-10, the gradient infinity-norm falls below 1e-8, or after 200
 * iterations. A model whose normal equations stay singular at maximum damping
 * yields converged = false rather than an exception; a non-finite f at beta0
 * throws std::invalid_argument (supply an explicit start).
 */
NlsFit fit_nls(const NlsModel& model, const std::vector<double>& x, const std::vector<double>& y,
               const std::vector<double>& beta0);

/// Same, with beta0 from the model's start heuristic (or `start_heuristics`
/// by id, or all ones when neither is available).
NlsFit fit_nls(const NlsModel& model, const std::vector<double>& x, const std::vector<double>& y);

/**
 * Exact estimator for the intrinsically linear reciprocal-line curve
 * 1/(b1 + b2 x): ordinary least squares of 1/y on x, solved in closed form
 * over every observation with a finite reciprocal (y != 0). Returns fitted
 * values and SSE on the original response scale with converged = true and
 * iterations = 0.
 *
 * Throws std::invalid_argument when fewer than two observations are usable
 * or the usable x are constant, and std::runtime_error when the fitted
 * denominator b1 + b2 x changes sign inside the observed x range: such a
 * curve has a pole among the data, violating the model's validity region.
 */
NlsFit fit_reciprocal_line(const std::vector<double>& x, const std::vector<double>& y);

/// Evaluate the model over a vector of abscissae.
std::vector<double> evaluate_model(const NlsModel& model, const std::vector<double>& x,
                                   const std::vector<double>& beta);

}  // namespace wavesel
