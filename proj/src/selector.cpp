#include "wavesel/selector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace wavesel {

namespace {

double median_abs_diff(std::vector<double> abs_diff) {
    const std::size_t mid = abs_diff.size() / 2;
    std::nth_element(abs_diff.begin(), abs_diff.begin() + static_cast<long>(mid), abs_diff.end());
    const double hi = abs_diff[mid];
    if (abs_diff.size() % 2 == 1) return hi;
    std::nth_element(abs_diff.begin(), abs_diff.begin() + static_cast<long>(mid) - 1,
                     abs_diff.end());
    return 0.5 * (abs_diff[mid - 1] + hi);
}

}  // namespace

CandidateModel make_nls_candidate(NlsModel model) {
    CandidateModel c;
    c.id = model.id;
    c.kind = CandidateModel::Kind::Nonlinear;
    c.nls = std::move(model);
    return c;
}

CandidateModel make_glm_candidate(Family family, Link link) {
    CandidateModel c;
    c.id = family_name(family) + ":" + link_name(link);
    c.kind = CandidateModel::Kind::Glm;
    c.family = family;
    c.link = link;
    return c;
}

CandidateModel make_reciprocal_line_candidate() {
    CandidateModel c = make_nls_candidate(builtin_model("f24"));
    c.nls_fitter = [](const std::vector<double>& x, const std::vector<double>& y) {
        return fit_reciprocal_line(x, y);
    };
    return c;
}

std::pair<double, double> score(const std::vector<double>& mu_hat,
                                const std::vector<double>& mu_tilde) {
    if (mu_hat.size() != mu_tilde.size()) throw std::invalid_argument("score: length mismatch");
    if (mu_hat.empty()) throw std::invalid_argument("score: empty input");
    double sum_sq = 0.0;
    std::vector<double> abs_diff(mu_hat.size());
    for (std::size_t i = 0; i < mu_hat.size(); ++i) {
        if (!std::isfinite(mu_hat[i]) || !std::isfinite(mu_tilde[i])) {
            throw std::invalid_argument("score: non-finite input");
        }
        const double d = mu_hat[i] - mu_tilde[i];
        sum_sq += d * d;
        abs_diff[i] = std::abs(d);
    }
    const double rmse = std::sqrt(sum_sq / static_cast<double>(mu_hat.size()));
    return {rmse, median_abs_diff(std::move(abs_diff))};
}

WaveletReference wavelet_reference(const Eigen::MatrixXd& X, const std::vector<double>& y,
                                   const WaveletOptions& options) {
    const auto n = static_cast<Eigen::Index>(y.size());
    if (X.rows() != n) throw std::invalid_argument("wavelet_reference: X/y row mismatch");
    if (n < 16) throw std::invalid_argument("wavelet_reference: need at least 16 observations");

    const Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);
    const Eigen::VectorXd beta_ols = X.colPivHouseholderQr().solve(yv);
    const Eigen::VectorXd eta = X * beta_ols;
    const double lo = eta.minCoeff();
    const double hi = eta.maxCoeff();
    if (!(hi > lo)) throw DegeneratePredictorError();

    std::vector<std::size_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return eta(static_cast<Eigen::Index>(a)) < eta(static_cast<Eigen::Index>(b));
    });
    std::vector<double> xs(order.size());
    std::vector<double> ys(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        const double t = (eta(static_cast<Eigen::Index>(order[k])) - lo) / (hi - lo);
        xs[k] = std::clamp(t, 0.0, 1.0);
        ys[k] = y[order[k]];
    }
    const WaveletFit wf = fit_wavelet(xs, ys, options);

    WaveletReference ref;
    ref.eta_min = lo;
    ref.eta_max = hi;
    ref.null_fraction_by_level = wf.null_fraction_by_level;
    ref.lambda = wf.lambda;
    ref.sigma_hat = wf.sigma_hat;
    ref.mu_tilde.resize(order.size());
    ref.eta_scaled.resize(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        ref.mu_tilde[order[k]] = wf.fitted[k];
        ref.eta_scaled[order[k]] = xs[k];
    }
    return ref;
}

SelectionReport wp_select(const Eigen::MatrixXd& X, const std::vector<double>& y,
                          const std::vector<CandidateModel>& candidates,
                          const WaveletOptions& wavelet) {
    const auto n = static_cast<Eigen::Index>(y.size());
    if (X.rows() != n) throw std::invalid_argument("wp_select: X/y row mismatch");
    if (n < 16) throw std::invalid_argument("wp_select: need at least 16 observations");
    if (candidates.size() < 2) throw std::invalid_argument("wp_select: need at least 2 candidates");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (X(i, 0) != 1.0) {
            throw std::invalid_argument("wp_select: X must carry an intercept in column 0");
        }
    }
    for (std::size_t a = 0; a < candidates.size(); ++a) {
        for (std::size_t b = a + 1; b < candidates.size(); ++b) {
            if (candidates[a].id == candidates[b].id) {
                throw std::invalid_argument("wp_select: duplicate candidate id '" +
                                            candidates[a].id + "'");
            }
        }
    }

    const WaveletReference ref = wavelet_reference(X, y, wavelet);

    SelectionReport report;
    report.eta_min = ref.eta_min;
    report.eta_max = ref.eta_max;
    report.null_fraction_by_level = ref.null_fraction_by_level;
    report.lambda = ref.lambda;
    report.sigma_hat = ref.sigma_hat;
    report.wavelet_fitted = ref.mu_tilde;
    report.eta_scaled = ref.eta_scaled;

    std::vector<double> x1;
    if (X.cols() >= 2) {
        x1.resize(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) x1[static_cast<std::size_t>(i)] = X(i, 1);
    }

    report.scores.reserve(candidates.size());
    for (const CandidateModel& c : candidates) {
        CandidateScore cs;
        cs.id = c.id;
        try {
            std::vector<double> mu_hat;
            if (c.kind == CandidateModel::Kind::Nonlinear) {
                if (X.cols() != 2) {
                    throw std::invalid_argument(
                        "nonlinear candidates need exactly one predictor column");
                }
                NlsFit fit = c.nls_fitter ? c.nls_fitter(x1, y) : fit_nls(c.nls, x1, y);
                if (!fit.converged && fit.iterations < kNlsMaxIterations) {
                    // Stalled at maximum damping: no finite improving step
                    // exists from here, so there is no usable fit to score.
                    // (Running out of iterations still leaves a best point.)
                    throw std::runtime_error("least-squares fit stalled before converging");
                }
                mu_hat = std::move(fit.fitted);
            } else {
                GlmFit fit = fit_glm(X, y, c.family, c.link);
                if (!fit.converged) throw std::runtime_error("IRLS fit did not converge");
                mu_hat = std::move(fit.mu);
            }
            const auto [rmse, mae] = score(mu_hat, report.wavelet_fitted);
            cs.rmse = rmse;
            cs.mae = mae;
            cs.fit_ok = true;
            cs.fitted = std::move(mu_hat);
        } catch (const std::exception& err) {
            cs.fit_ok = false;
            cs.error = err.what();
            cs.rmse = std::numeric_limits<double>::quiet_NaN();
            cs.mae = std::numeric_limits<double>::quiet_NaN();
        }
        report.scores.push_back(std::move(cs));
    }

    const auto pick = [&](double CandidateScore::*member) {
        std::string best_id;
        double best = std::numeric_limits<double>::infinity();
        for (const CandidateScore& cs : report.scores) {
            if (!cs.fit_ok) continue;
            const double v = cs.*member;
            if (v < best || (v == best && (best_id.empty() || cs.id < best_id))) {
                best = v;
                best_id = cs.id;
            }
        }
        return best_id;
    };
    report.winner_rmse = pick(&CandidateScore::rmse);
    report.winner_mae = pick(&CandidateScore::mae);
    return report;
}

}  // namespace wavesel
