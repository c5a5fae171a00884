#include "wavesel/nls.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wavesel {

namespace {

// Simple-regression slope/intercept of z on x; slope 0 when x is constant.
std::pair<double, double> simple_ols(const std::vector<double>& x, const std::vector<double>& z) {
    const auto n = static_cast<double>(x.size());
    double xbar = 0.0;
    double zbar = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xbar += x[i];
        zbar += z[i];
    }
    xbar /= n;
    zbar /= n;
    double sxx = 0.0;
    double sxz = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - xbar) * (x[i] - xbar);
        sxz += (x[i] - xbar) * (z[i] - zbar);
    }
    const double slope = sxx > 0.0 ? sxz / sxx : 0.0;
    return {slope, zbar - slope * xbar};
}

std::vector<double> fallback_start(int arity, std::string* warning, const char* why) {
    if (warning) *warning = why;
    return std::vector<double>(static_cast<std::size_t>(arity), 1.0);
}

/// Noise-robust curve sketch: means of contiguous blocks after ordering by
/// x. Returns (block center x, block mean y) pairs, at least one block.
std::vector<std::pair<double, double>> block_means(const std::vector<double>& x,
                                                   const std::vector<double>& y) {
    std::vector<std::size_t> order(x.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    const std::size_t n = x.size();
    const std::size_t blocks = std::clamp<std::size_t>(n / 8, 1, 16);
    std::vector<std::pair<double, double>> out;
    out.reserve(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t lo = b * n / blocks;
        const std::size_t hi = (b + 1) * n / blocks;
        double sx = 0.0;
        double sy = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            sx += x[order[i]];
            sy += y[order[i]];
        }
        const auto len = static_cast<double>(hi - lo);
        out.emplace_back(sx / len, sy / len);
    }
    return out;
}

std::vector<double> start_f1(const std::vector<double>& x, const std::vector<double>& y,
                             std::string* warning) {
    // f1 = b1/(b2 + e^{b3 x}) is a logistic running between the plateaus
    // b1/b2 and 0; equivalently A/(1 + e^{b3 (x - xm)}) with A = b1/b2 and
    // midpoint xm = ln(b2)/b3. Range gives A, the x nearest each quarter
    // crossing gives the midpoint and the slope scale:
    //   y = 3A/4 at xm - ln(3)/b3,  y = A/4 at xm + ln(3)/b3.
    const auto sketch = block_means(x, y);
    double amplitude = -std::numeric_limits<double>::infinity();
    for (const auto& [bx, by] : sketch) amplitude = std::max(amplitude, by);
    if (!(amplitude > 0.0)) {
        return fallback_start(3, warning, "f1 start needs a positive response plateau");
    }
    auto crossing = [&](double level) {
        double best_x = sketch.front().first;
        double best_gap = std::numeric_limits<double>::infinity();
        for (const auto& [bx, by] : sketch) {
            const double gap = std::abs(by - level);
            if (gap < best_gap) {
                best_gap = gap;
                best_x = bx;
            }
        }
        return best_x;
    };
    const double x75 = crossing(0.75 * amplitude);
    const double x50 = crossing(0.50 * amplitude);
    const double x25 = crossing(0.25 * amplitude);
    const double span = sketch.back().first - sketch.front().first;
    if (x25 == x75 || !(span > 0.0)) {
        return fallback_start(3, warning, "f1 start found no quarter crossings");
    }
    // The sketch cannot resolve a transition sharper than one block, so floor
    // the quarter-crossing gap at that width; otherwise a noisy sketch can
    // propose an absurdly steep start.
    double gap = x25 - x75;
    const double min_gap = span / static_cast<double>(sketch.size());
    if (std::abs(gap) < min_gap) gap = std::copysign(min_gap, gap);
    const double b3 = 2.0 * std::log(3.0) / gap;
    const double b2 = std::exp(std::clamp(b3 * x50, -40.0, 40.0));
    if (!std::isfinite(b3) || !std::isfinite(b2)) {
        return fallback_start(3, warning, "f1 range/midpoint start was degenerate");
    }
    return {amplitude * b2, b2, b3};
}

std::vector<double> start_f2(const std::vector<double>& x, const std::vector<double>& y,
                             std::string* warning) {
    // f2 = b1 + e^{-b2 x}: the floor of the curve sketch estimates b1, then
    // ln(y - b1) = -b2 x on the responses clearly above the floor.
    const auto sketch = block_means(x, y);
    double floor = std::numeric_limits<double>::infinity();
    double ceil = -std::numeric_limits<double>::infinity();
    for (const auto& [bx, by] : sketch) {
        floor = std::min(floor, by);
        ceil = std::max(ceil, by);
    }
    const double spread = std::max(ceil - floor, 1e-12);
    const double b1 = floor - 0.05 * spread;
    std::vector<double> xs;
    std::vector<double> zs;
    for (const auto& [bx, by] : sketch) {
        if (by - b1 > 0.05 * spread) {
            xs.push_back(bx);
            zs.push_back(std::log(by - b1));
        }
    }
    if (xs.size() < 2) return fallback_start(2, warning, "f2 start found no usable responses");
    const auto [slope, intercept] = simple_ols(xs, zs);
    (void)intercept;
    return {b1, -slope};
}

std::vector<double> start_f3(const std::vector<double>& x, const std::vector<double>& y,
                             std::string* warning) {
    // f3 = b2 x/(b1 + x): the plateau estimates b2 and the half-plateau
    // abscissa estimates b1.
    (void)warning;
    const double b2 = *std::max_element(y.begin(), y.end());
    const double half = 0.5 * b2;
    std::size_t best = 0;
    double best_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double gap = std::abs(y[i] - half);
        if (gap < best_gap) {
            best_gap = gap;
            best = i;
        }
    }
    double b1 = x[best];
    if (!(b1 > 0.0)) b1 = 1.0;
    return {b1, b2};
}

std::vector<double> start_f4(const std::vector<double>& x, const std::vector<double>& y,
                             std::string* warning) {
    // Linear in parameters: solve least squares on the (cos 2x, sin x) basis.
    (void)warning;
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd basis(n, 2);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double xi = x[static_cast<std::size_t>(i)];
        basis(i, 0) = std::cos(2.0 * xi);
        basis(i, 1) = std::sin(xi);
        rhs(i) = y[static_cast<std::size_t>(i)];
    }
    const Eigen::Vector2d b = basis.colPivHouseholderQr().solve(rhs);
    return {b(0), b(1)};
}

std::vector<double> start_f24(const std::vector<double>& x, const std::vector<double>& y,
                              std::string* warning) {
    // f24 = 1/(b1 + b2 x): regress 1/y on x when y stays away from zero.
    // Non-positive responses leave the reciprocal regression undefined.
    for (double yi : y) {
        if (yi <= 0.0 || std::abs(yi) < 1e-8) {
            return fallback_start(2, warning, "f24 start needs y bounded away from zero");
        }
    }
    std::vector<double> recip(y.size());
    std::transform(y.begin(), y.end(), recip.begin(), [](double v) { return 1.0 / v; });
    const auto [slope, intercept] = simple_ols(x, recip);
    return {intercept, slope};
}

NlsModel make_builtin(std::string id, int arity,
                      double (*fn)(double, const std::vector<double>&),
                      void (*jac)(double, const std::vector<double>&, std::vector<double>&),
                      std::string note) {
    NlsModel m;
    m.id = std::move(id);
    m.arity = arity;
    m.f = fn;
    m.jacobian = jac;
    const std::string captured_id = m.id;
    m.start_heuristic = [captured_id](const std::vector<double>& x, const std::vector<double>& y,
                                      std::string* warning) {
        return start_heuristics(captured_id, x, y, warning);
    };
    m.domain_note = std::move(note);
    return m;
}

// b2 >= 0 is part of the model: the logistic family is pole-free. Negative
// b2 turns the curve into a broken hyperbola with a singularity at
// x = ln(-b2)/b3, which is a different shape family altogether, so such
// parameter vectors evaluate as invalid and the solver rejects them.
double f1_eval(double x, const std::vector<double>& b) {
    if (b[1] < 0.0) return std::numeric_limits<double>::quiet_NaN();
    return b[0] / (b[1] + std::exp(b[2] * x));
}
void f1_jac(double x, const std::vector<double>& b, std::vector<double>& out) {
    const double e = std::exp(b[2] * x);
    const double d = b[1] + e;
    out[0] = 1.0 / d;
    out[1] = -b[0] / (d * d);
    out[2] = -b[0] * x * e / (d * d);
}

double f2_eval(double x, const std::vector<double>& b) { return b[0] + std::exp(-b[1] * x); }
void f2_jac(double x, const std::vector<double>& b, std::vector<double>& out) {
    out[0] = 1.0;
    out[1] = -x * std::exp(-b[1] * x);
}

// b1 >= 0 is part of the model: the saturation constant of the
// Michaelis-Menten curve is nonnegative, keeping the pole at x = -b1 out of
// any positive predictor range.
double f3_eval(double x, const std::vector<double>& b) {
    if (b[0] < 0.0) return std::numeric_limits<double>::quiet_NaN();
    return b[1] * x / (b[0] + x);
}
void f3_jac(double x, const std::vector<double>& b, std::vector<double>& out) {
    const double d = b[0] + x;
    out[0] = -b[1] * x / (d * d);
    out[1] = x / d;
}

double f4_eval(double x, const std::vector<double>& b) {
    return b[0] * std::cos(2.0 * x) + b[1] * std::sin(x);
}
void f4_jac(double x, const std::vector<double>&, std::vector<double>& out) {
    out[0] = std::cos(2.0 * x);
    out[1] = std::sin(x);
}

double f24_eval(double x, const std::vector<double>& b) { return 1.0 / (b[0] + b[1] * x); }
void f24_jac(double x, const std::vector<double>& b, std::vector<double>& out) {
    const double d = b[0] + b[1] * x;
    out[0] = -1.0 / (d * d);
    out[1] = -x / (d * d);
}

// Central finite differences with a relative step.
void numeric_jacobian(const NlsModel& model, double x, const std::vector<double>& beta,
                      std::vector<double>& out) {
    std::vector<double> b = beta;
    for (std::size_t j = 0; j < beta.size(); ++j) {
        const double h = 1e-6 * std::max(1.0, std::abs(beta[j]));
        b[j] = beta[j] + h;
        const double up = model.f(x, b);
        b[j] = beta[j] - h;
        const double dn = model.f(x, b);
        b[j] = beta[j];
        out[j] = (up - dn) / (2.0 * h);
    }
}

}  // namespace

std::vector<NlsModel> builtin_catalog() {
    std::vector<NlsModel> catalog;
    catalog.push_back(make_builtin("f1", 3, f1_eval, f1_jac, "logistic regime: b2 >= 0"));
    catalog.push_back(make_builtin("f2", 2, f2_eval, f2_jac, "all reals"));
    catalog.push_back(make_builtin("f3", 2, f3_eval, f3_jac, "saturation constant b1 >= 0"));
    catalog.push_back(make_builtin("f4", 2, f4_eval, f4_jac, "all reals"));
    catalog.push_back(make_builtin("f24", 2, f24_eval, f24_jac, "b1 + b2 x != 0"));
    return catalog;
}

NlsModel builtin_model(const std::string& id) {
    for (auto& m : builtin_catalog()) {
        if (m.id == id) return m;
    }
    throw std::invalid_argument("unknown builtin model '" + id + "'");
}

std::vector<double> start_heuristics(const std::string& model_id, const std::vector<double>& x,
                                     const std::vector<double>& y, std::string* warning) {
    if (x.empty() || x.size() != y.size()) {
        throw std::invalid_argument("start_heuristics: need matching nonempty x and y");
    }
    if (warning) warning->clear();
    if (model_id == "f1") return start_f1(x, y, warning);
    if (model_id == "f2") return start_f2(x, y, warning);
    if (model_id == "f3") return start_f3(x, y, warning);
    if (model_id == "f4") return start_f4(x, y, warning);
    if (model_id == "f24") return start_f24(x, y, warning);
    if (warning) *warning = "no start heuristic registered for '" + model_id + "'";
    return {};
}

std::vector<double> evaluate_model(const NlsModel& model, const std::vector<double>& x,
                                   const std::vector<double>& beta) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = model.f(x[i], beta);
    return out;
}

NlsFit fit_nls(const NlsModel& model, const std::vector<double>& x, const std::vector<double>& y,
               const std::vector<double>& beta0) {
    const std::size_t n = x.size();
    const std::size_t p = static_cast<std::size_t>(model.arity);
    if (n != y.size()) throw std::invalid_argument("fit_nls: x/y length mismatch");
    if (n <= p) throw std::invalid_argument("fit_nls: need more observations than parameters");
    if (beta0.size() != p) throw std::invalid_argument("fit_nls: beta0 arity mismatch");
    for (double b : beta0) {
        if (!std::isfinite(b)) throw std::invalid_argument("fit_nls: non-finite beta0");
    }

    std::vector<double> beta = beta0;
    auto sse_at = [&](const std::vector<double>& b, std::vector<double>& fitted) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            fitted[i] = model.f(x[i], b);
            if (!std::isfinite(fitted[i])) return std::numeric_limits<double>::infinity();
            const double r = y[i] - fitted[i];
            s += r * r;
        }
        return s;
    };

    std::vector<double> fitted(n);
    double sse = sse_at(beta, fitted);
    if (!std::isfinite(sse)) {
        throw std::invalid_argument("fit_nls: model '" + model.id +
                                    "' is not finite at the start; supply an explicit beta0");
    }

    NlsFit fit;
    constexpr double kLambdaMax = 1e12;
    double lambda = 1e-3;
    Eigen::MatrixXd jac(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    std::vector<double> row(p);
    std::vector<double> trial_fitted(n);

    for (int iter = 1; iter <= kNlsMaxIterations; ++iter) {
        fit.iterations = iter;
        for (std::size_t i = 0; i < n; ++i) {
            if (model.jacobian) {
                model.jacobian(x[i], beta, row);
            } else {
                numeric_jacobian(model, x[i], beta, row);
            }
            for (std::size_t j = 0; j < p; ++j) jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
        }
        Eigen::VectorXd resid(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) resid(static_cast<Eigen::Index>(i)) = y[i] - fitted[i];
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd jtr = jac.transpose() * resid;
        if (jtr.lpNorm<Eigen::Infinity>() < 1e-8) {
            fit.converged = true;
            break;
        }

        // Marquardt scaling: damp each parameter by its own curvature.
        bool stepped = false;
        bool at_floor = false;  // SSE change fell below the relative tolerance
        bool wall_hit = false;  // a trial left the model's valid region
        while (lambda <= kLambdaMax) {
            Eigen::MatrixXd damped = jtj;
            for (Eigen::Index j = 0; j < damped.rows(); ++j) {
                damped(j, j) += lambda * std::max(jtj(j, j), 1e-12);
            }
            const Eigen::VectorXd delta = damped.ldlt().solve(jtr);
            std::vector<double> trial = beta;
            bool finite = delta.allFinite();
            for (std::size_t j = 0; finite && j < p; ++j) {
                trial[j] += delta(static_cast<Eigen::Index>(j));
                finite = std::isfinite(trial[j]);
            }
            const double trial_sse =
                finite ? sse_at(trial, trial_fitted) : std::numeric_limits<double>::infinity();
            if (!std::isfinite(trial_sse)) wall_hit = true;
            const double rel_change =
                std::abs(trial_sse - sse) / std::max(sse, 1e-300);
            if (trial_sse < sse) {
                beta = std::move(trial);
                fitted = trial_fitted;
                sse = trial_sse;
                lambda = std::max(lambda / 10.0, 1e-12);
                stepped = true;
                if (rel_change < 1e-10) at_floor = true;
                break;
            }
            if (std::isfinite(trial_sse) && rel_change < 1e-10) {
                // The best available step no longer moves the SSE by more than
                // the relative tolerance: we are at the achievable floor.
                at_floor = true;
                break;
            }
            lambda *= 10.0;
        }
        if (at_floor) {
            // Reaching the floor means convergence — unless the optimizer is
            // pressed against the model's validity boundary, in which case
            // the data's optimum lies outside the declared region and there
            // is no interior fit to report.
            fit.converged = !wall_hit;
            break;
        }
        if (!stepped) break;  // singular or stuck at maximum damping
    }

    if (fit.converged) {
        // A solution only counts when the data identify the parameters there.
        // Near-singular J^T J means some parameter direction has essentially
        // no effect on the fitted curve (for example, a sigmoid fitted to data
        // that never leave its saturated arm): the coordinates are arbitrary
        // and their standard errors diverge, so no valid estimate exists.
        for (std::size_t i = 0; i < n; ++i) {
            if (model.jacobian) {
                model.jacobian(x[i], beta, row);
            } else {
                numeric_jacobian(model, x[i], beta, row);
            }
            for (std::size_t j = 0; j < p; ++j)
                jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
        }
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
        const double s_max = svd.singularValues()(0);
        const double s_min = svd.singularValues()(svd.singularValues().size() - 1);
        const double cond_jtj =
            s_min > 0.0 ? (s_max / s_min) * (s_max / s_min) : std::numeric_limits<double>::infinity();
        if (cond_jtj > kNlsIdentifiabilityLimit) fit.converged = false;
    }

    fit.beta_hat = beta;
    fit.fitted = fitted;
    fit.sse = sse;
    return fit;
}

NlsFit fit_nls(const NlsModel& model, const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> beta0;
    if (model.start_heuristic) {
        beta0 = model.start_heuristic(x, y, nullptr);
    } else {
        beta0 = start_heuristics(model.id, x, y, nullptr);
    }
    if (beta0.size() != static_cast<std::size_t>(model.arity)) {
        beta0.assign(static_cast<std::size_t>(model.arity), 1.0);
    }
    return fit_nls(model, x, y, beta0);
}

NlsFit fit_reciprocal_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.empty()) {
        throw std::invalid_argument("reciprocal-line fit needs matching nonempty x and y");
    }
    // Normal equations of 1/y ~ 1 + x over the usable observations.
    double sw = 0.0, sx = 0.0, sxx = 0.0, sz = 0.0, sxz = 0.0;
    double x_lo = std::numeric_limits<double>::infinity();
    double x_hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double z = 1.0 / y[i];
        if (!std::isfinite(z) || !std::isfinite(x[i])) continue;
        sw += 1.0;
        sx += x[i];
        sxx += x[i] * x[i];
        sz += z;
        sxz += x[i] * z;
        x_lo = std::min(x_lo, x[i]);
        x_hi = std::max(x_hi, x[i]);
    }
    const double det = sw * sxx - sx * sx;
    if (sw < 2.0 || !(det > 0.0)) {
        throw std::invalid_argument("reciprocal-line fit needs two distinct x with nonzero y");
    }
    const double b1 = (sxx * sz - sx * sxz) / det;
    const double b2 = (sw * sxz - sx * sz) / det;
    // A denominator that changes sign across the observed range puts the
    // curve's pole among the data: outside the model's validity region.
    const double den_lo = b1 + b2 * x_lo;
    const double den_hi = b1 + b2 * x_hi;
    if (!(den_lo * den_hi > 0.0)) {
        throw std::runtime_error("reciprocal-line fit has a pole inside the data range");
    }
    NlsFit fit;
    fit.beta_hat = {b1, b2};
    fit.fitted.resize(x.size());
    fit.sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        fit.fitted[i] = 1.0 / (b1 + b2 * x[i]);
        const double r = y[i] - fit.fitted[i];
        fit.sse += r * r;
    }
    fit.iterations = 0;
    fit.converged = true;
    return fit;
}

}  // namespace wavesel
