#include "wavesel/glm.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace wavesel {

namespace {

constexpr double kMuFloor = 1e-8;
constexpr int kMaxIterations = 50;
constexpr int kMaxHalvings = 20;

double var_gaussian(double) { return 1.0; }
double var_gamma(double mu) { return mu * mu; }
double var_invgauss(double mu) { return mu * mu * mu; }

double dev_gaussian(double y, double mu) {
    const double r = y - mu;
    return r * r;
}
double dev_gamma(double y, double mu) {
    return 2.0 * (-std::log(y / mu) + (y - mu) / mu);
}
double dev_invgauss(double y, double mu) {
    const double r = y - mu;
    return r * r / (mu * mu * y);
}

double id_g(double mu) { return mu; }
double id_ginv(double eta) { return eta; }
double id_gprime(double) { return 1.0; }

double log_g(double mu) { return std::log(mu); }
double log_ginv(double eta) { return std::exp(eta); }
double log_gprime(double mu) { return 1.0 / mu; }

double inv_g(double mu) { return 1.0 / mu; }
double inv_ginv(double eta) { return 1.0 / eta; }
double inv_gprime(double mu) { return -1.0 / (mu * mu); }

double invsq_g(double mu) { return 1.0 / (mu * mu); }
double invsq_ginv(double eta) { return 1.0 / std::sqrt(eta); }
double invsq_gprime(double mu) { return -2.0 / (mu * mu * mu); }

bool mu_valid(double mu, const ExponentialFamily& fam) {
    if (!std::isfinite(mu)) return false;
    return !fam.positive_support || mu > 0.0;
}

// Map eta to a usable mean. Identity and inverse links can step outside a
// positive family's domain; those are clipped to a small floor (flagged).
// Other violations (inverse-squared with eta <= 0, overflow) are unrecoverable
// for the step and reported as invalid.
bool eta_to_mu(const Eigen::VectorXd& eta, const ExponentialFamily& fam, const LinkSpec& link,
               Eigen::VectorXd& mu, bool& clipped) {
    clipped = false;
    const bool clippable =
        fam.positive_support && (link.name == Link::Identity || link.name == Link::Inverse);
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        if (link.name == Link::InverseSquared && !(eta[i] > 0.0)) return false;
        if (link.name == Link::Inverse && eta[i] == 0.0) return false;
        double m = link.g_inverse(eta[i]);
        if (!mu_valid(m, fam)) {
            if (!clippable || !std::isfinite(m)) return false;
            m = kMuFloor;
            clipped = true;
        }
        mu[i] = m;
    }
    return true;
}

}  // namespace

std::string family_name(Family f) {
    switch (f) {
        case Family::Gaussian: return "gaussian";
        case Family::Gamma: return "gamma";
        case Family::InverseGaussian: return "inverse_gaussian";
    }
    return "?";
}

std::string link_name(Link l) {
    switch (l) {
        case Link::Identity: return "identity";
        case Link::Log: return "log";
        case Link::Inverse: return "inverse";
        case Link::InverseSquared: return "inverse_squared";
    }
    return "?";
}

Family parse_family(const std::string& name) {
    if (name == "gaussian" || name == "normal") return Family::Gaussian;
    if (name == "gamma") return Family::Gamma;
    if (name == "inverse_gaussian" || name == "inverse-gaussian" || name == "invgauss") {
        return Family::InverseGaussian;
    }
    throw std::invalid_argument("unknown family '" + name + "'");
}

Link parse_link(const std::string& name) {
    if (name == "identity") return Link::Identity;
    if (name == "log") return Link::Log;
    if (name == "inverse") return Link::Inverse;
    if (name == "inverse_squared" || name == "inverse-squared" || name == "1/mu^2") {
        return Link::InverseSquared;
    }
    throw std::invalid_argument("unknown link '" + name + "'");
}

ExponentialFamily make_family(Family f) {
    switch (f) {
        case Family::Gaussian:
            return {Family::Gaussian, var_gaussian, Link::Identity, dev_gaussian, false};
        case Family::Gamma:
            return {Family::Gamma, var_gamma, Link::Inverse, dev_gamma, true};
        case Family::InverseGaussian:
            return {Family::InverseGaussian, var_invgauss, Link::InverseSquared, dev_invgauss,
                    true};
    }
    throw std::invalid_argument("make_family: bad enum");
}

LinkSpec make_link(Link l) {
    switch (l) {
        case Link::Identity: return {Link::Identity, id_g, id_ginv, id_gprime};
        case Link::Log: return {Link::Log, log_g, log_ginv, log_gprime};
        case Link::Inverse: return {Link::Inverse, inv_g, inv_ginv, inv_gprime};
        case Link::InverseSquared:
            return {Link::InverseSquared, invsq_g, invsq_ginv, invsq_gprime};
    }
    throw std::invalid_argument("make_link: bad enum");
}

bool link_supported(Family f, Link l) {
    if (l == Link::InverseSquared) return f == Family::InverseGaussian;
    return true;
}

double deviance(const ExponentialFamily& family, const std::vector<double>& y,
                const std::vector<double>& mu) {
    if (y.size() != mu.size()) throw std::invalid_argument("deviance: length mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (family.positive_support && (!(y[i] > 0.0) || !(mu[i] > 0.0))) {
            throw std::invalid_argument("deviance: value outside family support");
        }
        total += family.unit_deviance(y[i], mu[i]);
    }
    return total;
}

GlmFit fit_glm(const Eigen::MatrixXd& X, const std::vector<double>& y,
               const ExponentialFamily& family, const LinkSpec& link) {
    const auto n = static_cast<Eigen::Index>(y.size());
    const Eigen::Index p = X.cols();
    if (X.rows() != n) throw std::invalid_argument("fit_glm: X/y row mismatch");
    if (n <= p) throw std::invalid_argument("fit_glm: need more observations than parameters");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> rank_qr(X);
    if (rank_qr.rank() < p) throw std::invalid_argument("fit_glm: design matrix is rank deficient");
    for (double yi : y) {
        if (!std::isfinite(yi)) throw std::invalid_argument("fit_glm: non-finite response");
        if (family.positive_support && !(yi > 0.0)) {
            throw std::invalid_argument("fit_glm: response outside the family support");
        }
    }

    const Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);
    const bool needs_positive_mu =
        family.positive_support || link.name == Link::Log || link.name == Link::Inverse ||
        link.name == Link::InverseSquared;

    // Start from the response itself, pulled into the domain interior.
    Eigen::VectorXd mu(n);
    if (needs_positive_mu) {
        const double floor_val = std::max(0.1 * std::abs(yv.mean()), kMuFloor);
        for (Eigen::Index i = 0; i < n; ++i) mu[i] = std::max(y[static_cast<std::size_t>(i)], floor_val);
    } else {
        mu = yv;
    }
    Eigen::VectorXd eta(n);
    for (Eigen::Index i = 0; i < n; ++i) eta[i] = link.g(mu[i]);

    std::vector<double> mu_std(y.size());
    auto dev_of = [&](const Eigen::VectorXd& m) {
        Eigen::VectorXd::Map(mu_std.data(), n) = m;
        return deviance(family, y, mu_std);
    };

    GlmFit fit;
    fit.family = family.name;
    fit.link = link.name;

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    bool have_beta = false;
    double dev_old = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd weighted_X;
    bool clipped = false;

    for (int iter = 1; iter <= kMaxIterations; ++iter) {
        // Working response and Fisher weights at the current mean.
        Eigen::VectorXd z(n);
        Eigen::VectorXd w(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double gp = link.g_prime(mu[i]);
            z[i] = eta[i] + (yv[i] - mu[i]) * gp;
            w[i] = 1.0 / (family.variance(mu[i]) * gp * gp);
            if (!std::isfinite(w[i]) || w[i] <= 0.0) w[i] = kMuFloor;
        }
        const Eigen::ArrayXd sw = w.array().sqrt();
        weighted_X = sw.matrix().asDiagonal() * X;
        const Eigen::VectorXd wz = (sw * z.array()).matrix();
        const Eigen::VectorXd beta_prop = weighted_X.colPivHouseholderQr().solve(wz);

        // Step-halving toward the previous iterate keeps the mean inside the
        // domain and the deviance non-increasing.
        bool accepted = false;
        double dev_new = 0.0;
        Eigen::VectorXd eta_try(n);
        Eigen::VectorXd mu_try(n);
        double step = 1.0;
        for (int halving = 0; halving <= kMaxHalvings; ++halving, step *= 0.5) {
            const Eigen::VectorXd beta_try =
                have_beta ? (beta + step * (beta_prop - beta)).eval() : beta_prop;
            eta_try = X * beta_try;
            bool step_clipped = false;
            if (!eta_to_mu(eta_try, family, link, mu_try, step_clipped)) {
                if (!have_beta) break;  // no base point to retreat toward
                continue;
            }
            dev_new = dev_of(mu_try);
            if (!std::isfinite(dev_new)) continue;
            if (have_beta && dev_new > dev_old + 1e-12 * (1.0 + std::abs(dev_old))) continue;
            beta = beta_try;
            eta = eta_try;
            mu = mu_try;
            clipped = step_clipped;
            accepted = true;
            break;
        }
        if (!accepted) {
            if (!have_beta) {
                // Retreat to an intercept-only start inside the domain.
                const double mu_bar = mu.mean();
                beta = Eigen::VectorXd::Zero(p);
                beta(0) = link.g(mu_bar);
                eta = X * beta;
                if (!eta_to_mu(eta, family, link, mu, clipped)) {
                    throw std::runtime_error(
                        "fit_glm: mean left the link domain and no valid start was found");
                }
                dev_old = dev_of(mu);
                have_beta = true;
                fit.iterations = iter;
                continue;
            }
            // Domain violations that survive 20 halvings are an error; a pure
            // deviance plateau means we are already at the optimum.
            Eigen::VectorXd probe = X * (beta + 1e-10 * (beta_prop - beta));
            bool probe_clip = false;
            if (!eta_to_mu(probe, family, link, mu_try, probe_clip)) {
                throw std::runtime_error("fit_glm: mean left the link domain during iteration");
            }
            fit.converged = true;
            fit.iterations = iter;
            break;
        }

        fit.iterations = iter;
        have_beta = true;
        if (std::abs(dev_new - dev_old) < 1e-8 * (0.1 + std::abs(dev_new))) {
            fit.converged = true;
            dev_old = dev_new;
            break;
        }
        dev_old = dev_new;
    }

    fit.beta = beta;
    fit.deviance = dev_old;
    fit.dispersion = dev_old / static_cast<double>(n - p);
    fit.domain_clipped = clipped;
    fit.eta.assign(eta.data(), eta.data() + n);
    fit.mu.assign(mu.data(), mu.data() + n);

    // Standard errors from the Fisher information at the final weights.
    const Eigen::MatrixXd xtwx = weighted_X.transpose() * weighted_X;
    const Eigen::MatrixXd cov = xtwx.ldlt().solve(
        Eigen::MatrixXd::Identity(p, p)) * fit.dispersion;
    fit.beta_se = cov.diagonal().array().max(0.0).sqrt().matrix();
    return fit;
}

GlmFit fit_glm(const Eigen::MatrixXd& X, const std::vector<double>& y, Family f, Link l) {
    if (!link_supported(f, l)) {
        throw std::invalid_argument("fit_glm: link " + link_name(l) +
                                    " is not supported for family " + family_name(f));
    }
    return fit_glm(X, y, make_family(f), make_link(l));
}

GlmPrediction predict_glm(const GlmFit& fit, const Eigen::MatrixXd& X_new) {
    if (X_new.cols() != fit.beta.size()) {
        throw std::invalid_argument("predict_glm: column count does not match the fit");
    }
    const ExponentialFamily fam = make_family(fit.family);
    const LinkSpec link = make_link(fit.link);
    const Eigen::VectorXd eta = X_new * fit.beta;
    GlmPrediction pred;
    pred.mu.resize(static_cast<std::size_t>(eta.size()));
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        bool bad = false;
        if (link.name == Link::InverseSquared && !(eta[i] > 0.0)) bad = true;
        if (link.name == Link::Inverse && eta[i] == 0.0) bad = true;
        double mu = bad ? std::numeric_limits<double>::quiet_NaN() : link.g_inverse(eta[i]);
        if (!bad && !mu_valid(mu, fam)) {
            bad = true;
            mu = std::numeric_limits<double>::quiet_NaN();
        }
        if (bad) pred.invalid_rows.push_back(static_cast<std::size_t>(i));
        pred.mu[static_cast<std::size_t>(i)] = mu;
    }
    return pred;
}

}  // namespace wavesel
