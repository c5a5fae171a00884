#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace wavesel {

enum class Family { Gaussian, Gamma, InverseGaussian };
enum class Link { Identity, Log, Inverse, InverseSquared };

std::string family_name(Family f);
std::string link_name(Link l);
Family parse_family(const std::string& name);
Link parse_link(const std::string& name);

/// Random-component description: variance function, canonical link, and the
/// unit deviance d(y, mu) with d(y, y) = 0.
struct ExponentialFamily {
    Family name;
    double (*variance)(double mu);
    Link canonical_link;
    double (*unit_deviance)(double y, double mu);
    bool positive_support;  ///< responses and means restricted to (0, inf)
};

/// Link g with inverse and derivative d eta / d mu.
struct LinkSpec {
    Link name;
    double (*g)(double mu);
    double (*g_inverse)(double eta);
    double (*g_prime)(double mu);
};

ExponentialFamily make_family(Family f);
LinkSpec make_link(Link l);

/// The 1/mu^2 link pairs only with the inverse Gaussian family; everything
/// else combines freely for continuous responses.
bool link_supported(Family f, Link l);

struct GlmFit {
    Eigen::VectorXd beta;
    Eigen::VectorXd beta_se;
    std::vector<double> eta;
    std::vector<double> mu;
    double deviance = 0.0;
    double dispersion = 0.0;
    int iterations = 0;
    bool converged = false;
    bool domain_clipped = false;  ///< mean clipping was active at convergence
    Family family = Family::Gaussian;
    Link link = Link::Identity;
};

/**
 * Maximum-likelihood fit by iteratively reweighted least squares with Fisher
 * scoring weights w = 1 / (V(mu) g'(mu)^2). Iterates until the relative
 * deviance change drops below 1e-8 or 50 iterations; deviance increases are
 * met with step-halving. Requires n > p, full-rank X, and responses inside
 * the family support.
 */
GlmFit fit_glm(const Eigen::MatrixXd& X, const std::vector<double>& y,
               const ExponentialFamily& family, const LinkSpec& link);

GlmFit fit_glm(const Eigen::MatrixXd& X, const std::vector<double>& y, Family f, Link l);

struct GlmPrediction {
    std::vector<double> mu;                 ///< NaN where the row was flagged
    std::vector<std::size_t> invalid_rows;  ///< eta outside the link domain
};

GlmPrediction predict_glm(const GlmFit& fit, const Eigen::MatrixXd& X_new);

/// Sum of unit deviances; zero iff y == mu elementwise.
double deviance(const ExponentialFamily& family, const std::vector<double>& y,
                const std::vector<double>& mu);

}  // namespace wavesel
