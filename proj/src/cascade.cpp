#include "wavesel/cascade.hpp"

#include <cmath>
#include <stdexcept>

namespace wavesel {

RefinementMatrices refinement_matrices(const FilterPair& fp) {
    const int dim = 2 * fp.vanishing_moments - 1;
    const double root2 = std::sqrt(2.0);
    RefinementMatrices rm;
    rm.t0.resize(dim, dim);
    rm.t1.resize(dim, dim);
    for (int i = 1; i <= dim; ++i) {
        for (int j = 1; j <= dim; ++j) {
            rm.t0(i - 1, j - 1) = root2 * fp.h_at(2 * i - j - 1);
            rm.t1(i - 1, j - 1) = root2 * fp.h_at(2 * i - j);
        }
    }
    return rm;
}

std::vector<double> cascade_eval(const FilterPair& fp, double t, int depth) {
    if (!(t > 0.0 && t < 1.0)) {
        throw std::invalid_argument(
            "cascade_eval: t must lie strictly inside (0,1); integer points "
            "are handled by eigen_phi");
    }
    if (depth < 1) {
        throw std::invalid_argument("cascade_eval: depth must be >= 1");
    }

    const RefinementMatrices rm = refinement_matrices(fp);
    const int dim = 2 * fp.vanishing_moments - 1;
    Eigen::MatrixXd product = Eigen::MatrixXd::Identity(dim, dim);
    double frac = t;
    for (int d = 0; d < depth; ++d) {
        frac *= 2.0;
        const int digit = (frac >= 1.0) ? 1 : 0;
        if (digit == 1) frac -= 1.0;
        product = product * (digit == 0 ? rm.t0 : rm.t1);
    }
    std::vector<double> values(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) values[static_cast<std::size_t>(i)] = product(i, 0);
    return values;
}

std::vector<double> eigen_phi(const FilterPair& fp) {
    const int n = fp.vanishing_moments;
    const int dim = 2 * n - 2;  // interior integer points 1..2N-2
    if (dim <= 0) return {};    // Haar: phi is the unit-interval indicator

    // phi(k) = sqrt2 * sum_m h_m phi(2k - m): restrict to interior points.
    const double root2 = std::sqrt(2.0);
    Eigen::MatrixXd m(dim, dim);
    for (int i = 1; i <= dim; ++i) {
        for (int j = 1; j <= dim; ++j) {
            m(i - 1, j - 1) = root2 * fp.h_at(2 * i - j);
        }
    }

    // Nullspace of (M - I). Dimension must be exactly one.
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m - Eigen::MatrixXd::Identity(dim, dim));
    lu.setThreshold(1e-9);
    if (lu.dimensionOfKernel() != 1) {
        throw std::runtime_error(
            "eigen_phi: eigenvalue-1 eigenspace is not one-dimensional");
    }
    Eigen::VectorXd v = lu.kernel().col(0);
    const double total = v.sum();
    if (std::abs(total) < 1e-12) {
        throw std::runtime_error("eigen_phi: eigenvector has zero sum, cannot normalize");
    }
    v /= total;
    return {v.data(), v.data() + dim};
}

}  // namespace wavesel
