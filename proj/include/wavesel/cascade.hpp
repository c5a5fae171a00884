#pragma once

#include <Eigen/Dense>
#include <vector>

#include "wavesel/filters.hpp"

namespace wavesel {

/**
 * Dyadic refinement matrices of dimension 2N-1:
 *   T0[i][j] = sqrt2 * h_{2i-j-1},  T1[i][j] = sqrt2 * h_{2i-j}   (1-based i, j)
 * with taps outside the filter support read as zero. Products of these
 * matrices along the dyadic expansion of t converge to a rank-one matrix
 * whose columns all equal (phi(t), phi(t+1), ..., phi(t+2N-2)).
 */
struct RefinementMatrices {
    Eigen::MatrixXd t0;
    Eigen::MatrixXd t1;
};

RefinementMatrices refinement_matrices(const FilterPair& fp);

/**
 * Evaluate the scale function at t + {0, 1, ..., 2N-2} by multiplying
 * `depth` refinement matrices selected by the dyadic digits of t and
 * reading the first column of the product.
 *
 * Requires t strictly inside (0,1) and depth >= 1; integer arguments are
 * handled by eigen_phi instead.
 */
std::vector<double> cascade_eval(const FilterPair& fp, double t, int depth = 24);

/**
 * Scale-function values at the interior integer points 1..2N-2, obtained as
 * the eigenvector of the integer-point refinement matrix for eigenvalue 1,
 * normalized so the values sum to 1. Haar has no interior integer points and
 * yields an empty vector. Throws if the eigenvalue-1 eigenspace is not
 * one-dimensional.
 */
std::vector<double> eigen_phi(const FilterPair& fp);

}  // namespace wavesel
