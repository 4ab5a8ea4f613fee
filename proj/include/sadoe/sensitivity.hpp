#pragma once

#include "sadoe/basis.hpp"
#include "sadoe/pce.hpp"

#include <Eigen/Dense>

namespace sadoe {

/// Jacobian dS/dc (d x P), columns in truncation-set order.
struct IndexGradient {
    Eigen::MatrixXd matrix;
};

struct SobolEstimate {
    Eigen::VectorXd indices;
    /// sigma^2 * B A^{-1} B^T, the covariance of the index estimates.
    Eigen::MatrixXd covariance;
    /// Sum of squared non-constant coefficients (output variance).
    double total_variance = 0.0;
};

/// S_i = sum_{L_i} c^2 / sum_{L*} c^2. Throws DegenerateModel when the
/// denominator vanishes.
Eigen::VectorXd first_order_indices(const Eigen::VectorXd& coefficients,
                                    const TruncationSet& truncation);

/// b_{i,beta} = -2 c_beta / sum_{L*} c^2 * (S_i - 1 | 0 | S_i) for beta in
/// L_i, beta = 0 and any other index respectively.
IndexGradient index_gradient_matrix(const Eigen::VectorXd& coefficients,
                                    const TruncationSet& truncation);

/// sigma^2 B A^{-1} B^T, symmetrized. Throws SingularDesign if A does not
/// factorize.
Eigen::MatrixXd asymptotic_covariance(const IndexGradient& gradient, const Eigen::MatrixXd& A,
                                      double noise_variance);

/// Indices, gradient-based covariance and output variance for a fitted model
/// whose design has information matrix A.
SobolEstimate estimate_indices(const PceModel& model, const Eigen::MatrixXd& A);

}  // namespace sadoe
