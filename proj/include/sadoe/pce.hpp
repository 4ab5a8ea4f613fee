#pragma once

#include "sadoe/basis.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>

namespace sadoe {

/// Physical-space design X (n x d) with aligned responses Y.
struct TrainingSample {
    RowMatrix points;
    Eigen::VectorXd responses;

    [[nodiscard]] Eigen::Index size() const noexcept { return points.rows(); }
    /// Throws InvalidArgument on misaligned rows, wrong dimension or
    /// out-of-support coordinates.
    void validate(const BasisSpec& spec) const;
};

class PceModel {
public:
    PceModel(BasisSpec spec, Eigen::VectorXd coefficients, double noise_variance,
             std::size_t n_fit);

    [[nodiscard]] const BasisSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] const Eigen::VectorXd& coefficients() const noexcept { return coefficients_; }
    [[nodiscard]] double noise_variance() const noexcept { return noise_variance_; }
    [[nodiscard]] std::size_t n_fit() const noexcept { return n_fit_; }

    [[nodiscard]] double predict(std::span<const double> x) const;
    [[nodiscard]] double predict_standard(std::span<const double> u) const;

private:
    BasisSpec spec_;
    Eigen::VectorXd coefficients_;
    double noise_variance_;
    std::size_t n_fit_;
};

/// Reciprocal-condition threshold below which the normal equations are
/// treated as singular.
inline constexpr double kSingularRcond = 1e-12;

/// A = sum_i Psi(u_i) Psi(u_i)^T, accumulated in sample order.
Eigen::MatrixXd information_matrix(const RowMatrix& standard_points, const BasisSpec& spec);
Eigen::MatrixXd information_matrix_from_rows(const RowMatrix& basis_rows);

/// Cholesky factorization of an information matrix; throws SingularDesign
/// when the factorization fails or rcond < `min_rcond`.
Eigen::LLT<Eigen::MatrixXd> factorize_information(const Eigen::MatrixXd& A,
                                                  double min_rcond = kSingularRcond);

/// Least-squares fit through the normal equations A c = Psi_n Y.
/// sigma^2 = RSS / (n - P) when n > P, else 0.
PceModel fit_least_squares(const TrainingSample& sample, const BasisSpec& spec);

/// Same fit from precomputed basis rows (n x P), their information matrix and
/// right-hand side Psi_n Y.
PceModel fit_from_normal_equations(const BasisSpec& spec, const RowMatrix& basis_rows,
                                   const Eigen::VectorXd& responses, const Eigen::MatrixXd& A,
                                   const Eigen::VectorXd& rhs);

/// RSS / (n - P); throws InsufficientData when n <= P.
double residual_variance(const PceModel& model, const TrainingSample& sample);

/// Leave-one-out relative error sum (e_i / (1 - h_ii))^2 / sum (y_i - mean)^2
/// via the hat-matrix diagonal.
double loo_relative_error(const TrainingSample& sample, const BasisSpec& spec);
double loo_relative_error_from_rows(const RowMatrix& basis_rows, const Eigen::VectorXd& responses,
                                    const Eigen::VectorXd& coefficients,
                                    const Eigen::LLT<Eigen::MatrixXd>& factor);

}  // namespace sadoe
