#include "sadoe/pce.hpp"

#include "sadoe/error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace sadoe {

void TrainingSample::validate(const BasisSpec& spec) const {
    if (points.rows() != responses.size()) {
        throw InvalidArgument("design rows and responses are misaligned");
    }
    if (points.rows() < 1) throw InsufficientData("training sample is empty");
    if (points.cols() != spec.dimension()) throw InvalidArgument("design dimension mismatch");
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        for (Eigen::Index k = 0; k < points.cols(); ++k) {
            if (!spec.marginals()[static_cast<std::size_t>(k)].in_support(points(i, k))) {
                throw InvalidArgument("design point " + std::to_string(i) +
                                      " lies outside the input support");
            }
        }
    }
}

PceModel::PceModel(BasisSpec spec, Eigen::VectorXd coefficients, double noise_variance,
                   std::size_t n_fit)
    : spec_(std::move(spec)),
      coefficients_(std::move(coefficients)),
      noise_variance_(noise_variance),
      n_fit_(n_fit) {
    if (static_cast<std::size_t>(coefficients_.size()) != spec_.size()) {
        throw InvalidArgument("coefficient count does not match the truncation set");
    }
    if (!(noise_variance_ >= 0.0)) throw InvalidArgument("noise variance must be >= 0");
}

double PceModel::predict(std::span<const double> x) const {
    const Eigen::VectorXd u = spec_.to_standard(x);
    return predict_standard(as_span(u));
}

double PceModel::predict_standard(std::span<const double> u) const {
    return coefficients_.dot(spec_.evaluate(u));
}

Eigen::MatrixXd information_matrix_from_rows(const RowMatrix& basis_rows) {
    const Eigen::Index P = basis_rows.cols();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(P, P);
    for (Eigen::Index i = 0; i < basis_rows.rows(); ++i) {
        const auto psi = basis_rows.row(i).transpose();
        A.noalias() += psi * psi.transpose();
    }
    return A;
}

Eigen::MatrixXd information_matrix(const RowMatrix& standard_points, const BasisSpec& spec) {
    return information_matrix_from_rows(spec.evaluate_rows(standard_points));
}

Eigen::LLT<Eigen::MatrixXd> factorize_information(const Eigen::MatrixXd& A, double min_rcond) {
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) {
        throw SingularDesign("information matrix is not positive definite");
    }
    const double rcond = llt.rcond();
    if (!(rcond >= min_rcond)) {
        throw SingularDesign("information matrix is ill-conditioned (rcond " +
                             std::to_string(rcond) + ")");
    }
    return llt;
}

namespace {

double residual_sum_of_squares(const RowMatrix& rows, const Eigen::VectorXd& y,
                               const Eigen::VectorXd& c) {
    return (y - rows * c).squaredNorm();
}

}  // namespace

PceModel fit_from_normal_equations(const BasisSpec& spec, const RowMatrix& basis_rows,
                                   const Eigen::VectorXd& responses, const Eigen::MatrixXd& A,
                                   const Eigen::VectorXd& rhs) {
    const auto n = basis_rows.rows();
    const auto P = static_cast<Eigen::Index>(spec.size());
    if (n < P) {
        throw InsufficientData("sample size " + std::to_string(n) + " is below the basis size " +
                               std::to_string(P));
    }
    const auto llt = factorize_information(A);
    Eigen::VectorXd c = llt.solve(rhs);
    const double sigma2 =
        n > P ? residual_sum_of_squares(basis_rows, responses, c) / static_cast<double>(n - P) : 0.0;
    return {spec, std::move(c), sigma2, static_cast<std::size_t>(n)};
}

PceModel fit_least_squares(const TrainingSample& sample, const BasisSpec& spec) {
    sample.validate(spec);
    if (sample.size() < static_cast<Eigen::Index>(spec.size())) {
        throw InsufficientData("sample size " + std::to_string(sample.size()) +
                               " is below the basis size " + std::to_string(spec.size()));
    }
    const RowMatrix rows = spec.evaluate_rows(spec.to_standard_rows(sample.points));
    const Eigen::MatrixXd A = information_matrix_from_rows(rows);
    const Eigen::VectorXd rhs = rows.transpose() * sample.responses;
    return fit_from_normal_equations(spec, rows, sample.responses, A, rhs);
}

double residual_variance(const PceModel& model, const TrainingSample& sample) {
    const auto& spec = model.spec();
    sample.validate(spec);
    const auto n = sample.size();
    const auto P = static_cast<Eigen::Index>(spec.size());
    if (n <= P) throw InsufficientData("residual variance requires n > P");
    double rss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double r = sample.responses[i] - model.predict(row_span(sample.points, i));
        rss += r * r;
    }
    return rss / static_cast<double>(n - P);
}

double loo_relative_error_from_rows(const RowMatrix& basis_rows, const Eigen::VectorXd& responses,
                                    const Eigen::VectorXd& coefficients,
                                    const Eigen::LLT<Eigen::MatrixXd>& factor) {
    const auto n = basis_rows.rows();
    const Eigen::VectorXd residuals = responses - basis_rows * coefficients;
    // h_ii = ||L^{-1} psi_i||^2
    const Eigen::MatrixXd whitened = factor.matrixL().solve(basis_rows.transpose());
    const double mean = responses.mean();
    double numerator = 0.0;
    double denominator = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double h = whitened.col(i).squaredNorm();
        const double e = residuals[i] / (1.0 - h);
        numerator += e * e;
        const double dev = responses[i] - mean;
        denominator += dev * dev;
    }
    if (denominator == 0.0) {
        return numerator == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return numerator / denominator;
}

double loo_relative_error(const TrainingSample& sample, const BasisSpec& spec) {
    sample.validate(spec);
    const auto P = static_cast<Eigen::Index>(spec.size());
    if (sample.size() <= P) throw InsufficientData("leave-one-out error requires n > P");
    const RowMatrix rows = spec.evaluate_rows(spec.to_standard_rows(sample.points));
    const Eigen::MatrixXd A = information_matrix_from_rows(rows);
    const auto llt = factorize_information(A);
    const Eigen::VectorXd c = llt.solve(rows.transpose() * sample.responses);
    return loo_relative_error_from_rows(rows, sample.responses, c, llt);
}

}  // namespace sadoe
