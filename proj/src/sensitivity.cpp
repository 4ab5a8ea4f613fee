#include "sadoe/sensitivity.hpp"

#include "sadoe/error.hpp"

namespace sadoe {

namespace {

constexpr double kDegenerateVariance = 1e-300;

struct VarianceSplit {
    Eigen::VectorXd partial;  // sum over L_i of c^2
    double total = 0.0;       // sum over L* of c^2
};

VarianceSplit split_variance(const Eigen::VectorXd& c, const TruncationSet& truncation) {
    if (static_cast<std::size_t>(c.size()) != truncation.size()) {
        throw InvalidArgument("coefficient count does not match the truncation set");
    }
    VarianceSplit split{Eigen::VectorXd::Zero(truncation.dimension()), 0.0};
    for (std::size_t j = 1; j < truncation.size(); ++j) {
        const double c2 = c[static_cast<Eigen::Index>(j)] * c[static_cast<Eigen::Index>(j)];
        split.total += c2;
        const int i = truncation.main_effect_variable(j);
        if (i >= 0) split.partial[i] += c2;
    }
    if (!(split.total >= kDegenerateVariance)) {
        throw DegenerateModel("all non-constant coefficients vanish; indices are undefined");
    }
    return split;
}

}  // namespace

Eigen::VectorXd first_order_indices(const Eigen::VectorXd& coefficients,
                                    const TruncationSet& truncation) {
    const auto split = split_variance(coefficients, truncation);
    return split.partial / split.total;
}

IndexGradient index_gradient_matrix(const Eigen::VectorXd& coefficients,
                                    const TruncationSet& truncation) {
    const auto split = split_variance(coefficients, truncation);
    const Eigen::VectorXd S = split.partial / split.total;
    const auto d = static_cast<Eigen::Index>(truncation.dimension());
    const auto P = static_cast<Eigen::Index>(truncation.size());

    IndexGradient gradient{Eigen::MatrixXd::Zero(d, P)};
    for (Eigen::Index j = 1; j < P; ++j) {
        const double scale = -2.0 * coefficients[j] / split.total;
        const int owner = truncation.main_effect_variable(static_cast<std::size_t>(j));
        for (Eigen::Index i = 0; i < d; ++i) {
            gradient.matrix(i, j) = scale * (i == owner ? S[i] - 1.0 : S[i]);
        }
    }
    return gradient;
}

Eigen::MatrixXd asymptotic_covariance(const IndexGradient& gradient, const Eigen::MatrixXd& A,
                                      double noise_variance) {
    if (gradient.matrix.cols() != A.rows() || A.rows() != A.cols()) {
        throw InvalidArgument("gradient and information matrix shapes disagree");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) {
        throw SingularDesign("information matrix is not positive definite");
    }
    // B A^{-1} B^T = W^T W with W = L^{-1} B^T.
    const Eigen::MatrixXd W = llt.matrixL().solve(gradient.matrix.transpose());
    Eigen::MatrixXd C = noise_variance * (W.transpose() * W);
    return 0.5 * (C + C.transpose());
}

SobolEstimate estimate_indices(const PceModel& model, const Eigen::MatrixXd& A) {
    const auto& truncation = model.spec().truncation();
    const auto& c = model.coefficients();
    SobolEstimate estimate;
    estimate.indices = first_order_indices(c, truncation);
    estimate.total_variance = c.tail(c.size() - 1).squaredNorm();
    estimate.covariance =
        asymptotic_covariance(index_gradient_matrix(c, truncation), A, model.noise_variance());
    return estimate;
}

}  // namespace sadoe
