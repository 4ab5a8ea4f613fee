#pragma once

#include <Eigen/Dense>

#include <span>

namespace sadoe {

/// Euclidean distance between estimated and reference index vectors.
double mean_error(const Eigen::VectorXd& estimated, const Eigen::VectorXd& reference);

struct WelchResult {
    double t = 0.0;
    double dof = 0.0;
    double p = 1.0;
};

/// Two-sided Welch t-test for unequal variances. Requires at least two
/// observations per sample; throws DegenerateSamples when both sample
/// variances are zero.
WelchResult welch_t_test(std::span<const double> a, std::span<const double> b);

double sample_mean(std::span<const double> x);
/// Unbiased (n - 1) standard deviation; 0 for a single observation.
double sample_std(std::span<const double> x);

}  // namespace sadoe
