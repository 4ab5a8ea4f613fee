#include "sadoe/stats.hpp"

#include "sadoe/error.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>

namespace sadoe {

double mean_error(const Eigen::VectorXd& estimated, const Eigen::VectorXd& reference) {
    if (estimated.size() != reference.size()) {
        throw InvalidArgument("index vectors differ in dimension");
    }
    return (estimated - reference).norm();
}

double sample_mean(std::span<const double> x) {
    if (x.empty()) throw InvalidArgument("mean of an empty sample");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

namespace {

double sample_variance(std::span<const double> x, double mean) {
    if (x.size() < 2) return 0.0;
    double s = 0.0;
    for (double v : x) s += (v - mean) * (v - mean);
    return s / static_cast<double>(x.size() - 1);
}

}  // namespace

double sample_std(std::span<const double> x) {
    return std::sqrt(sample_variance(x, sample_mean(x)));
}

WelchResult welch_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) {
        throw InvalidArgument("Welch's test needs at least two observations per sample");
    }
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double ma = sample_mean(a);
    const double mb = sample_mean(b);
    const double va = sample_variance(a, ma) / na;
    const double vb = sample_variance(b, mb) / nb;
    const double se2 = va + vb;
    if (!(se2 > 0.0)) throw DegenerateSamples("both samples have zero variance");

    WelchResult r;
    r.t = (ma - mb) / std::sqrt(se2);
    r.dof = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    const boost::math::students_t dist(r.dof);
    r.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t)));
    if (r.p > 1.0) r.p = 1.0;
    return r;
}

}  // namespace sadoe
