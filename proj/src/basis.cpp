#include "sadoe/basis.hpp"

#include "sadoe/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace sadoe {

Marginal Marginal::uniform(double lower, double upper) {
    if (!(lower < upper) || !std::isfinite(lower) || !std::isfinite(upper)) {
        throw InvalidArgument("uniform marginal requires finite lower < upper");
    }
    return {Kind::uniform, lower, upper};
}

Marginal Marginal::normal(double mean, double std_dev) {
    if (!(std_dev > 0.0) || !std::isfinite(mean) || !std::isfinite(std_dev)) {
        throw InvalidArgument("normal marginal requires std-dev > 0");
    }
    return {Kind::normal, mean, std_dev};
}

bool Marginal::in_support(double x) const noexcept {
    if (kind_ == Kind::uniform) return x >= a_ && x <= b_;
    return std::isfinite(x);
}

double Marginal::to_standard(double x) const {
    if (!in_support(x)) {
        throw InvalidArgument("coordinate " + std::to_string(x) + " outside marginal support");
    }
    if (kind_ == Kind::uniform) return (2.0 * x - a_ - b_) / (b_ - a_);
    return (x - a_) / b_;
}

double Marginal::from_standard(double u) const noexcept {
    if (kind_ == Kind::uniform) return 0.5 * (a_ + b_) + 0.5 * (b_ - a_) * u;
    return a_ + b_ * u;
}

double Marginal::quantile(double prob) const {
    if (kind_ == Kind::uniform) {
        if (!(prob >= 0.0 && prob <= 1.0)) throw InvalidArgument("probability outside [0,1]");
        return a_ + (b_ - a_) * prob;
    }
    return a_ + b_ * normal_quantile(prob);
}

void orthonormal_poly_all(Family family, double u, std::span<double> out) {
    if (out.empty()) return;
    out[0] = 1.0;
    if (out.size() == 1) return;
    if (family == Family::legendre) {
        // Classical P_k via Bonnet, scaled by sqrt(2k+1) at the end.
        double pm1 = 1.0;
        double p = u;
        out[1] = std::sqrt(3.0) * u;
        for (std::size_t k = 1; k + 1 < out.size(); ++k) {
            const double kd = static_cast<double>(k);
            const double next = ((2.0 * kd + 1.0) * u * p - kd * pm1) / (kd + 1.0);
            pm1 = p;
            p = next;
            out[k + 1] = std::sqrt(2.0 * kd + 3.0) * p;
        }
    } else {
        // Normalized probabilists' Hermite: psi_{k+1} = (u psi_k - sqrt(k) psi_{k-1}) / sqrt(k+1)
        out[1] = u;
        for (std::size_t k = 1; k + 1 < out.size(); ++k) {
            const double kd = static_cast<double>(k);
            out[k + 1] = (u * out[k] - std::sqrt(kd) * out[k - 1]) / std::sqrt(kd + 1.0);
        }
    }
}

double orthonormal_poly(Family family, int degree, double u) {
    if (degree < 0) throw InvalidArgument("polynomial degree must be >= 0");
    std::vector<double> values(static_cast<std::size_t>(degree) + 1);
    orthonormal_poly_all(family, u, values);
    return values.back();
}

int MultiIndex::total_degree() const noexcept {
    int total = 0;
    for (int a : degrees) total += a;
    return total;
}

int MultiIndex::main_effect_variable() const noexcept {
    int found = -1;
    for (std::size_t i = 0; i < degrees.size(); ++i) {
        if (degrees[i] != 0) {
            if (found >= 0) return -1;
            found = static_cast<int>(i);
        }
    }
    return found;
}

namespace {

constexpr double kHyperbolicTolerance = 1e-9;

double qnorm_of(const std::vector<int>& alpha, double q) {
    double s = 0.0;
    for (int a : alpha) {
        if (a > 0) s += std::pow(static_cast<double>(a), q);
    }
    return std::pow(s, 1.0 / q);
}

// Every alpha with |alpha|_1 <= budget, filling positions pos..d-1.
void enumerate(std::vector<int>& alpha, std::size_t pos, int budget, double q, int p,
               std::vector<MultiIndex>& out) {
    if (pos == alpha.size()) {
        if (qnorm_of(alpha, q) <= p + kHyperbolicTolerance) out.push_back({alpha});
        return;
    }
    for (int a = 0; a <= budget; ++a) {
        alpha[pos] = a;
        enumerate(alpha, pos + 1, budget - a, q, p, out);
    }
    alpha[pos] = 0;
}

}  // namespace

TruncationSet TruncationSet::hyperbolic(int dimension, int max_degree, double qnorm) {
    if (dimension < 1) throw InvalidArgument("truncation dimension must be >= 1");
    if (max_degree < 1) throw InvalidArgument("truncation degree must be >= 1");
    if (!(qnorm > 0.0 && qnorm <= 1.0)) throw InvalidArgument("q-norm must lie in (0, 1]");

    TruncationSet set;
    set.dimension_ = dimension;
    set.max_degree_ = max_degree;
    set.qnorm_ = qnorm;

    // ||alpha||_q >= ||alpha||_1 for q <= 1, so the total-degree simplex
    // already contains every admissible index.
    std::vector<int> alpha(static_cast<std::size_t>(dimension), 0);
    enumerate(alpha, 0, max_degree, qnorm, max_degree, set.indices_);

    std::stable_sort(set.indices_.begin(), set.indices_.end(),
                     [](const MultiIndex& a, const MultiIndex& b) {
                         const int ta = a.total_degree();
                         const int tb = b.total_degree();
                         if (ta != tb) return ta < tb;
                         return a.degrees < b.degrees;
                     });
    set.main_effect_.reserve(set.indices_.size());
    for (const auto& idx : set.indices_) set.main_effect_.push_back(idx.main_effect_variable());
    return set;
}

BasisSpec::BasisSpec(std::vector<Marginal> marginals, TruncationSet truncation)
    : marginals_(std::move(marginals)), truncation_(std::move(truncation)) {
    if (static_cast<int>(marginals_.size()) != truncation_.dimension()) {
        throw InvalidArgument("marginal count does not match truncation dimension");
    }
}

void BasisSpec::evaluate_into(std::span<const double> u, std::span<double> out) const {
    const auto d = static_cast<std::size_t>(dimension());
    if (u.size() != d) throw InvalidArgument("point dimension mismatch");
    if (out.size() != size()) throw InvalidArgument("output size mismatch");

    const auto stride = static_cast<std::size_t>(truncation_.max_degree()) + 1;
    // Small fixed tables keep the hot path allocation-free for typical d, p.
    thread_local std::vector<double> table;
    table.resize(d * stride);
    for (std::size_t i = 0; i < d; ++i) {
        orthonormal_poly_all(marginals_[i].family(), u[i],
                             std::span<double>(table.data() + i * stride, stride));
    }
    const auto& indices = truncation_.indices();
    for (std::size_t j = 0; j < indices.size(); ++j) {
        double value = 1.0;
        const auto& deg = indices[j].degrees;
        for (std::size_t i = 0; i < d; ++i) {
            if (deg[i] != 0) value *= table[i * stride + static_cast<std::size_t>(deg[i])];
        }
        out[j] = value;
    }
}

Eigen::VectorXd BasisSpec::evaluate(std::span<const double> u) const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(size()));
    evaluate_into(u, {out.data(), size()});
    return out;
}

RowMatrix BasisSpec::evaluate_rows(const RowMatrix& standard_points) const {
    RowMatrix rows(standard_points.rows(), static_cast<Eigen::Index>(size()));
    for (Eigen::Index i = 0; i < standard_points.rows(); ++i) {
        evaluate_into(row_span(standard_points, i), {rows.data() + i * rows.cols(), size()});
    }
    return rows;
}

Eigen::VectorXd BasisSpec::to_standard(std::span<const double> x) const {
    if (x.size() != marginals_.size()) throw InvalidArgument("point dimension mismatch");
    Eigen::VectorXd u(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) u[static_cast<Eigen::Index>(i)] = marginals_[i].to_standard(x[i]);
    return u;
}

Eigen::VectorXd BasisSpec::from_standard(std::span<const double> u) const {
    if (u.size() != marginals_.size()) throw InvalidArgument("point dimension mismatch");
    Eigen::VectorXd x(static_cast<Eigen::Index>(u.size()));
    for (std::size_t i = 0; i < u.size(); ++i) x[static_cast<Eigen::Index>(i)] = marginals_[i].from_standard(u[i]);
    return x;
}

RowMatrix BasisSpec::to_standard_rows(const RowMatrix& points) const {
    if (points.cols() != dimension()) throw InvalidArgument("point dimension mismatch");
    RowMatrix out(points.rows(), points.cols());
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        for (Eigen::Index k = 0; k < points.cols(); ++k) {
            out(i, k) = marginals_[static_cast<std::size_t>(k)].to_standard(points(i, k));
        }
    }
    return out;
}

RowMatrix BasisSpec::from_standard_rows(const RowMatrix& standard_points) const {
    if (standard_points.cols() != dimension()) throw InvalidArgument("point dimension mismatch");
    RowMatrix out(standard_points.rows(), standard_points.cols());
    for (Eigen::Index i = 0; i < standard_points.rows(); ++i) {
        for (Eigen::Index k = 0; k < standard_points.cols(); ++k) {
            out(i, k) = marginals_[static_cast<std::size_t>(k)].from_standard(standard_points(i, k));
        }
    }
    return out;
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_quantile(double prob) {
    if (!(prob > 0.0 && prob < 1.0)) {
        throw InvalidArgument("normal_quantile requires a probability in (0, 1)");
    }
    // Work in the lower half so the Newton residual is computed without
    // cancellation; 1 - prob is exact for prob >= 0.5.
    if (prob > 0.5) return -normal_quantile(1.0 - prob);

    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (prob < p_low) {
        const double q = std::sqrt(-2.0 * std::log(prob));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else {
        const double q = prob - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    const double density = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    x -= (normal_cdf(x) - prob) / density;
    return x;
}

}  // namespace sadoe
