#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace sadoe {

/// Row-major so each point (row) is a contiguous span.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Family { legendre, hermite };

/// Independent input marginal. Polynomial evaluation always happens in the
/// standard space of the matching family: uniform[a,b] maps affinely onto
/// [-1,1] (Legendre) and normal(mu,sigma) onto N(0,1) (Hermite).
class Marginal {
public:
    enum class Kind { uniform, normal };

    static Marginal uniform(double lower, double upper);
    static Marginal normal(double mean, double std_dev);

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] Family family() const noexcept {
        return kind_ == Kind::uniform ? Family::legendre : Family::hermite;
    }
    // lower/upper for uniform, mean/std-dev for normal.
    [[nodiscard]] double first() const noexcept { return a_; }
    [[nodiscard]] double second() const noexcept { return b_; }

    [[nodiscard]] bool in_support(double x) const noexcept;
    [[nodiscard]] double to_standard(double x) const;
    [[nodiscard]] double from_standard(double u) const noexcept;
    /// Inverse CDF of the physical marginal.
    [[nodiscard]] double quantile(double prob) const;

private:
    Marginal(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

    Kind kind_;
    double a_;
    double b_;
};

/// Orthonormal polynomial of degree k under the family's standard measure.
double orthonormal_poly(Family family, int degree, double u);

/// Writes psi_0(u) .. psi_{out.size()-1}(u) using the three-term recurrence.
void orthonormal_poly_all(Family family, double u, std::span<double> out);

struct MultiIndex {
    std::vector<int> degrees;

    [[nodiscard]] int total_degree() const noexcept;
    [[nodiscard]] std::size_t dimension() const noexcept { return degrees.size(); }
    /// Position of the single nonzero entry, or -1 when the index is constant
    /// or involves more than one variable.
    [[nodiscard]] int main_effect_variable() const noexcept;

    friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

/// Hyperbolic truncation set {alpha : ||alpha||_q <= p}, ordered by ascending
/// total degree with lexicographic tie-break. Entry 0 is the zero index.
class TruncationSet {
public:
    static TruncationSet hyperbolic(int dimension, int max_degree, double qnorm);

    [[nodiscard]] std::size_t size() const noexcept { return indices_.size(); }
    [[nodiscard]] int dimension() const noexcept { return dimension_; }
    [[nodiscard]] int max_degree() const noexcept { return max_degree_; }
    [[nodiscard]] double qnorm() const noexcept { return qnorm_; }
    [[nodiscard]] const std::vector<MultiIndex>& indices() const noexcept { return indices_; }
    [[nodiscard]] const MultiIndex& operator[](std::size_t j) const { return indices_[j]; }
    /// Cached MultiIndex::main_effect_variable() per position.
    [[nodiscard]] int main_effect_variable(std::size_t j) const { return main_effect_[j]; }

private:
    TruncationSet() = default;

    int dimension_ = 0;
    int max_degree_ = 0;
    double qnorm_ = 1.0;
    std::vector<MultiIndex> indices_;
    std::vector<int> main_effect_;
};

/// Marginals plus truncation set; evaluates the tensor-product basis.
class BasisSpec {
public:
    BasisSpec(std::vector<Marginal> marginals, TruncationSet truncation);

    [[nodiscard]] int dimension() const noexcept { return truncation_.dimension(); }
    [[nodiscard]] std::size_t size() const noexcept { return truncation_.size(); }
    [[nodiscard]] const std::vector<Marginal>& marginals() const noexcept { return marginals_; }
    [[nodiscard]] const TruncationSet& truncation() const noexcept { return truncation_; }
    [[nodiscard]] Family family(int i) const { return marginals_[i].family(); }

    /// Psi(u) for a standard-space point, in truncation-set order.
    [[nodiscard]] Eigen::VectorXd evaluate(std::span<const double> u) const;
    void evaluate_into(std::span<const double> u, std::span<double> out) const;

    /// Rows Psi(u_i) for every row of a standard-space matrix (n x d).
    [[nodiscard]] RowMatrix evaluate_rows(const RowMatrix& standard_points) const;

    [[nodiscard]] Eigen::VectorXd to_standard(std::span<const double> x) const;
    [[nodiscard]] Eigen::VectorXd from_standard(std::span<const double> u) const;
    [[nodiscard]] RowMatrix to_standard_rows(const RowMatrix& points) const;
    [[nodiscard]] RowMatrix from_standard_rows(const RowMatrix& standard_points) const;

private:
    std::vector<Marginal> marginals_;
    TruncationSet truncation_;
};

inline std::span<const double> as_span(const Eigen::VectorXd& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

inline std::span<const double> row_span(const RowMatrix& m, Eigen::Index i) {
    return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

/// Standard normal CDF.
double normal_cdf(double x);

/// Inverse standard normal CDF: Acklam's rational approximation followed by
/// one Newton step against normal_cdf. Throws InvalidArgument outside (0,1).
double normal_quantile(double prob);

}  // namespace sadoe
