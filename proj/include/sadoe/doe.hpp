#pragma once

#include "sadoe/basis.hpp"
#include "sadoe/pce.hpp"
#include "sadoe/random.hpp"
#include "sadoe/sensitivity.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace sadoe {

enum class Strategy { adaptive_si, adaptive_dopt, random, lhs };

std::string_view to_string(Strategy strategy);
/// Throws InvalidArgument on unknown names.
Strategy parse_strategy(std::string_view name);

/// Black-box model: physical point -> response.
using Evaluator = std::function<double(std::span<const double>)>;

/// Finite candidate set Xi with cached standard-space images and basis rows.
class CandidateSet {
public:
    CandidateSet(RowMatrix points, const BasisSpec& spec);

    [[nodiscard]] Eigen::Index size() const noexcept { return points_.rows(); }
    [[nodiscard]] const RowMatrix& points() const noexcept { return points_; }
    [[nodiscard]] const RowMatrix& standard_points() const noexcept { return standard_points_; }
    [[nodiscard]] const RowMatrix& basis_rows() const noexcept { return basis_rows_; }
    [[nodiscard]] std::span<const double> point(Eigen::Index j) const { return row_span(points_, j); }

private:
    RowMatrix points_;
    RowMatrix standard_points_;
    RowMatrix basis_rows_;
};

inline constexpr std::size_t kDefaultGridCap = 1'000'000;

/// Full-factorial grid with `levels` equally spaced values across each
/// uniform marginal's support, last coordinate varying fastest. Throws
/// InvalidArgument when levels^d exceeds `cap` (use LHS candidates instead)
/// or a marginal is not uniform.
CandidateSet uniform_grid_candidates(const BasisSpec& spec, int levels,
                                     std::size_t cap = kDefaultGridCap);

/// Latin hypercube design: per dimension one point in each probability
/// stratum [j/n, (j+1)/n), strata permuted independently, mapped through
/// the marginal inverse CDF.
RowMatrix lhs_design(Eigen::Index n, const std::vector<Marginal>& marginals, Rng& rng);

CandidateSet lhs_candidates(const BasisSpec& spec, Eigen::Index size, Rng& rng);

/// (A + psi psi^T)^{-1} from A^{-1} (Sherman-Morrison).
Eigen::MatrixXd rank_one_inverse_update(const Eigen::MatrixXd& A_inv, const Eigen::VectorXd& psi);
void rank_one_inverse_update_in_place(Eigen::MatrixXd& A_inv, const Eigen::VectorXd& psi);

/// psi^T A^{-1} B^T (B A^{-1} B^T)^{-1} B A^{-1} psi / (1 + psi^T A^{-1} psi).
/// Maximizing it minimizes det(B (A + psi psi^T)^{-1} B^T). Throws
/// SingularCriterion when B A^{-1} B^T is (numerically) singular.
double si_selection_score(const Eigen::VectorXd& psi, const Eigen::MatrixXd& A_inv,
                          const IndexGradient& gradient);

/// psi^T A^{-1} psi; maximizing it maximizes det(A + psi psi^T).
double dopt_selection_score(const Eigen::VectorXd& psi, const Eigen::MatrixXd& A_inv);

/// Per-iteration part of the index criterion that does not depend on psi:
/// G = B A^{-1} and the Cholesky factor of M = G B^T.
class SiCriterion {
public:
    SiCriterion(const Eigen::MatrixXd& A_inv, const IndexGradient& gradient);

    /// Numerators w^T M^{-1} w, w = G psi, for every row of `basis_rows`.
    [[nodiscard]] Eigen::VectorXd numerators(const RowMatrix& basis_rows) const;
    [[nodiscard]] double numerator(const Eigen::VectorXd& psi) const;
    [[nodiscard]] const Eigen::MatrixXd& criterion_matrix() const noexcept { return M_; }

private:
    Eigen::MatrixXd G_;
    Eigen::MatrixXd M_;
    Eigen::LLT<Eigen::MatrixXd> factor_;
};

/// Evolving state of the sequential design (one run, one strategy).
struct DoeState {
    BasisSpec spec;
    RowMatrix design;          // physical points, with multiplicity
    RowMatrix design_rows;     // Psi(u_i) for each design point
    Eigen::VectorXd responses;
    Eigen::MatrixXd A;         // information matrix
    Eigen::MatrixXd A_inv;     // maintained by rank-one updates
    Eigen::VectorXd rhs;       // Psi_n Y
    PceModel model;
    IndexGradient gradient;
    int iteration = 0;
    std::vector<Eigen::Index> chosen;   // candidate index of every design point
    Eigen::VectorXd leverage;           // psi_j^T A^{-1} psi_j per candidate (lazy)
    int refactorizations = 0;
    int criterion_fallbacks = 0;

    [[nodiscard]] Eigen::Index size() const noexcept { return design.rows(); }
    /// max |A A_inv - I|
    [[nodiscard]] double inverse_drift() const;
    [[nodiscard]] double loo_error() const;
};

inline constexpr double kInitialDesignRcond = 1e-10;
inline constexpr int kInitialDesignRetries = 100;
inline constexpr double kInverseDriftTolerance = 1e-6;

/// Draws n0 candidates uniformly with replacement until rcond(A0) exceeds
/// 1e-10 (at most 100 draws), then evaluates f and fits the initial model.
/// Throws InvalidArgument if n0 < P and DegenerateCandidates when no draw
/// succeeds.
DoeState nondegenerate_initial_design(const CandidateSet& candidates, Eigen::Index n0,
                                      const BasisSpec& spec, const Evaluator& f, Rng& rng);

struct StepOptions {
    bool exclude_repeats = false;
};

struct StepResult {
    Eigen::Index candidate = -1;
    bool used_fallback = false;
};

/// One iteration of the sequential design for an iterative strategy
/// (adaptive_si, adaptive_dopt or random).
StepResult adaptive_step(DoeState& state, const CandidateSet& candidates, const Evaluator& f,
                         Strategy strategy, Rng& rng, const StepOptions& options = {});

struct SelectionRecord {
    int iteration = 0;
    Eigen::Index budget = 0;
    std::vector<double> point;   // empty for LHS (whole new design)
    Eigen::VectorXd indices;
    double mean_error = 0.0;
    double loo_error = 0.0;
    std::uint64_t model_evals = 0;
    bool fallback = false;
};

struct SelectionTrace {
    Strategy strategy = Strategy::random;
    std::uint64_t seed = 0;
    SelectionRecord initial;                 // state at budget n0
    std::vector<SelectionRecord> records;    // one per added budget step
    int criterion_fallbacks = 0;
    int refactorizations = 0;
};

/// Continues from an initialized state up to the final budget n. For LHS
/// every budget k in (n0, n] gets a fresh design of size k.
SelectionTrace run_from_state(Strategy strategy, DoeState state, const Evaluator& f,
                              const CandidateSet& candidates, Eigen::Index n,
                              const Eigen::VectorXd& reference, Rng& rng,
                              const StepOptions& options = {});

/// Initial design followed by run_from_state.
SelectionTrace run_strategy(Strategy strategy, const Evaluator& f, const BasisSpec& spec,
                            const CandidateSet& candidates, Eigen::Index n0, Eigen::Index n,
                            const Eigen::VectorXd& reference, Rng& rng,
                            const StepOptions& options = {});

}  // namespace sadoe
