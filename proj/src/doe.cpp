#include "sadoe/doe.hpp"

#include "sadoe/error.hpp"
#include "sadoe/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace sadoe {

std::string_view to_string(Strategy strategy) {
    switch (strategy) {
        case Strategy::adaptive_si: return "adaptive_si";
        case Strategy::adaptive_dopt: return "adaptive_dopt";
        case Strategy::random: return "random";
        case Strategy::lhs: return "lhs";
    }
    return "unknown";
}

Strategy parse_strategy(std::string_view name) {
    for (auto s : {Strategy::adaptive_si, Strategy::adaptive_dopt, Strategy::random, Strategy::lhs}) {
        if (to_string(s) == name) return s;
    }
    throw InvalidArgument("unknown strategy '" + std::string(name) + "'");
}

CandidateSet::CandidateSet(RowMatrix points, const BasisSpec& spec)
    : points_(std::move(points)),
      standard_points_(spec.to_standard_rows(points_)),
      basis_rows_(spec.evaluate_rows(standard_points_)) {
    if (points_.rows() < 1) throw InvalidArgument("candidate set is empty");
}

CandidateSet uniform_grid_candidates(const BasisSpec& spec, int levels, std::size_t cap) {
    if (levels < 2) throw InvalidArgument("grid needs at least 2 levels per dimension");
    const int d = spec.dimension();
    double total = 1.0;
    for (int i = 0; i < d; ++i) total *= levels;
    if (total > static_cast<double>(cap)) {
        throw InvalidArgument("grid of " + std::to_string(levels) + "^" + std::to_string(d) +
                              " points exceeds the cap of " + std::to_string(cap) +
                              "; use LHS candidates instead");
    }
    for (const auto& m : spec.marginals()) {
        if (m.kind() != Marginal::Kind::uniform) {
            throw InvalidArgument("grid candidates require uniform marginals; use LHS candidates");
        }
    }
    const auto m = static_cast<Eigen::Index>(total);
    RowMatrix points(m, d);
    std::vector<int> digit(static_cast<std::size_t>(d), 0);
    for (Eigen::Index row = 0; row < m; ++row) {
        for (int i = 0; i < d; ++i) {
            const auto& marg = spec.marginals()[static_cast<std::size_t>(i)];
            const double lo = marg.first();
            const double hi = marg.second();
            const int k = digit[static_cast<std::size_t>(i)];
            // Exact endpoints at both ends of every axis.
            points(row, i) = k == levels - 1 ? hi : lo + (hi - lo) * k / (levels - 1);
        }
        for (int i = d - 1; i >= 0; --i) {
            if (++digit[static_cast<std::size_t>(i)] < levels) break;
            digit[static_cast<std::size_t>(i)] = 0;
        }
    }
    return {std::move(points), spec};
}

RowMatrix lhs_design(Eigen::Index n, const std::vector<Marginal>& marginals, Rng& rng) {
    if (n < 1) throw InvalidArgument("LHS design size must be >= 1");
    const auto d = static_cast<Eigen::Index>(marginals.size());
    RowMatrix points(n, d);
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < d; ++k) {
        std::iota(perm.begin(), perm.end(), Eigen::Index{0});
        for (std::size_t i = perm.size() - 1; i > 0; --i) {
            std::swap(perm[i], perm[rng.uniform_index(i + 1)]);
        }
        const auto& marg = marginals[static_cast<std::size_t>(k)];
        for (Eigen::Index i = 0; i < n; ++i) {
            const double prob =
                (static_cast<double>(perm[static_cast<std::size_t>(i)]) + rng.uniform_open()) /
                static_cast<double>(n);
            points(i, k) = marg.quantile(prob);
        }
    }
    return points;
}

CandidateSet lhs_candidates(const BasisSpec& spec, Eigen::Index size, Rng& rng) {
    return {lhs_design(size, spec.marginals(), rng), spec};
}

void rank_one_inverse_update_in_place(Eigen::MatrixXd& A_inv, const Eigen::VectorXd& psi) {
    const Eigen::VectorXd u = A_inv * psi;
    const double denom = 1.0 + psi.dot(u);
    A_inv.noalias() -= (u / denom) * u.transpose();
}

Eigen::MatrixXd rank_one_inverse_update(const Eigen::MatrixXd& A_inv, const Eigen::VectorXd& psi) {
    Eigen::MatrixXd out = A_inv;
    rank_one_inverse_update_in_place(out, psi);
    return out;
}

SiCriterion::SiCriterion(const Eigen::MatrixXd& A_inv, const IndexGradient& gradient)
    : G_(gradient.matrix * A_inv), M_(G_ * gradient.matrix.transpose()) {
    M_ = 0.5 * (M_ + M_.transpose()).eval();
    factor_.compute(M_);
    if (factor_.info() != Eigen::Success || !(factor_.rcond() >= kSingularRcond)) {
        throw SingularCriterion("B A^-1 B^T is singular; index estimates are degenerate");
    }
}

Eigen::VectorXd SiCriterion::numerators(const RowMatrix& basis_rows) const {
    // Row j of W is (G psi_j)^T; w^T M^-1 w = ||L^-1 w||^2.
    const Eigen::MatrixXd W = G_ * basis_rows.transpose();
    const Eigen::MatrixXd Z = factor_.matrixL().solve(W);
    return Z.colwise().squaredNorm().transpose();
}

double SiCriterion::numerator(const Eigen::VectorXd& psi) const {
    const Eigen::VectorXd w = G_ * psi;
    return w.dot(factor_.solve(w));
}

double si_selection_score(const Eigen::VectorXd& psi, const Eigen::MatrixXd& A_inv,
                          const IndexGradient& gradient) {
    const SiCriterion criterion(A_inv, gradient);
    return criterion.numerator(psi) / (1.0 + dopt_selection_score(psi, A_inv));
}

double dopt_selection_score(const Eigen::VectorXd& psi, const Eigen::MatrixXd& A_inv) {
    return psi.dot(A_inv * psi);
}

double DoeState::inverse_drift() const {
    const Eigen::MatrixXd product = A * A_inv;
    return (product - Eigen::MatrixXd::Identity(A.rows(), A.cols())).cwiseAbs().maxCoeff();
}

double DoeState::loo_error() const {
    if (design_rows.rows() <= design_rows.cols()) return std::numeric_limits<double>::quiet_NaN();
    const auto llt = factorize_information(A);
    return loo_relative_error_from_rows(design_rows, responses, model.coefficients(), llt);
}

namespace {

Eigen::MatrixXd inverse_from(const Eigen::MatrixXd& A) {
    const auto llt = factorize_information(A);
    return llt.solve(Eigen::MatrixXd::Identity(A.rows(), A.cols()));
}

void refresh_leverage(DoeState& state, const CandidateSet& candidates) {
    const RowMatrix projected = candidates.basis_rows() * state.A_inv;
    state.leverage = projected.cwiseProduct(candidates.basis_rows()).rowwise().sum();
}

Eigen::Index argmax_lowest(const Eigen::VectorXd& scores, const std::vector<bool>& excluded) {
    Eigen::Index best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < scores.size(); ++j) {
        if (!excluded.empty() && excluded[static_cast<std::size_t>(j)]) continue;
        if (best < 0 || scores[j] > best_score) {
            best = j;
            best_score = scores[j];
        }
    }
    return best;
}

std::vector<bool> exclusion_mask(const DoeState& state, Eigen::Index m, bool enabled) {
    if (!enabled) return {};
    std::vector<bool> mask(static_cast<std::size_t>(m), false);
    for (auto j : state.chosen) mask[static_cast<std::size_t>(j)] = true;
    return mask;
}

}  // namespace

DoeState nondegenerate_initial_design(const CandidateSet& candidates, Eigen::Index n0,
                                      const BasisSpec& spec, const Evaluator& f, Rng& rng) {
    const auto P = static_cast<Eigen::Index>(spec.size());
    if (n0 < P) {
        throw InvalidArgument("initial design size " + std::to_string(n0) +
                              " is below the basis size " + std::to_string(P));
    }
    if (candidates.basis_rows().cols() != P) {
        throw InvalidArgument("candidate set was built for a different basis");
    }
    const auto m = static_cast<std::size_t>(candidates.size());
    std::vector<Eigen::Index> picks(static_cast<std::size_t>(n0));
    RowMatrix rows(n0, P);
    for (int attempt = 0; attempt < kInitialDesignRetries; ++attempt) {
        for (Eigen::Index i = 0; i < n0; ++i) {
            const auto j = static_cast<Eigen::Index>(rng.uniform_index(m));
            picks[static_cast<std::size_t>(i)] = j;
            rows.row(i) = candidates.basis_rows().row(j);
        }
        Eigen::MatrixXd A = information_matrix_from_rows(rows);
        Eigen::LLT<Eigen::MatrixXd> llt(A);
        if (llt.info() != Eigen::Success || !(llt.rcond() > kInitialDesignRcond)) continue;

        RowMatrix design(n0, spec.dimension());
        Eigen::VectorXd y(n0);
        for (Eigen::Index i = 0; i < n0; ++i) {
            const auto j = picks[static_cast<std::size_t>(i)];
            design.row(i) = candidates.points().row(j);
            y[i] = f(candidates.point(j));
        }
        Eigen::VectorXd rhs = rows.transpose() * y;
        PceModel model = fit_from_normal_equations(spec, rows, y, A, rhs);
        IndexGradient gradient = index_gradient_matrix(model.coefficients(), spec.truncation());
        Eigen::MatrixXd A_inv = llt.solve(Eigen::MatrixXd::Identity(P, P));
        return DoeState{spec,
                        std::move(design),
                        std::move(rows),
                        std::move(y),
                        std::move(A),
                        std::move(A_inv),
                        std::move(rhs),
                        std::move(model),
                        std::move(gradient),
                        0,
                        std::move(picks),
                        Eigen::VectorXd(),
                        0,
                        0};
    }
    throw DegenerateCandidates("no non-degenerate initial design of size " + std::to_string(n0) +
                               " found in " + std::to_string(kInitialDesignRetries) +
                               " draws; the candidate set cannot support the basis");
}

StepResult adaptive_step(DoeState& state, const CandidateSet& candidates, const Evaluator& f,
                         Strategy strategy, Rng& rng, const StepOptions& options) {
    const Eigen::Index m = candidates.size();
    const auto P = static_cast<Eigen::Index>(state.spec.size());
    if (candidates.basis_rows().cols() != P) {
        throw InvalidArgument("candidate set was built for a different basis");
    }
    const auto excluded = exclusion_mask(state, m, options.exclude_repeats);
    const bool scored = strategy == Strategy::adaptive_si || strategy == Strategy::adaptive_dopt;

    StepResult result;
    if (scored) {
        if (state.leverage.size() != m) refresh_leverage(state, candidates);
        Eigen::VectorXd scores;
        if (strategy == Strategy::adaptive_si) {
            try {
                const SiCriterion criterion(state.A_inv, state.gradient);
                scores = criterion.numerators(candidates.basis_rows()).array() /
                         (1.0 + state.leverage.array());
            } catch (const SingularCriterion&) {
                result.used_fallback = true;
                ++state.criterion_fallbacks;
            }
        }
        if (scores.size() == 0) scores = state.leverage;
        result.candidate = argmax_lowest(scores, excluded);
    } else if (strategy == Strategy::random) {
        if (excluded.empty()) {
            result.candidate = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::size_t>(m)));
        } else {
            std::vector<Eigen::Index> free;
            for (Eigen::Index j = 0; j < m; ++j) {
                if (!excluded[static_cast<std::size_t>(j)]) free.push_back(j);
            }
            if (!free.empty()) result.candidate = free[rng.uniform_index(free.size())];
        }
    } else {
        throw InvalidArgument("adaptive_step does not handle the LHS strategy");
    }
    if (result.candidate < 0) {
        throw DegenerateCandidates("every candidate has already been selected");
    }

    const Eigen::Index j = result.candidate;
    const Eigen::VectorXd psi = candidates.basis_rows().row(j).transpose();
    const double y = f(candidates.point(j));

    const Eigen::VectorXd u = state.A_inv * psi;
    const double denom = 1.0 + psi.dot(u);
    if (state.leverage.size() == m) {
        const Eigen::VectorXd cross = candidates.basis_rows() * u;
        state.leverage.array() -= cross.array().square() / denom;
    }
    state.A_inv.noalias() -= (u / denom) * u.transpose();
    state.A.noalias() += psi * psi.transpose();
    state.rhs.noalias() += y * psi;

    const Eigen::Index n = state.design.rows();
    state.design.conservativeResize(n + 1, Eigen::NoChange);
    state.design.row(n) = candidates.points().row(j);
    state.design_rows.conservativeResize(n + 1, Eigen::NoChange);
    state.design_rows.row(n) = psi.transpose();
    state.responses.conservativeResize(n + 1);
    state.responses[n] = y;
    state.chosen.push_back(j);

    if (state.inverse_drift() > kInverseDriftTolerance) {
        state.A_inv = inverse_from(state.A);
        ++state.refactorizations;
        if (state.leverage.size() == m) refresh_leverage(state, candidates);
    }

    state.model = fit_from_normal_equations(state.spec, state.design_rows, state.responses, state.A,
                                            state.rhs);
    state.gradient = index_gradient_matrix(state.model.coefficients(), state.spec.truncation());
    ++state.iteration;
    return result;
}

namespace {

SelectionRecord record_state(const DoeState& state, const Eigen::VectorXd& reference,
                             std::uint64_t evals) {
    SelectionRecord r;
    r.iteration = state.iteration;
    r.budget = state.size();
    r.indices = first_order_indices(state.model.coefficients(), state.spec.truncation());
    r.mean_error = reference.size() == r.indices.size()
                       ? mean_error(r.indices, reference)
                       : std::numeric_limits<double>::quiet_NaN();
    r.loo_error = state.loo_error();
    r.model_evals = evals;
    return r;
}

std::string with_context(Strategy strategy, int iteration, const std::string& what) {
    return std::string(to_string(strategy)) + " iteration " + std::to_string(iteration) + ": " +
           what;
}

template <class E>
[[noreturn]] void rethrow_with_context(const E& e, Strategy strategy, int iteration) {
    throw E(with_context(strategy, iteration, e.what()));
}

SelectionRecord lhs_record(const BasisSpec& spec, Eigen::Index k, const Evaluator& f,
                           const Eigen::VectorXd& reference, Rng& rng, int iteration,
                           std::uint64_t evals) {
    TrainingSample sample{lhs_design(k, spec.marginals(), rng), Eigen::VectorXd(k)};
    for (Eigen::Index i = 0; i < k; ++i) sample.responses[i] = f(row_span(sample.points, i));
    const RowMatrix rows = spec.evaluate_rows(spec.to_standard_rows(sample.points));
    const Eigen::MatrixXd A = information_matrix_from_rows(rows);
    const Eigen::VectorXd rhs = rows.transpose() * sample.responses;
    const PceModel model = fit_from_normal_equations(spec, rows, sample.responses, A, rhs);

    SelectionRecord r;
    r.iteration = iteration;
    r.budget = k;
    r.indices = first_order_indices(model.coefficients(), spec.truncation());
    r.mean_error = reference.size() == r.indices.size()
                       ? mean_error(r.indices, reference)
                       : std::numeric_limits<double>::quiet_NaN();
    r.loo_error = k > static_cast<Eigen::Index>(spec.size())
                      ? loo_relative_error_from_rows(rows, sample.responses, model.coefficients(),
                                                     factorize_information(A))
                      : std::numeric_limits<double>::quiet_NaN();
    r.model_evals = evals;
    return r;
}

}  // namespace

SelectionTrace run_from_state(Strategy strategy, DoeState state, const Evaluator& f,
                              const CandidateSet& candidates, Eigen::Index n,
                              const Eigen::VectorXd& reference, Rng& rng,
                              const StepOptions& options) {
    const Eigen::Index n0 = state.size();
    if (n <= n0) throw InvalidArgument("final budget must exceed the initial design size");

    SelectionTrace trace;
    trace.strategy = strategy;
    auto evals = static_cast<std::uint64_t>(n0);
    trace.initial = record_state(state, reference, evals);
    trace.records.reserve(static_cast<std::size_t>(n - n0));

    for (int it = 1; it <= static_cast<int>(n - n0); ++it) {
        try {
            if (strategy == Strategy::lhs) {
                const Eigen::Index k = n0 + it;
                evals += static_cast<std::uint64_t>(k);
                trace.records.push_back(lhs_record(state.spec, k, f, reference, rng, it, evals));
            } else {
                const auto step = adaptive_step(state, candidates, f, strategy, rng, options);
                ++evals;
                auto rec = record_state(state, reference, evals);
                rec.point.assign(candidates.point(step.candidate).begin(),
                                 candidates.point(step.candidate).end());
                rec.fallback = step.used_fallback;
                trace.records.push_back(std::move(rec));
            }
        } catch (const InsufficientData& e) {
            rethrow_with_context(e, strategy, it);
        } catch (const SingularDesign& e) {
            rethrow_with_context(e, strategy, it);
        } catch (const DegenerateModel& e) {
            rethrow_with_context(e, strategy, it);
        } catch (const DegenerateCandidates& e) {
            rethrow_with_context(e, strategy, it);
        }
    }
    trace.criterion_fallbacks = state.criterion_fallbacks;
    trace.refactorizations = state.refactorizations;
    return trace;
}

SelectionTrace run_strategy(Strategy strategy, const Evaluator& f, const BasisSpec& spec,
                            const CandidateSet& candidates, Eigen::Index n0, Eigen::Index n,
                            const Eigen::VectorXd& reference, Rng& rng,
                            const StepOptions& options) {
    if (!(n > n0)) throw InvalidArgument("final budget must exceed the initial design size");
    DoeState state = nondegenerate_initial_design(candidates, n0, spec, f, rng);
    return run_from_state(strategy, std::move(state), f, candidates, n, reference, rng, options);
}

}  // namespace sadoe
