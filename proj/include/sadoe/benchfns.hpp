#pragma once

#include "sadoe/basis.hpp"
#include "sadoe/random.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sadoe {

// Closed-form analytic models. Each throws InvalidArgument when a coordinate
// lies outside its published range.
double sobol_g(std::span<const double> x, std::span<const double> c);
double ishigami(std::span<const double> x, double a = 7.0, double b = 0.1);
/// x = (M, D, L, tau); cross-section s = 1.5, t = 40.
double environmental(std::span<const double> x);
/// x = (r_w, T_u, r, H_u, T_l, H_l, L, K_w).
double borehole(std::span<const double> x);
/// x = (S_w, W_fw, A, Lambda[deg], q, lambda, t_c, N_z, W_dg, W_p).
double wing_weight(std::span<const double> x);

inline constexpr double kSobolGCoefficients[] = {0.0, 1.0, 1.5};

struct BenchmarkModel {
    std::string name;
    std::vector<Marginal> marginals;
    std::function<double(std::span<const double>)> clean;
    double noise_std = 0.0;

    [[nodiscard]] int dimension() const noexcept { return static_cast<int>(marginals.size()); }
    /// Noise-free response.
    [[nodiscard]] double evaluate(std::span<const double> x) const { return clean(x); }
    /// f(x) + noise_std * z with z drawn from `rng`; no draw when noise_std == 0.
    [[nodiscard]] double sample(std::span<const double> x, Rng& rng) const;
};

/// Registered names: sobol_g, ishigami, environmental, borehole, wing_weight.
const std::vector<std::string>& benchmark_names();
/// Throws UnknownModel.
BenchmarkModel make_benchmark(std::string_view name);

/// Copy of `model` with additive Gaussian noise of the given std-dev.
BenchmarkModel with_noise(BenchmarkModel model, double noise_std);

struct ReferenceIndices {
    enum class Provenance { closed_form, pick_freeze };

    Eigen::VectorXd values;
    Provenance provenance = Provenance::closed_form;
    std::uint64_t oracle_sample_size = 0;
    std::uint64_t oracle_seed = 0;
};

/// Closed-form first-order indices of the g-function.
Eigen::VectorXd sobol_g_indices(std::span<const double> c);
/// Closed-form first-order indices of the Ishigami function.
Eigen::VectorXd ishigami_indices(double a = 7.0, double b = 0.1);

inline constexpr std::uint64_t kReferenceOracleSamples = 1'000'000;
inline constexpr std::uint64_t kReferenceOracleSeed = 20170201;

/// Closed form for sobol_g and ishigami; pick-freeze with N = 10^6 and a
/// fixed seed otherwise. Throws UnknownModel.
ReferenceIndices reference_indices(const BenchmarkModel& model);

/// First-order pick-freeze estimator with two independent input matrices
/// sharing column i; results clamped to [0, 1]. Requires N >= 1000.
Eigen::VectorXd pick_freeze_oracle(const std::function<double(std::span<const double>)>& f,
                                   const std::vector<Marginal>& marginals, std::uint64_t samples,
                                   Rng& rng);

}  // namespace sadoe
