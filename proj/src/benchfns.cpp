#include "sadoe/benchfns.hpp"

#include "sadoe/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace sadoe {

namespace {

using std::numbers::pi;

void check_range(std::span<const double> x, std::size_t index, double lo, double hi,
                 const char* model) {
    if (!(x[index] >= lo && x[index] <= hi)) {
        throw InvalidArgument(std::string(model) + ": input " + std::to_string(index) + " = " +
                              std::to_string(x[index]) + " outside [" + std::to_string(lo) +
                              ", " + std::to_string(hi) + "]");
    }
}

void check_dimension(std::span<const double> x, std::size_t d, const char* model) {
    if (x.size() != d) {
        throw InvalidArgument(std::string(model) + " expects " + std::to_string(d) + " inputs");
    }
}

struct Range {
    double lo;
    double hi;
};

constexpr Range kEnvironmentalRanges[] = {{7.0, 13.0}, {0.02, 0.12}, {0.01, 3.0}, {30.01, 30.295}};

constexpr Range kBoreholeRanges[] = {{0.05, 0.15},   {63070.0, 115600.0}, {100.0, 50000.0},
                                     {990.0, 1110.0}, {63.1, 116.0},       {700.0, 820.0},
                                     {1120.0, 1680.0}, {9855.0, 12045.0}};

constexpr Range kWingWeightRanges[] = {{150.0, 200.0}, {220.0, 300.0}, {6.0, 10.0},
                                       {-10.0, 10.0},  {16.0, 45.0},   {0.5, 1.0},
                                       {0.08, 0.18},   {2.5, 6.0},     {1700.0, 2500.0},
                                       {0.025, 0.08}};

template <std::size_t N>
void check_ranges(std::span<const double> x, const Range (&ranges)[N], const char* model) {
    check_dimension(x, N, model);
    for (std::size_t i = 0; i < N; ++i) check_range(x, i, ranges[i].lo, ranges[i].hi, model);
}

template <std::size_t N>
std::vector<Marginal> uniform_marginals(const Range (&ranges)[N]) {
    std::vector<Marginal> out;
    out.reserve(N);
    for (const auto& r : ranges) out.push_back(Marginal::uniform(r.lo, r.hi));
    return out;
}

}  // namespace

double sobol_g(std::span<const double> x, std::span<const double> c) {
    if (x.size() != c.size()) throw InvalidArgument("sobol_g: x and c differ in length");
    double value = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        check_range(x, i, 0.0, 1.0, "sobol_g");
        value *= (std::abs(4.0 * x[i] - 2.0) + c[i]) / (1.0 + c[i]);
    }
    return value;
}

double ishigami(std::span<const double> x, double a, double b) {
    check_dimension(x, 3, "ishigami");
    for (std::size_t i = 0; i < 3; ++i) check_range(x, i, -pi, pi, "ishigami");
    const double s1 = std::sin(x[0]);
    const double s2 = std::sin(x[1]);
    return s1 + a * s2 * s2 + b * std::pow(x[2], 4) * s1;
}

double environmental(std::span<const double> x) {
    check_ranges(x, kEnvironmentalRanges, "environmental");
    constexpr double s = 1.5;
    constexpr double t = 40.0;
    const double M = x[0];
    const double D = x[1];
    const double L = x[2];
    const double tau = x[3];

    double C = M / std::sqrt(4.0 * pi * D * t) * std::exp(-s * s / (4.0 * D * t));
    if (tau < t) {
        const double dt = t - tau;
        C += M / std::sqrt(4.0 * pi * D * dt) * std::exp(-(s - L) * (s - L) / (4.0 * D * dt));
    }
    return std::sqrt(4.0 * pi) * C;
}

double borehole(std::span<const double> x) {
    check_ranges(x, kBoreholeRanges, "borehole");
    const double rw = x[0];
    const double Tu = x[1];
    const double r = x[2];
    const double Hu = x[3];
    const double Tl = x[4];
    const double Hl = x[5];
    const double L = x[6];
    const double Kw = x[7];
    const double log_ratio = std::log(r / rw);
    return 2.0 * pi * Tu * (Hu - Hl) /
           (log_ratio * (1.0 + 2.0 * L * Tu / (log_ratio * rw * rw * Kw) + Tu / Tl));
}

double wing_weight(std::span<const double> x) {
    check_ranges(x, kWingWeightRanges, "wing_weight");
    const double Sw = x[0];
    const double Wfw = x[1];
    const double A = x[2];
    const double cos_sweep = std::cos(x[3] * pi / 180.0);
    const double q = x[4];
    const double taper = x[5];
    const double tc = x[6];
    const double Nz = x[7];
    const double Wdg = x[8];
    const double Wp = x[9];
    return 0.036 * std::pow(Sw, 0.758) * std::pow(Wfw, 0.0035) *
               std::pow(A / (cos_sweep * cos_sweep), 0.6) * std::pow(q, 0.006) *
               std::pow(taper, 0.04) * std::pow(100.0 * tc / cos_sweep, -0.3) *
               std::pow(Nz * Wdg, 0.49) +
           Sw * Wp;
}

double BenchmarkModel::sample(std::span<const double> x, Rng& rng) const {
    const double y = clean(x);
    if (noise_std == 0.0) return y;
    return y + noise_std * rng.normal();
}

const std::vector<std::string>& benchmark_names() {
    static const std::vector<std::string> names{"sobol_g", "ishigami", "environmental",
                                                "borehole", "wing_weight"};
    return names;
}

BenchmarkModel make_benchmark(std::string_view name) {
    if (name == "sobol_g") {
        return {"sobol_g",
                std::vector<Marginal>(3, Marginal::uniform(0.0, 1.0)),
                [](std::span<const double> x) { return sobol_g(x, kSobolGCoefficients); },
                0.0};
    }
    if (name == "ishigami") {
        return {"ishigami",
                std::vector<Marginal>(3, Marginal::uniform(-pi, pi)),
                [](std::span<const double> x) { return ishigami(x); },
                0.0};
    }
    if (name == "environmental") {
        return {"environmental", uniform_marginals(kEnvironmentalRanges),
                [](std::span<const double> x) { return environmental(x); }, 0.0};
    }
    if (name == "borehole") {
        return {"borehole", uniform_marginals(kBoreholeRanges),
                [](std::span<const double> x) { return borehole(x); }, 0.0};
    }
    if (name == "wing_weight") {
        return {"wing_weight", uniform_marginals(kWingWeightRanges),
                [](std::span<const double> x) { return wing_weight(x); }, 0.0};
    }
    throw UnknownModel("unknown benchmark model '" + std::string(name) + "'");
}

BenchmarkModel with_noise(BenchmarkModel model, double noise_std) {
    if (!(noise_std >= 0.0)) throw InvalidArgument("noise std must be >= 0");
    model.noise_std = noise_std;
    return model;
}

Eigen::VectorXd sobol_g_indices(std::span<const double> c) {
    Eigen::VectorXd partial(static_cast<Eigen::Index>(c.size()));
    double total = 1.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double v = 1.0 / (3.0 * (1.0 + c[i]) * (1.0 + c[i]));
        partial[static_cast<Eigen::Index>(i)] = v;
        total *= 1.0 + v;
    }
    return partial / (total - 1.0);
}

Eigen::VectorXd ishigami_indices(double a, double b) {
    const double pi4 = std::pow(pi, 4);
    const double pi8 = pi4 * pi4;
    const double v1 = 0.5 * std::pow(1.0 + b * pi4 / 5.0, 2);
    const double v2 = a * a / 8.0;
    const double total = a * a / 8.0 + b * pi4 / 5.0 + b * b * pi8 / 18.0 + 0.5;
    Eigen::VectorXd s(3);
    s << v1 / total, v2 / total, 0.0;
    return s;
}

ReferenceIndices reference_indices(const BenchmarkModel& model) {
    ReferenceIndices ref;
    if (model.name == "sobol_g") {
        ref.values = sobol_g_indices(kSobolGCoefficients);
        return ref;
    }
    if (model.name == "ishigami") {
        ref.values = ishigami_indices();
        return ref;
    }
    const auto& names = benchmark_names();
    if (std::find(names.begin(), names.end(), model.name) == names.end()) {
        throw UnknownModel("no reference indices for model '" + model.name + "'");
    }
    Rng rng(kReferenceOracleSeed);
    ref.values = pick_freeze_oracle(model.clean, model.marginals, kReferenceOracleSamples, rng);
    ref.provenance = ReferenceIndices::Provenance::pick_freeze;
    ref.oracle_sample_size = kReferenceOracleSamples;
    ref.oracle_seed = kReferenceOracleSeed;
    return ref;
}

Eigen::VectorXd pick_freeze_oracle(const std::function<double(std::span<const double>)>& f,
                                   const std::vector<Marginal>& marginals, std::uint64_t samples,
                                   Rng& rng) {
    if (samples < 1000) throw InvalidArgument("pick-freeze oracle needs at least 1000 samples");
    const std::size_t d = marginals.size();
    std::vector<double> x(d);
    std::vector<double> x2(d);
    std::vector<double> z(d);

    // Per-variable sums of y*y_i, (y + y_i) and (y^2 + y_i^2).
    std::vector<double> cross(d, 0.0);
    std::vector<double> sum(d, 0.0);
    std::vector<double> sum_sq(d, 0.0);
    for (std::uint64_t n = 0; n < samples; ++n) {
        for (std::size_t k = 0; k < d; ++k) x[k] = marginals[k].quantile(rng.uniform_open());
        for (std::size_t k = 0; k < d; ++k) x2[k] = marginals[k].quantile(rng.uniform_open());
        const double y = f(x);
        for (std::size_t i = 0; i < d; ++i) {
            z = x2;
            z[i] = x[i];
            const double yi = f(z);
            cross[i] += y * yi;
            sum[i] += y + yi;
            sum_sq[i] += y * y + yi * yi;
        }
    }
    const double N = static_cast<double>(samples);
    Eigen::VectorXd S(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
        const double mean = sum[i] / (2.0 * N);
        const double var = sum_sq[i] / (2.0 * N) - mean * mean;
        const double value = var > 0.0 ? (cross[i] / N - mean * mean) / var : 0.0;
        S[static_cast<Eigen::Index>(i)] = std::clamp(value, 0.0, 1.0);
    }
    return S;
}

}  // namespace sadoe
