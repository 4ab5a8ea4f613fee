// Command-line harness: benchmark experiments, one-shot index estimates and
// pick-freeze reference indices.

#include "sadoe/benchfns.hpp"
#include "sadoe/doe.hpp"
#include "sadoe/error.hpp"
#include "sadoe/harness.hpp"
#include "sadoe/pce.hpp"
#include "sadoe/sensitivity.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <iostream>
#include <sstream>

namespace {

using nlohmann::json;

json to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

std::vector<sadoe::Strategy> parse_strategy_list(const std::string& list) {
    std::vector<sadoe::Strategy> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(sadoe::parse_strategy(item));
    }
    if (out.empty()) throw sadoe::ConfigError("empty strategy list");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sensitivity-oriented adaptive design of experiments for PCE surrogates"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run a multi-seed benchmark experiment");
    std::string config_path;
    std::string out_dir;
    std::optional<int> runs;
    std::optional<std::uint64_t> seed;
    std::string strategies;
    int threads = 1;
    bool exclude_repeats = false;
    run->add_option("--config", config_path, "Experiment config (JSON)")->required();
    run->add_option("--out", out_dir, "Output directory")->required();
    run->add_option("--runs", runs, "Override the number of runs");
    run->add_option("--seed", seed, "Override the base seed");
    run->add_option("--strategies", strategies, "Comma-separated strategy list override");
    run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    run->add_flag("--exclude-repeats", exclude_repeats,
                  "Never select a candidate that is already in the design");

    auto* indices = app.add_subcommand("indices", "One-shot PCE index estimate on an LHS design");
    std::string model_name;
    int degree = 0;
    double qnorm = 1.0;
    long long n = 0;
    std::uint64_t idx_seed = 0;
    double noise = 0.0;
    indices->add_option("--model", model_name, "Benchmark model name")->required();
    indices->add_option("--degree", degree, "Maximal total degree p")->required();
    indices->add_option("--qnorm", qnorm, "Hyperbolic q-norm")->required();
    indices->add_option("--n", n, "Design size")->required();
    indices->add_option("--seed", idx_seed, "Seed")->required();
    indices->add_option("--noise", noise, "Additive noise std-dev");

    auto* oracle = app.add_subcommand("oracle", "Pick-freeze reference indices");
    std::string oracle_model;
    std::uint64_t samples = 0;
    std::uint64_t oracle_seed = 0;
    oracle->add_option("--model", oracle_model, "Benchmark model name")->required();
    oracle->add_option("--samples", samples, "Monte Carlo sample size N")->required();
    oracle->add_option("--seed", oracle_seed, "Seed")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            auto config = sadoe::load_config(config_path);
            if (runs) config.runs = *runs;
            if (seed) config.seed = *seed;
            if (!strategies.empty()) config.strategies = parse_strategy_list(strategies);
            config.exclude_repeats = exclude_repeats;
            const auto result = sadoe::run_experiment(config, threads);
            const auto report = sadoe::aggregate(result.traces);
            sadoe::write_outputs(out_dir, result, report);
            std::cout << "wrote " << result.traces.size() << " traces to " << out_dir << '\n';
        } else if (*indices) {
            const auto model = sadoe::with_noise(sadoe::make_benchmark(model_name), noise);
            const sadoe::BasisSpec spec(
                model.marginals, sadoe::TruncationSet::hyperbolic(model.dimension(), degree, qnorm));
            sadoe::Rng rng(idx_seed);
            sadoe::Rng noise_rng = rng.split(1);
            sadoe::TrainingSample sample{sadoe::lhs_design(n, model.marginals, rng),
                                         Eigen::VectorXd(n)};
            for (Eigen::Index i = 0; i < n; ++i) {
                sample.responses[i] = model.sample(sadoe::row_span(sample.points, i), noise_rng);
            }
            const auto fit = sadoe::fit_least_squares(sample, spec);
            const auto A = sadoe::information_matrix(spec.to_standard_rows(sample.points), spec);
            const auto est = sadoe::estimate_indices(fit, A);
            const auto reference = sadoe::reference_indices(model);
            json out{{"model", model.name},
                     {"basis_size", spec.size()},
                     {"n", n},
                     {"indices", to_json(est.indices)},
                     {"std_errors", to_json(est.covariance.diagonal().cwiseMax(0.0).cwiseSqrt())},
                     {"noise_variance", fit.noise_variance()},
                     {"reference", to_json(reference.values)},
                     {"mean_error", (est.indices - reference.values).norm()}};
            if (n > static_cast<long long>(spec.size())) {
                out["loo_error"] = sadoe::loo_relative_error(sample, spec);
            }
            std::cout << out.dump(2) << '\n';
        } else if (*oracle) {
            const auto model = sadoe::make_benchmark(oracle_model);
            sadoe::Rng rng(oracle_seed);
            const auto S = sadoe::pick_freeze_oracle(model.clean, model.marginals, samples, rng);
            json out{{"model", model.name}, {"samples", samples}, {"indices", to_json(S)}};
            std::cout << out.dump(2) << '\n';
        }
    } catch (const sadoe::Error& e) {
        std::cerr << "error: " << e.kind() << ": " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
