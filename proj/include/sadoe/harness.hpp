#pragma once

#include "sadoe/benchfns.hpp"
#include "sadoe/doe.hpp"

#include <json.hpp>

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sadoe {

struct CandidateConfig {
    enum class Kind { grid, lhs };

    Kind kind = Kind::grid;
    int levels = 7;               // grid
    Eigen::Index size = 0;        // lhs
};

struct ExperimentConfig {
    std::string model;
    int degree = 0;
    double qnorm = 1.0;
    Eigen::Index n0 = 0;
    Eigen::Index n = 0;
    CandidateConfig candidates;
    std::vector<Strategy> strategies;
    int runs = 0;
    std::uint64_t seed = 0;
    double noise_std = 0.0;
    bool exclude_repeats = false;

    /// Parses the config file schema; every key is required and unknown keys
    /// are rejected. Throws ConfigError.
    static ExperimentConfig from_json(const nlohmann::json& j);
    [[nodiscard]] nlohmann::json to_json() const;

    /// Checks n > n0 >= P, runs >= 2 and the model name. Throws ConfigError
    /// or UnknownModel.
    void validate() const;
};

ExperimentConfig load_config(const std::filesystem::path& path);

struct ExperimentResult {
    ExperimentConfig config;
    ReferenceIndices reference;
    std::size_t basis_size = 0;
    Eigen::Index candidate_count = 0;
    std::vector<std::uint64_t> run_seeds;
    /// Run-major, strategies in configuration order within a run.
    std::vector<SelectionTrace> traces;
    std::vector<int> trace_runs;
};

/// Executes every configured strategy for each run from one shared initial
/// design per run. Runs are distributed over `threads` workers; the result
/// does not depend on the thread count.
ExperimentResult run_experiment(const ExperimentConfig& config, int threads = 1);

struct SummaryRow {
    Eigen::Index budget = 0;
    std::string strategy;
    double mean = 0.0;
    double std = 0.0;
    std::optional<double> rel_mean_vs_adaptive_si;
    std::optional<double> welch_p_vs_adaptive_si;
};

struct ComparisonReport {
    std::vector<SummaryRow> rows;

    [[nodiscard]] const SummaryRow* find(Eigen::Index budget, std::string_view strategy) const;
};

/// Mean and std of the per-run mean error at each budget and strategy, plus
/// ratio and Welch p-value of every baseline against adaptive_si.
ComparisonReport aggregate(const std::vector<SelectionTrace>& traces);

inline constexpr const char* kRunsCsvHeader =
    "run,strategy,iteration,budget,mean_error,loo_error,model_evals";
inline constexpr const char* kSummaryCsvHeader =
    "budget,strategy,mean,std,rel_mean_vs_adaptive_si,welch_p_vs_adaptive_si";

void write_runs_csv(std::ostream& out, const ExperimentResult& result);
void write_summary_csv(std::ostream& out, const ComparisonReport& report);
ComparisonReport read_summary_csv(std::istream& in);
nlohmann::json experiment_metadata(const ExperimentResult& result);

/// runs.csv, summary.csv and meta.json under `directory` (created if needed).
void write_outputs(const std::filesystem::path& directory, const ExperimentResult& result,
                   const ComparisonReport& report);

/// 17 significant digits, "nan"/"inf" for non-finite values.
std::string format_double(double value);

}  // namespace sadoe
