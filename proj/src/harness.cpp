#include "sadoe/harness.hpp"

#include "sadoe/error.hpp"
#include "sadoe/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <exception>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

namespace sadoe {

namespace {

using nlohmann::json;

const std::set<std::string> kConfigKeys{"model", "degree", "qnorm",    "n0",   "n",
                                        "candidates", "strategies", "runs", "seed",
                                        "noise_std"};

template <class T>
T required(const json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("missing config key '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (!kConfigKeys.count(key)) throw ConfigError("unknown config key '" + key + "'");
    }
    ExperimentConfig c;
    c.model = required<std::string>(j, "model");
    c.degree = required<int>(j, "degree");
    c.qnorm = required<double>(j, "qnorm");
    c.n0 = required<Eigen::Index>(j, "n0");
    c.n = required<Eigen::Index>(j, "n");
    c.runs = required<int>(j, "runs");
    c.seed = required<std::uint64_t>(j, "seed");
    c.noise_std = required<double>(j, "noise_std");

    const auto cand = required<json>(j, "candidates");
    const auto kind = required<std::string>(cand, "kind");
    if (kind == "grid") {
        c.candidates.kind = CandidateConfig::Kind::grid;
        c.candidates.levels = required<int>(cand, "levels");
    } else if (kind == "lhs") {
        c.candidates.kind = CandidateConfig::Kind::lhs;
        c.candidates.size = required<Eigen::Index>(cand, "size");
    } else {
        throw ConfigError("candidates.kind must be \"grid\" or \"lhs\"");
    }

    for (const auto& name : required<std::vector<std::string>>(j, "strategies")) {
        try {
            c.strategies.push_back(parse_strategy(name));
        } catch (const InvalidArgument& e) {
            throw ConfigError(e.what());
        }
    }
    return c;
}

json ExperimentConfig::to_json() const {
    json cand;
    if (candidates.kind == CandidateConfig::Kind::grid) {
        cand = {{"kind", "grid"}, {"levels", candidates.levels}};
    } else {
        cand = {{"kind", "lhs"}, {"size", candidates.size}};
    }
    json names = json::array();
    for (auto s : strategies) names.push_back(std::string(to_string(s)));
    return {{"model", model},   {"degree", degree},    {"qnorm", qnorm},
            {"n0", n0},         {"n", n},              {"candidates", cand},
            {"strategies", names}, {"runs", runs},     {"seed", seed},
            {"noise_std", noise_std}};
}

void ExperimentConfig::validate() const {
    const auto model_def = make_benchmark(model);
    if (degree < 1) throw ConfigError("degree must be >= 1");
    if (!(qnorm > 0.0 && qnorm <= 1.0)) throw ConfigError("qnorm must lie in (0, 1]");
    const auto P = static_cast<Eigen::Index>(
        TruncationSet::hyperbolic(model_def.dimension(), degree, qnorm).size());
    if (n0 < P) {
        throw ConfigError("n0 = " + std::to_string(n0) + " is below the basis size P = " +
                          std::to_string(P));
    }
    if (!(n > n0)) throw ConfigError("n must exceed n0");
    if (runs < 2) throw ConfigError("runs must be >= 2 for Welch comparisons");
    if (strategies.empty()) throw ConfigError("at least one strategy is required");
    if (!(noise_std >= 0.0)) throw ConfigError("noise_std must be >= 0");
    if (candidates.kind == CandidateConfig::Kind::grid && candidates.levels < 2) {
        throw ConfigError("grid levels must be >= 2");
    }
    if (candidates.kind == CandidateConfig::Kind::lhs && candidates.size < 1) {
        throw ConfigError("lhs candidate size must be >= 1");
    }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("malformed config " + path.string() + ": " + e.what());
    }
    return ExperimentConfig::from_json(j);
}

namespace {

// Stream identifiers within one run.
constexpr std::uint64_t kInitialStream = 0;
constexpr std::uint64_t kStrategyStream = 16;
constexpr std::uint64_t kNoiseStream = 32;
constexpr std::uint64_t kCandidateStream = 0xca4d;

std::vector<SelectionTrace> execute_run(const ExperimentConfig& config, const BenchmarkModel& model,
                                        const BasisSpec& spec, const CandidateSet& candidates,
                                        const Eigen::VectorXd& reference, std::uint64_t seed) {
    const Rng run_rng(seed);
    Rng init_rng = run_rng.split(kInitialStream);
    Rng init_noise = run_rng.split(kNoiseStream);
    const Evaluator init_f = [&](std::span<const double> x) { return model.sample(x, init_noise); };
    const DoeState initial =
        nondegenerate_initial_design(candidates, config.n0, spec, init_f, init_rng);

    StepOptions options;
    options.exclude_repeats = config.exclude_repeats;

    std::vector<SelectionTrace> traces;
    for (auto strategy : config.strategies) {
        const auto id = static_cast<std::uint64_t>(strategy);
        Rng rng = run_rng.split(kStrategyStream + id);
        Rng noise = run_rng.split(kNoiseStream + 1 + id);
        const Evaluator f = [&](std::span<const double> x) { return model.sample(x, noise); };
        auto trace =
            run_from_state(strategy, initial, f, candidates, config.n, reference, rng, options);
        trace.seed = seed;
        traces.push_back(std::move(trace));
    }
    return traces;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, int threads) {
    config.validate();
    const BenchmarkModel model = with_noise(make_benchmark(config.model), config.noise_std);
    const BasisSpec spec(model.marginals,
                         TruncationSet::hyperbolic(model.dimension(), config.degree, config.qnorm));

    ExperimentResult result;
    result.config = config;
    result.reference = reference_indices(model);
    result.basis_size = spec.size();

    const CandidateSet candidates = [&] {
        if (config.candidates.kind == CandidateConfig::Kind::grid) {
            return uniform_grid_candidates(spec, config.candidates.levels);
        }
        Rng rng = Rng(config.seed).split(kCandidateStream);
        return lhs_candidates(spec, config.candidates.size, rng);
    }();
    result.candidate_count = candidates.size();

    const auto runs = static_cast<std::size_t>(config.runs);
    for (std::size_t r = 0; r < runs; ++r) result.run_seeds.push_back(config.seed ^ r);

    std::vector<std::vector<SelectionTrace>> per_run(runs);
    std::vector<std::exception_ptr> failures(runs);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t r = next++; r < runs; r = next++) {
            try {
                per_run[r] = execute_run(config, model, spec, candidates, result.reference.values,
                                         result.run_seeds[r]);
            } catch (...) {
                failures[r] = std::current_exception();
            }
        }
    };
    const int workers = std::max(1, std::min<int>(threads, config.runs));
    std::vector<std::thread> pool;
    for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    for (std::size_t r = 0; r < runs; ++r) {
        if (!failures[r]) continue;
        try {
            std::rethrow_exception(failures[r]);
        } catch (const Error& e) {
            throw Error(e.kind(), "run " + std::to_string(r) + ", " + e.what());
        }
    }
    for (std::size_t r = 0; r < runs; ++r) {
        for (auto& trace : per_run[r]) {
            result.traces.push_back(std::move(trace));
            result.trace_runs.push_back(static_cast<int>(r));
        }
    }
    return result;
}

const SummaryRow* ComparisonReport::find(Eigen::Index budget, std::string_view strategy) const {
    for (const auto& row : rows) {
        if (row.budget == budget && row.strategy == strategy) return &row;
    }
    return nullptr;
}

ComparisonReport aggregate(const std::vector<SelectionTrace>& traces) {
    std::vector<std::string> order;
    // budget -> strategy -> per-run errors
    std::map<Eigen::Index, std::map<std::string, std::vector<double>>> errors;
    for (const auto& trace : traces) {
        const std::string name(to_string(trace.strategy));
        if (std::find(order.begin(), order.end(), name) == order.end()) order.push_back(name);
        errors[trace.initial.budget][name].push_back(trace.initial.mean_error);
        for (const auto& rec : trace.records) errors[rec.budget][name].push_back(rec.mean_error);
    }

    const std::string reference_name(to_string(Strategy::adaptive_si));
    ComparisonReport report;
    for (const auto& [budget, by_strategy] : errors) {
        const auto si = by_strategy.find(reference_name);
        for (const auto& name : order) {
            const auto it = by_strategy.find(name);
            if (it == by_strategy.end()) continue;
            const auto& values = it->second;
            if (values.size() < 2) {
                throw DegenerateSamples("strategy " + name + " has fewer than two runs at budget " +
                                        std::to_string(budget));
            }
            SummaryRow row;
            row.budget = budget;
            row.strategy = name;
            row.mean = sample_mean(values);
            row.std = sample_std(values);
            if (si != by_strategy.end()) {
                const double si_mean = sample_mean(si->second);
                if (row.mean == 0.0 && si_mean == 0.0) {
                    row.rel_mean_vs_adaptive_si = 1.0;
                } else {
                    row.rel_mean_vs_adaptive_si = row.mean / si_mean;
                }
                if (name != reference_name) {
                    try {
                        row.welch_p_vs_adaptive_si = welch_t_test(values, si->second).p;
                    } catch (const DegenerateSamples&) {
                        // Two constant samples: identical means carry no evidence of a difference.
                        if (row.mean != si_mean) throw;
                        row.welch_p_vs_adaptive_si = 1.0;
                    }
                }
            }
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void write_runs_csv(std::ostream& out, const ExperimentResult& result) {
    out << kRunsCsvHeader << '\n';
    for (std::size_t t = 0; t < result.traces.size(); ++t) {
        const auto& trace = result.traces[t];
        const int run = result.trace_runs[t];
        const auto emit = [&](const SelectionRecord& rec) {
            out << run << ',' << to_string(trace.strategy) << ',' << rec.iteration << ','
                << rec.budget << ',' << format_double(rec.mean_error) << ','
                << format_double(rec.loo_error) << ',' << rec.model_evals << '\n';
        };
        emit(trace.initial);
        for (const auto& rec : trace.records) emit(rec);
    }
}

void write_summary_csv(std::ostream& out, const ComparisonReport& report) {
    out << kSummaryCsvHeader << '\n';
    const auto optional = [](const std::optional<double>& v) {
        return v ? format_double(*v) : std::string();
    };
    for (const auto& row : report.rows) {
        out << row.budget << ',' << row.strategy << ',' << format_double(row.mean) << ','
            << format_double(row.std) << ',' << optional(row.rel_mean_vs_adaptive_si) << ','
            << optional(row.welch_p_vs_adaptive_si) << '\n';
    }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_double(const std::string& s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    // strtod rather than stod: subnormal values are valid output and must round-trip.
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) throw InvalidArgument("malformed number '" + s + "'");
    return v;
}

}  // namespace

ComparisonReport read_summary_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kSummaryCsvHeader) {
        throw InvalidArgument("summary.csv header mismatch");
    }
    ComparisonReport report;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 6) throw InvalidArgument("summary.csv row has " + std::to_string(f.size()) + " fields");
        SummaryRow row;
        row.budget = std::stoll(f[0]);
        row.strategy = f[1];
        row.mean = parse_double(f[2]);
        row.std = parse_double(f[3]);
        if (!f[4].empty()) row.rel_mean_vs_adaptive_si = parse_double(f[4]);
        if (!f[5].empty()) row.welch_p_vs_adaptive_si = parse_double(f[5]);
        report.rows.push_back(std::move(row));
    }
    return report;
}

nlohmann::json experiment_metadata(const ExperimentResult& result) {
    json ref = json::array();
    for (Eigen::Index i = 0; i < result.reference.values.size(); ++i) {
        ref.push_back(result.reference.values[i]);
    }
    json traces = json::array();
    for (std::size_t t = 0; t < result.traces.size(); ++t) {
        const auto& tr = result.traces[t];
        traces.push_back({{"run", result.trace_runs[t]},
                          {"strategy", std::string(to_string(tr.strategy))},
                          {"criterion_fallbacks", tr.criterion_fallbacks},
                          {"refactorizations", tr.refactorizations}});
    }
    const bool closed = result.reference.provenance == ReferenceIndices::Provenance::closed_form;
    return {{"config", result.config.to_json()},
            {"exclude_repeats", result.config.exclude_repeats},
            {"paired_initial_designs", true},
            {"basis_size", result.basis_size},
            {"candidate_count", result.candidate_count},
            {"run_seeds", result.run_seeds},
            {"reference_indices",
             {{"values", ref},
              {"provenance", closed ? "closed_form" : "pick_freeze"},
              {"oracle_sample_size", result.reference.oracle_sample_size},
              {"oracle_seed", result.reference.oracle_seed}}},
            {"traces", traces}};
}

void write_outputs(const std::filesystem::path& directory, const ExperimentResult& result,
                   const ComparisonReport& report) {
    std::filesystem::create_directories(directory);
    const auto open = [&](const char* name) {
        std::ofstream out(directory / name);
        if (!out) throw InvalidArgument("cannot write " + (directory / name).string());
        return out;
    };
    {
        auto out = open("runs.csv");
        write_runs_csv(out, result);
    }
    {
        auto out = open("summary.csv");
        write_summary_csv(out, report);
    }
    {
        auto out = open("meta.json");
        out << experiment_metadata(result).dump(2) << '\n';
    }
}

}  // namespace sadoe
