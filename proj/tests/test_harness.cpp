#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sadoe/error.hpp"
#include "sadoe/harness.hpp"
#include "sadoe/stats.hpp"

#include <cmath>
#include <sstream>

using namespace sadoe;
using nlohmann::json;

namespace {

struct WelchCase {
    int k;
    double t;
    double dof;
    double p;
};

// Reference values from an arbitrary-precision evaluation of the Welch
// statistic and Student-t tail.
constexpr WelchCase kWelchCases[] = {
    {0, 1.971420736223535, 1.0635118096456779, 0.28712914172251575},
    {1, 0.80195509983989477, 19.403666069739142, 0.43229141277261518},
    {2, 0.13475359837311982, 37.716417639959815, 0.89352325916940489},
    {3, -1.8015161508094004, 11.539937653326724, 0.097783668669852955},
    {4, 0.17823558538639778, 24.427216887014207, 0.86000788913808801},
    {5, 0.74034290616107623, 16.208104383202173, 0.46968159691382128},
    {6, 3.0705895240167367, 7.9475240262024407, 0.015456057196906401},
    {7, 0.62612275692265851, 6.3209536993638542, 0.55315953969334342},
    {8, 1.068811580206559, 31.539679881050716, 0.29326691096764151},
    {9, -0.71077618050340452, 8.5052976965139973, 0.49624949282044173},
    {10, 0.20572769225926676, 18.148673282018812, 0.83929369317296665},
    {11, 1.2948814079482105, 29.723750813876279, 0.20532960827995517},
    {12, 1.728388848496524, 9.6926589189412198, 0.11557538854871105},
    {13, 1.7461657577161362, 21.254044720515552, 0.095221607353483895},
    {14, 1.4711119004521427, 10.183340543993245, 0.17147461909810641},
    {15, 0.92958284168388949, 7.9668114958201999, 0.37989168637134813},
    {16, 1.0826816049421368, 5.1365910611782279, 0.32713558675555182},
    {17, 1.5738592545055714, 33.12721599339821, 0.12502333622283809},
    {18, 1.2702937246324049, 9.8007980027671504, 0.23330700280179625},
    {19, 81.090371667203456, 11.404752365509717, 4.1352043539929137e-17},
};

void welch_samples(int k, std::vector<double>& a, std::vector<double>& b) {
    a.clear();
    b.clear();
    if (k == 19) {
        for (int i = 0; i < 30; ++i) a.push_back(10.0 + 0.01 * i);
        for (int i = 0; i < 12; ++i) b.push_back(0.01 * i * i);
        return;
    }
    const int na = 3 + (k * 7) % 20;
    const int nb = 2 + (k * 11) % 25;
    for (int i = 0; i < na; ++i) a.push_back(std::sin(0.7 * (i + 1) + k) * (1.0 + 0.1 * k) + 0.05 * k);
    for (int i = 0; i < nb; ++i) b.push_back(std::cos(1.3 * (i + 1) + 0.5 * k) * (1.0 + 0.2 * (k % 5)));
}

SelectionTrace make_trace(Strategy s, Eigen::Index n0, std::vector<double> errors) {
    SelectionTrace t;
    t.strategy = s;
    t.initial.budget = n0;
    t.initial.mean_error = errors.front();
    for (std::size_t i = 1; i < errors.size(); ++i) {
        SelectionRecord r;
        r.iteration = static_cast<int>(i);
        r.budget = n0 + static_cast<Eigen::Index>(i);
        r.mean_error = errors[i];
        t.records.push_back(r);
    }
    return t;
}

json small_config() {
    return json{{"model", "ishigami"},
                {"degree", 3},
                {"qnorm", 1.0},
                {"n0", 25},
                {"n", 30},
                {"candidates", {{"kind", "grid"}, {"levels", 6}}},
                {"strategies", {"adaptive_si", "random", "lhs"}},
                {"runs", 3},
                {"seed", 99},
                {"noise_std", 0.0}};
}

}  // namespace

TEST_CASE("mean error") {
    const Eigen::Vector3d a(0.1, 0.2, 0.3);
    CHECK(mean_error(a, a) == 0.0);
    CHECK(mean_error(Eigen::Vector3d(0.3, 0.4, 0.0), Eigen::Vector3d::Zero()) == doctest::Approx(0.5));
    CHECK(mean_error(Eigen::Vector3d(0.3, 0.1, 0.2), Eigen::Vector3d(0.0, 0.5, 0.2)) ==
          mean_error(Eigen::Vector3d(0.2, 0.3, 0.1), Eigen::Vector3d(0.2, 0.0, 0.5)));
    CHECK_THROWS_AS(mean_error(a, Eigen::Vector2d(0, 0)), InvalidArgument);
}

TEST_CASE("Welch test against high-precision references") {
    std::vector<double> a, b;
    for (const auto& c : kWelchCases) {
        welch_samples(c.k, a, b);
        const auto r = welch_t_test(a, b);
        INFO("case " << c.k);
        CHECK(r.t == doctest::Approx(c.t).epsilon(1e-10));
        CHECK(r.dof == doctest::Approx(c.dof).epsilon(1e-10));
        CHECK(r.p == doctest::Approx(c.p).epsilon(1e-8));
        const auto swapped = welch_t_test(b, a);
        CHECK(swapped.t == doctest::Approx(-r.t).epsilon(1e-14));
        CHECK(swapped.p == doctest::Approx(r.p).epsilon(1e-14));
    }
}

TEST_CASE("Welch test edge cases") {
    const std::vector<double> a{1.0, 2.0, 4.0, 7.0};
    const auto same = welch_t_test(a, a);
    CHECK(same.t == 0.0);
    CHECK(same.p == doctest::Approx(1.0));
    const std::vector<double> one{1.0};
    CHECK_THROWS_AS(welch_t_test(one, a), InvalidArgument);
    const std::vector<double> c1{2.0, 2.0, 2.0};
    const std::vector<double> c2{3.0, 3.0};
    CHECK_THROWS_AS(welch_t_test(c1, c2), DegenerateSamples);
    CHECK(sample_mean(a) == 3.5);
    CHECK(sample_std(a) == doctest::Approx(std::sqrt(7.0)));
}

TEST_CASE("aggregate on a hand-built fixture") {
    // Two runs, budgets 10 and 11.
    std::vector<SelectionTrace> traces{
        make_trace(Strategy::adaptive_si, 10, {0.4, 0.1}), make_trace(Strategy::random, 10, {0.4, 0.3}),
        make_trace(Strategy::adaptive_si, 10, {0.2, 0.3}), make_trace(Strategy::random, 10, {0.2, 0.5})};
    const auto report = aggregate(traces);
    REQUIRE(report.rows.size() == 4);

    const auto* si10 = report.find(10, "adaptive_si");
    REQUIRE(si10);
    CHECK(si10->mean == doctest::Approx(0.3));
    CHECK(si10->std == doctest::Approx(std::sqrt(0.02)));
    CHECK(si10->rel_mean_vs_adaptive_si == 1.0);
    CHECK_FALSE(si10->welch_p_vs_adaptive_si.has_value());

    const auto* r10 = report.find(10, "random");
    REQUIRE(r10);
    CHECK(*r10->rel_mean_vs_adaptive_si == doctest::Approx(1.0));
    CHECK(*r10->welch_p_vs_adaptive_si == doctest::Approx(1.0));

    const auto* si11 = report.find(11, "adaptive_si");
    const auto* r11 = report.find(11, "random");
    REQUIRE(si11);
    REQUIRE(r11);
    CHECK(si11->mean == doctest::Approx(0.2));
    CHECK(r11->mean == doctest::Approx(0.4));
    CHECK(r11->std == doctest::Approx(std::sqrt(0.02)));
    CHECK(*r11->rel_mean_vs_adaptive_si == doctest::Approx(2.0));
    // t = sqrt(2) with 2 dof; two-sided p = 1 - |t| / sqrt(2 + t^2).
    CHECK(*r11->welch_p_vs_adaptive_si == doctest::Approx(1.0 - std::sqrt(2.0) / 2.0).epsilon(1e-10));
    CHECK(report.find(12, "random") == nullptr);
}

TEST_CASE("aggregate conventions") {
    std::vector<SelectionTrace> single{make_trace(Strategy::random, 5, {0.3, 0.2}),
                                       make_trace(Strategy::random, 5, {0.1, 0.4})};
    for (const auto& row : aggregate(single).rows) {
        CHECK_FALSE(row.rel_mean_vs_adaptive_si.has_value());
        CHECK_FALSE(row.welch_p_vs_adaptive_si.has_value());
    }
    std::vector<SelectionTrace> zeros{
        make_trace(Strategy::adaptive_si, 5, {0.0, 0.0}), make_trace(Strategy::lhs, 5, {0.0, 0.0}),
        make_trace(Strategy::adaptive_si, 5, {0.0, 0.0}), make_trace(Strategy::lhs, 5, {0.0, 0.0})};
    for (const auto& row : aggregate(zeros).rows) {
        CHECK(row.mean == 0.0);
        CHECK(*row.rel_mean_vs_adaptive_si == 1.0);
    }
    std::vector<SelectionTrace> lonely{make_trace(Strategy::random, 5, {0.3, 0.2})};
    CHECK_THROWS_AS(aggregate(lonely), DegenerateSamples);
}

TEST_CASE("summary CSV round trip") {
    ComparisonReport report;
    report.rows.push_back({150, "adaptive_si", 0.1 / 3.0, std::sqrt(2.0) * 1e-3, 1.0, std::nullopt});
    report.rows.push_back({150, "random", 1.0 / 7.0, 0.0123456789012345678, 4.285714285714286,
                           1.234567890123e-17});
    report.rows.push_back({151, "lhs", 5e-324, 1e300, std::nullopt, std::nullopt});
    std::stringstream ss;
    write_summary_csv(ss, report);
    CHECK(ss.str().rfind(std::string(kSummaryCsvHeader) + "\n", 0) == 0);
    const auto back = read_summary_csv(ss);
    REQUIRE(back.rows.size() == report.rows.size());
    for (std::size_t i = 0; i < back.rows.size(); ++i) {
        CHECK(back.rows[i].budget == report.rows[i].budget);
        CHECK(back.rows[i].strategy == report.rows[i].strategy);
        CHECK(back.rows[i].mean == report.rows[i].mean);
        CHECK(back.rows[i].std == report.rows[i].std);
        CHECK(back.rows[i].rel_mean_vs_adaptive_si == report.rows[i].rel_mean_vs_adaptive_si);
        CHECK(back.rows[i].welch_p_vs_adaptive_si == report.rows[i].welch_p_vs_adaptive_si);
    }
    std::stringstream bad("budget,strategy,mean\n");
    CHECK_THROWS_AS(read_summary_csv(bad), InvalidArgument);
    CHECK(format_double(std::nan("")) == "nan");
    CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("config parsing") {
    const auto c = ExperimentConfig::from_json(small_config());
    CHECK(c.model == "ishigami");
    CHECK(c.degree == 3);
    CHECK(c.candidates.kind == CandidateConfig::Kind::grid);
    CHECK(c.candidates.levels == 6);
    CHECK(c.strategies == std::vector<Strategy>{Strategy::adaptive_si, Strategy::random, Strategy::lhs});
    CHECK(ExperimentConfig::from_json(c.to_json()).to_json() == c.to_json());
    CHECK_NOTHROW(c.validate());

    auto missing = small_config();
    missing.erase("seed");
    CHECK_THROWS_AS(ExperimentConfig::from_json(missing), ConfigError);
    auto extra = small_config();
    extra["threads"] = 4;
    CHECK_THROWS_AS(ExperimentConfig::from_json(extra), ConfigError);
    auto wrong_type = small_config();
    wrong_type["degree"] = "three";
    CHECK_THROWS_AS(ExperimentConfig::from_json(wrong_type), ConfigError);
    auto bad_strategy = small_config();
    bad_strategy["strategies"] = {"sobol"};
    CHECK_THROWS_AS(ExperimentConfig::from_json(bad_strategy), ConfigError);
    auto bad_kind = small_config();
    bad_kind["candidates"] = {{"kind", "halton"}};
    CHECK_THROWS_AS(ExperimentConfig::from_json(bad_kind), ConfigError);

    auto small_n0 = ExperimentConfig::from_json(small_config());
    small_n0.n0 = 19;
    CHECK_THROWS_AS(small_n0.validate(), ConfigError);
    auto one_run = ExperimentConfig::from_json(small_config());
    one_run.runs = 1;
    CHECK_THROWS_AS(one_run.validate(), ConfigError);
    auto unknown = ExperimentConfig::from_json(small_config());
    unknown.model = "rosenbrock";
    CHECK_THROWS_AS(unknown.validate(), UnknownModel);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("experiment bookkeeping and determinism") {
    auto cfg = ExperimentConfig::from_json(small_config());
    const auto a = run_experiment(cfg, 1);
    const auto b = run_experiment(cfg, 3);
    CHECK(a.basis_size == 20);
    CHECK(a.candidate_count == 216);
    REQUIRE(a.traces.size() == 9);
    CHECK(a.run_seeds == std::vector<std::uint64_t>{99, 98, 97});
    for (std::size_t t = 0; t < a.traces.size(); ++t) {
        CHECK(a.traces[t].records.size() == 5);
        CHECK(a.trace_runs[t] == static_cast<int>(t / 3));
    }
    // Paired initial designs: iteration-0 state is shared inside a run.
    for (std::size_t r = 0; r < 3; ++r) {
        const auto& si = a.traces[3 * r];
        const auto& rnd = a.traces[3 * r + 1];
        CHECK(si.initial.indices == rnd.initial.indices);
        CHECK(si.initial.mean_error == rnd.initial.mean_error);
    }
    std::stringstream ra, rb, sa, sb;
    write_runs_csv(ra, a);
    write_runs_csv(rb, b);
    write_summary_csv(sa, aggregate(a.traces));
    write_summary_csv(sb, aggregate(b.traces));
    CHECK(ra.str() == rb.str());
    CHECK(sa.str() == sb.str());
    CHECK(ra.str().rfind(std::string(kRunsCsvHeader) + "\n", 0) == 0);
    // 9 traces of 6 rows plus header.
    const std::string runs_text = ra.str();
    CHECK(std::count(runs_text.begin(), runs_text.end(), '\n') == 55);

    // Report means are arithmetic means of the per-run errors.
    const auto report = aggregate(a.traces);
    double s = 0.0;
    for (std::size_t r = 0; r < 3; ++r) s += a.traces[3 * r + 1].records.back().mean_error;
    CHECK(std::abs(report.find(30, "random")->mean - s / 3.0) <= 1e-12);

    const auto meta = experiment_metadata(a);
    CHECK(meta["paired_initial_designs"] == true);
    CHECK(meta["run_seeds"].size() == 3);
    CHECK(meta["config"]["model"] == "ishigami");

    auto two = cfg;
    two.strategies = {Strategy::random};
    two.runs = 2;
    two.n = 30;
    const auto small = run_experiment(two);
    CHECK(small.traces.size() == 2);
    CHECK(small.traces[0].records.size() == 5);

    auto bad = cfg;
    bad.candidates.levels = 3;  // cannot support a cubic basis
    CHECK_THROWS_AS(run_experiment(bad), Error);
}

TEST_CASE("noisy experiments complete") {
    auto cfg = ExperimentConfig::from_json(small_config());
    cfg.noise_std = 1.4;
    cfg.candidates.kind = CandidateConfig::Kind::lhs;
    cfg.candidates.size = 500;
    const auto result = run_experiment(cfg, 2);
    CHECK(result.candidate_count == 500);
    for (const auto& t : result.traces) {
        for (const auto& r : t.records) CHECK(std::isfinite(r.mean_error));
    }
}
