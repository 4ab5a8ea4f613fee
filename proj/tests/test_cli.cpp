#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Outcome {
    int status;
    std::string output;
};

Outcome run(const std::string& args) {
    const std::string cmd = std::string(SADOE_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    while (std::fgets(buf, sizeof buf, pipe)) out += buf;
    const int raw = pclose(pipe);
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

fs::path write_config(const std::string& name, const nlohmann::json& j) {
    const fs::path dir = fs::path(SADOE_TEST_TMP) / "cli";
    fs::create_directories(dir);
    const fs::path p = dir / name;
    std::ofstream(p) << j.dump(2);
    return p;
}

nlohmann::json config() {
    return {{"model", "sobol_g"},
            {"degree", 2},
            {"qnorm", 1.0},
            {"n0", 12},
            {"n", 16},
            {"candidates", {{"kind", "grid"}, {"levels", 5}}},
            {"strategies", {"adaptive_si", "adaptive_dopt", "random", "lhs"}},
            {"runs", 2},
            {"seed", 5},
            {"noise_std", 0.0}};
}

}  // namespace

TEST_CASE("run writes reproducible outputs") {
    const auto cfg = write_config("ok.json", config());
    const fs::path out1 = fs::path(SADOE_TEST_TMP) / "cli" / "out1";
    const fs::path out2 = fs::path(SADOE_TEST_TMP) / "cli" / "out2";
    fs::remove_all(out1);
    fs::remove_all(out2);
    const auto a = run("run --config " + cfg.string() + " --out " + out1.string());
    const auto b = run("run --config " + cfg.string() + " --out " + out2.string() + " --threads 2");
    CHECK(a.status == 0);
    CHECK(b.status == 0);
    const auto runs = slurp(out1 / "runs.csv");
    const auto summary = slurp(out1 / "summary.csv");
    CHECK(first_line(runs) == "run,strategy,iteration,budget,mean_error,loo_error,model_evals");
    CHECK(first_line(summary) ==
          "budget,strategy,mean,std,rel_mean_vs_adaptive_si,welch_p_vs_adaptive_si");
    CHECK(runs == slurp(out2 / "runs.csv"));
    CHECK(summary == slurp(out2 / "summary.csv"));
    const auto meta = nlohmann::json::parse(slurp(out1 / "meta.json"));
    CHECK(meta["config"]["seed"] == 5);
    CHECK(meta["paired_initial_designs"] == true);

    const fs::path out3 = fs::path(SADOE_TEST_TMP) / "cli" / "out3";
    const auto c = run("run --config " + cfg.string() + " --out " + out3.string() +
                       " --runs 3 --seed 8 --strategies random,lhs");
    CHECK(c.status == 0);
    const auto meta3 = nlohmann::json::parse(slurp(out3 / "meta.json"));
    CHECK(meta3["config"]["runs"] == 3);
    CHECK(meta3["config"]["strategies"].size() == 2);
}

TEST_CASE("errors name their class and exit nonzero") {
    auto bad = config();
    bad["model"] = "rosenbrock";
    const auto r1 = run("run --config " + write_config("bad_model.json", bad).string() + " --out " +
                        (fs::path(SADOE_TEST_TMP) / "cli" / "bad").string());
    CHECK(r1.status != 0);
    CHECK(r1.output.find("UnknownModel") != std::string::npos);

    auto extra = config();
    extra["colour"] = "blue";
    const auto r2 = run("run --config " + write_config("extra.json", extra).string() + " --out /tmp/x");
    CHECK(r2.status != 0);
    CHECK(r2.output.find("ConfigError") != std::string::npos);

    auto coarse = config();
    coarse["candidates"]["levels"] = 2;
    const auto r3 = run("run --config " + write_config("coarse.json", coarse).string() + " --out " +
                        (fs::path(SADOE_TEST_TMP) / "cli" / "coarse").string());
    CHECK(r3.status != 0);
    CHECK(r3.output.find("DegenerateCandidates") != std::string::npos);

    CHECK(run("oracle --model sobol_g --samples 10 --seed 1").status != 0);
    CHECK(run("frobnicate").status != 0);
}

TEST_CASE("indices and oracle subcommands") {
    const auto r = run("indices --model ishigami --degree 5 --qnorm 1 --n 200 --seed 3");
    REQUIRE(r.status == 0);
    const auto j = nlohmann::json::parse(r.output);
    CHECK(j["basis_size"] == 56);
    CHECK(j["indices"].size() == 3);
    CHECK(j["std_errors"].size() == 3);
    CHECK(j.contains("loo_error"));

    const auto o = run("oracle --model sobol_g --samples 20000 --seed 4");
    REQUIRE(o.status == 0);
    const auto k = nlohmann::json::parse(o.output);
    CHECK(k["indices"].size() == 3);
    CHECK(std::abs(k["indices"][0].get<double>() - 0.639) < 0.05);
}
