#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "bifsim/acceptance.hpp"
#include "bifsim/error.hpp"
#include "commands.hpp"
#include "config.hpp"

using namespace bifcli;
using bifsim::ConfigError;

namespace {

struct Run {
    int status;
    std::string out;
    std::string log;
};

Run run(const std::string& cmd, const RunConfig& c) {
    std::ostringstream os, log;
    const int s = run_command(cmd, c, os, log);
    return {s, os.str(), log.str()};
}

RunConfig from_text(const std::string& text) {
    RunConfig c;
    apply_text(c, text);
    return c;
}

} // namespace

TEST_CASE("key-value config") {
    const auto c = from_text("# model\nbeta1 = -2\n  beta2=1.5   # upper\n\ntrials = 12\nscheme = minimal\n");
    CHECK(c.params.beta1 == -2.0);
    CHECK(c.params.beta2 == 1.5);
    CHECK(c.trials == 12);
    CHECK(c.scheme == "minimal");
    CHECK(c.has("beta1"));
    CHECK_FALSE(c.has("dt"));
}

TEST_CASE("JSON config") {
    const auto c = from_text(R"({"beta1": -3, "sigma2": 2.5, "out": "run1", "seed": 42})");
    CHECK(c.params.beta1 == -3.0);
    CHECK(c.params.sigma2 == 2.5);
    CHECK(c.out == "run1");
    CHECK(c.seed == 42);
    CHECK_THROWS_AS(from_text(R"({"beta1": [1, 2]})"), ConfigError);
    CHECK_THROWS_AS(from_text("{not json"), ConfigError);
}

TEST_CASE("flags override the file") {
    auto c = from_text("beta1 = -2\ndt = 0.01\n");
    set_key(c, "dt", "0.001");
    CHECK(c.dt == 0.001);
    CHECK(c.params.beta1 == -2.0);
}

TEST_CASE("config errors") {
    try {
        from_text("beta3 = 1\n");
        FAIL("no error");
    } catch (const ConfigError& e) {
        const std::string m = e.what();
        CHECK(m.find("beta3") != std::string::npos);
        CHECK(m.find("valid keys") != std::string::npos);
        for (const auto& k : config_keys()) CHECK(m.find(k) != std::string::npos);
    }
    CHECK_THROWS_AS(from_text("dt = 1\ndt = 2\n"), ConfigError);
    CHECK_THROWS_AS(from_text("dt 1\n"), ConfigError);
    CHECK_THROWS_AS(from_text("dt = fast\n"), ConfigError);
    CHECK_THROWS_AS(from_text("trials = -3\n"), ConfigError);
    CHECK_THROWS_AS(from_text("trials = 2.5\n"), ConfigError);
}

TEST_CASE("validation happens before any output") {
    auto c = from_text("trials = 0\n");
    std::ostringstream os, log;
    CHECK_THROWS_AS(run_command("bifurcate", c, os, log), ConfigError);
    CHECK(os.str().empty());
    CHECK(log.str().empty());
    CHECK_THROWS_AS(run("analytics", from_text("scheme = sideways\n")), ConfigError);
    CHECK_THROWS_AS(run("converge", from_text("epsilons = 0.1, 0.2\n")), ConfigError);
    CHECK_THROWS_AS(run("teleport", RunConfig{}), ConfigError);
}

TEST_CASE("analytics report") {
    const auto r = run("analytics", from_text("beta1 = -2\nbeta2 = 1\n"));
    CHECK(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["results"]["p_negative"].get<double>() == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(j["results"]["lambda_upper"].get<double>() == doctest::Approx(4.0));
    CHECK(j["results"]["local_time_rate"].is_null());
    CHECK(j["command"] == "analytics");
    CHECK(j["version"].is_string());
    CHECK(j["seed"] == 1);
    CHECK(j["config"]["beta1"] == -2.0);
    CHECK(j["config"].size() == config_keys().size());
}

TEST_CASE("reports do not depend on the worker count") {
    auto c = from_text("beta1 = -2\nbeta2 = 1\ntrials = 64\nseed = 9\n");
    setenv("BIFSIM_THREADS", "1", 1);
    const auto one = run("bifurcate", c);
    setenv("BIFSIM_THREADS", "8", 1);
    const auto eight = run("bifurcate", c);
    unsetenv("BIFSIM_THREADS");
    CHECK(one.status == 0);
    CHECK(one.out == eight.out);
    const auto j = nlohmann::json::parse(one.out);
    CHECK(j["results"]["p_negative"]["n_trials"] == 64);
    CHECK(j["results"]["p_negative"]["theory"].get<double>() == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("asserted tolerances set the exit status") {
    auto c = from_text("beta1 = -1\nbeta2 = 1\ntrials = 50\nassert_se = 1e-9\n");
    const auto r = run("bifurcate", c);
    CHECK(r.status == 1);
    CHECK(r.log.find("FAILED: p_negative") != std::string::npos);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["passed"] == false);
    c.assert_se = 0.0;
    CHECK(run("bifurcate", c).status == 0);
}

TEST_CASE("files are written under the output prefix") {
    const auto dir = std::filesystem::temp_directory_path() / "bifsim_cli_test";
    std::filesystem::create_directories(dir);
    auto c = from_text("horizon = 1\ndt = 0.01\n");
    set_key(c, "out", (dir / "g").string());
    const auto r = run("gen", c);
    CHECK(r.status == 0);
    CHECK(r.out.empty());
    std::ifstream csv(dir / "g_path.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "t,B");
    std::ifstream js(dir / "g.json");
    const auto j = nlohmann::json::parse(js);
    CHECK(j["results"]["n_steps"] == 100);

    // the generated path drives solve
    auto s = from_text("beta1 = -1\nbeta2 = 1\n");
    set_key(s, "driver", (dir / "g_path.csv").string());
    const auto sol = nlohmann::json::parse(run("solve", s).out);
    CHECK(sol["results"]["lipschitz_constant"]["estimate"].get<double>() <= 1.0 + 1e-9);
    std::filesystem::remove_all(dir);
}

TEST_CASE("criterion lists") {
    CHECK(bifsim::parse_criteria("1,3-5,11") == std::vector<int>{1, 3, 4, 5, 11});
    CHECK_THROWS_AS(bifsim::parse_criteria("0"), ConfigError);
    CHECK_THROWS_AS(bifsim::parse_criteria("2-x"), ConfigError);
    CHECK_THROWS_AS(bifsim::parse_criteria("5-3"), ConfigError);
}

TEST_CASE("acceptance subcommand runs a chosen criterion") {
    const auto r = run("acceptance", from_text("criteria = 10\n"));
    CHECK(r.status == 0);
    CHECK(r.log.find("[PASS] 10 ") != std::string::npos);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["results"]["criteria"].size() == 1);
}
