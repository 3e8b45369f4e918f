#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef ROBUST_COASE_CLI_PATH
#define ROBUST_COASE_CLI_PATH "robust-coase"
#endif

namespace {

using nlohmann::json;

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const std::string out_file = std::string("cli_out_") + std::to_string(::getpid()) + ".tmp";
    const std::string cmd =
        std::string(ROBUST_COASE_CLI_PATH) + " " + args + " > " + out_file + " 2>/dev/null";
    const int rc = std::system(cmd.c_str());
    std::ifstream f(out_file);
    std::stringstream ss;
    ss << f.rdbuf();
    std::remove(out_file.c_str());
    return {WEXITSTATUS(rc), ss.str()};
}

const char* kUniform = R"('{"kind":"uniform","lo":0,"hi":2}')";

}  // namespace

TEST_CASE("cli: robust subcommand emits the uniform equilibrium") {
    const auto r = run_cli(std::string("robust --dist ") + kUniform + " --delta 0.5 --horizon 2");
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.out);
    CHECK(std::abs(j.at("prices").at(0).get<double>() - 0.45) < 1e-8);
    CHECK(std::abs(j.at("prices").at(1).get<double>() - 0.30) < 1e-8);
    CHECK(std::abs(j.at("thresholds").at(0).get<double>() - 1.2) < 1e-8);
    CHECK(std::abs(j.at("thresholds").at(1).get<double>() - 0.6) < 1e-8);
    CHECK(std::abs(j.at("profit").get<double>() - 0.225) < 1e-8);
}

TEST_CASE("cli: press evaluates the pressed cdf") {
    const auto r = run_cli(std::string("press --dist ") + kUniform + " --eval 0.7");
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.out);
    CHECK(std::abs(j.at("g_cdf").get<double>() - 0.7) < 1e-9);
    CHECK(std::abs(j.at("support").at(1).get<double>() - 1.0) < 1e-9);
}

TEST_CASE("cli: solve with --pressed matches robust prices") {
    const auto r =
        run_cli(std::string("solve --dist ") + kUniform + " --delta 0.5 --horizon 2 --pressed");
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.out);
    CHECK(std::abs(j.at("prices").at(0).get<double>() - 0.45) < 1e-8);
    CHECK(j.at("pressed_input").get<bool>());
}

TEST_CASE("cli: compare emits the delta series as CSV") {
    const auto r = run_cli(std::string("compare --dist ") + kUniform + " --delta-grid 0.2:0.6:0.2");
    REQUIRE(r.exit_code == 0);
    std::stringstream ss(r.out);
    std::string line;
    std::getline(ss, line);
    CHECK(line == "delta,baseline_profit,commitment_profit");
    int rows = 0;
    while (std::getline(ss, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 3);
}

TEST_CASE("cli: check flags") {
    const auto r = run_cli(std::string("check --prm --dist '{\"kind\":\"power\",\"n\":8}'"));
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.out);
    CHECK_FALSE(j.at("prm").at("holds").get<bool>());

    const auto r2 = run_cli("check --lipschitz --dist '{\"kind\":\"uniform\",\"lo\":1,\"hi\":2}'");
    REQUIRE(r2.exit_code == 0);
    CHECK(json::parse(r2.out).at("lipschitz").at("holds").get<bool>());
}

TEST_CASE("cli: benchmarks") {
    const auto n = run_cli("benchmarks naive --delta 0.95");
    REQUIRE(n.exit_code == 0);
    const json jn = json::parse(n.out);
    CHECK(jn.at("binds").get<bool>());
    CHECK_FALSE(jn.at("sells").get<bool>());

    const auto d = run_cli("benchmarks discrete --q 0.5 --delta 0.75");
    REQUIRE(d.exit_code == 0);
    CHECK(std::abs(json::parse(d.out).at("profit").get<double>() - 0.1533) < 1e-3);

    const auto c = run_cli(std::string("benchmarks constant-price --dist ") + kUniform +
                           " --delta 0.5 --vstar 0.5");
    REQUIRE(c.exit_code == 0);
    CHECK(std::abs(json::parse(c.out).at("rho").get<double>() - 1.0 / 3.0) < 1e-10);

    const auto g = run_cli(std::string("benchmarks nogap --dist ") + kUniform + " --delta 0.95");
    REQUIRE(g.exit_code == 0);
    CHECK(json::parse(g.out).at("feasible").get<bool>());
}

TEST_CASE("cli: worst-case") {
    const auto r = run_cli(std::string("worst-case --dist ") + kUniform +
                           " --delta 0.5 --prices 0.45,0.30");
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.out);
    CHECK(std::abs(j.at("min_profit").get<double>() - 0.225) < 2e-4);
    CHECK(j.at("feasible").get<bool>());
}

TEST_CASE("cli: simulate with audits, seeded determinism") {
    const std::string base = std::string("simulate --dist ") + kUniform +
                             " --delta 0.5 --horizon 2 --paths 20000 --seed 11";
    const auto a = run_cli(base + " --audit");
    REQUIRE(a.exit_code == 0);
    const json ja = json::parse(a.out);
    CHECK(std::abs(ja.at("profit_mean").get<double>() - 0.225) < 0.01);
    CHECK(ja.at("max_seller_deviation_gain").get<double>() <= 1e-3);
    CHECK(ja.at("max_nature_deviation_drop").get<double>() <= 1e-3);
    CHECK(ja.at("max_buyer_violation").get<double>() <= 1e-6);

    const auto b = run_cli(base);
    CHECK(json::parse(b.out).at("profit_mean").get<double>() ==
          ja.at("profit_mean").get<double>());

    // histogram CSV variant
    const auto h = run_cli(base + " --csv");
    REQUIRE(h.exit_code == 0);
    CHECK(h.out.rfind("t,sales", 0) == 0);
}

TEST_CASE("cli: profile round trip through a file") {
    const std::string pfile = "profile_rt.tmp.json";
    {
        const auto r = run_cli(std::string("simulate --dist ") + kUniform +
                               " --delta 0.5 --horizon 3 --paths 5000 --seed 2 --profile "
                               "'{\"kind\":\"constant-price\",\"v_star\":0.5}' --out " +
                               pfile);
        REQUIRE(r.exit_code == 0);
    }
    std::ifstream f(pfile);
    json emitted;
    f >> emitted;
    std::ofstream pf("profile_only.tmp.json");
    pf << emitted.at("profile").dump();
    pf.close();
    const auto again = run_cli(std::string("simulate --dist ") + kUniform +
                               " --delta 0.5 --horizon 3 --paths 5000 --seed 2 --profile "
                               "@profile_only.tmp.json");
    REQUIRE(again.exit_code == 0);
    CHECK(json::parse(again.out).at("profit_mean").get<double>() ==
          emitted.at("profit_mean").get<double>());
    std::remove(pfile.c_str());
    std::remove("profile_only.tmp.json");
}

TEST_CASE("cli: exit codes") {
    CHECK(run_cli("robust --dist '{bad json' --delta 0.5").exit_code == 2);
    CHECK(run_cli(std::string("robust --dist ") + kUniform + " --delta 1.5").exit_code == 2);
    CHECK(run_cli("frobnicate").exit_code == 2);
    CHECK(run_cli(std::string("robust --dist ") + kUniform + " --delta 0.5 --no-such-flag 1")
              .exit_code == 2);
    // infinite horizon without a gap is a validation failure
    CHECK(run_cli(std::string("robust --dist ") + kUniform + " --delta 0.5 --horizon inf")
              .exit_code == 2);
    // tolerance misconfiguration
    CHECK(run_cli(std::string("solve --dist ") + kUniform + " --delta 0.5 --tol-int -1")
              .exit_code == 2);
    CHECK(run_cli(std::string("solve --dist ") + kUniform + " --delta 0.5 --grid-n 8")
              .exit_code == 2);
    // gap-case infinite horizon with tolerance overrides still succeeds
    CHECK(run_cli("solve --dist '{\"kind\":\"uniform\",\"lo\":1,\"hi\":2}' --delta 0.9 "
                  "--horizon inf --grid-n 257 --out /dev/null")
              .exit_code == 0);
}
