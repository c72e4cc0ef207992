#include "toadwave/config.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace toadwave;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    const fs::path log = fs::temp_directory_path() / "toadwave_cli_test.log";
    const std::string cmd =
        std::string(TOADWAVE_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    RunResult res;
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    res.output = ss.str();
    return res;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_json(const fs::path& p, const json& j) {
    std::ofstream out(p);
    out << j.dump(2);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("config round trip and defaults") {
    const RunConfig def;
    const RunConfig back = config_from_json(config_to_json(def));
    CHECK(back.params.alpha == def.params.alpha);
    CHECK(back.slab.a_list == def.slab.a_list);
    CHECK(back.evolution.thresholds == def.evolution.thresholds);
    CHECK(back.analysis.seed == def.analysis.seed);

    CHECK_THROWS_AS(config_from_json(json{{"bogus", 1}}), std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(json{{"params", {{"theta_min", 0.0}}}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(json{{"slab", {{"epsilon", 0.5}}}}),
                    std::invalid_argument);
}

TEST_CASE("spectral subcommand: constant-diffusivity anchor") {
    const fs::path dir = fresh_dir("tw_cli_tau0");
    const RunResult res = run_cli("spectral --tau 0 --out " + dir.string());
    REQUIRE(res.exit_code == 0);
    const json rep = json::parse(slurp(dir / "minspeed.json"));
    CHECK(std::abs(rep["c_star"].get<double>() - 2.0) / 2.0 < 1e-6);
    CHECK(std::abs(rep["lambda_star"].get<double>() - 1.0) < 1e-6);
    CHECK(rep["schema_version"] == kSchemaVersion);
    CHECK(rep.contains("config"));
    CHECK(fs::exists(dir / "dispersion.csv"));
}

TEST_CASE("spectral subcommand: default run reports healthy residuals") {
    const fs::path dir = fresh_dir("tw_cli_tau1");
    const RunResult res = run_cli("spectral --out " + dir.string());
    REQUIRE(res.exit_code == 0);
    const json rep = json::parse(slurp(dir / "minspeed.json"));
    CHECK(rep["residuals"]["R2"].get<double>() > 0.0);
    CHECK(rep["residuals"]["R6"].get<double>() > 0.0);
    CHECK(rep["residuals"]["R1"].get<double>() <= 1e-6);
}

TEST_CASE("malformed config exits with code 1 naming the invariant") {
    const fs::path dir = fresh_dir("tw_cli_badcfg");
    write_json(dir / "cfg.json", json{{"params", {{"theta_min", 0.0}}}});
    const RunResult res =
        run_cli("spectral --config " + (dir / "cfg.json").string());
    CHECK(res.exit_code == 1);
    CHECK(res.output.find("theta_min") != std::string::npos);
}

TEST_CASE("a lambda window that misses the minimum exits with code 2") {
    const fs::path dir = fresh_dir("tw_cli_bracket");
    write_json(dir / "cfg.json",
               json{{"spectral", {{"lambda_lo", 5.0}, {"lambda_hi", 20.0}}},
                    {"output_dir", dir.string()}});
    const RunResult res =
        run_cli("spectral --tau 0 --config " + (dir / "cfg.json").string());
    CHECK(res.exit_code == 2);
}

TEST_CASE("evolve window overflow exits with code 2") {
    const fs::path dir = fresh_dir("tw_cli_overflow");
    write_json(dir / "cfg.json",
               json{{"evolution",
                     {{"x_max", 200.0},
                      {"n_x", 501},
                      {"n_theta", 9},
                      {"dt", 0.05},
                      {"t_end", 12.0},
                      {"initial_mass_width", 198.0}}},
                    {"output_dir", dir.string()}});
    const RunResult res = run_cli("evolve --config " + (dir / "cfg.json").string());
    CHECK(res.exit_code == 2);
    CHECK(res.output.find("window") != std::string::npos);
}

TEST_CASE("slab subcommand writes solution files and a convergence report") {
    const fs::path dir = fresh_dir("tw_cli_slab");
    write_json(dir / "cfg.json",
               json{{"slab",
                     {{"a_list", {10.0, 20.0}},
                      {"n_xi_per_unit", 4},
                      {"n_theta", 21}}},
                    {"output_dir", dir.string()}});
    const RunResult res = run_cli("slab --config " + (dir / "cfg.json").string());
    REQUIRE(res.exit_code == 0);
    for (const char* f : {"slab_a10.json", "slab_a10_mu.csv", "slab_a10_nu.csv",
                          "slab_a20.json", "slab_a20_mu.csv", "slab_a20_nu.csv",
                          "convergence.json"})
        CHECK(fs::exists(dir / f));
    const json conv = json::parse(slurp(dir / "convergence.json"));
    REQUIRE(conv["speeds"].size() == 2);
    CHECK(conv["speeds"][1]["gap_to_c_star"].get<double>() <
          conv["speeds"][0]["gap_to_c_star"].get<double>());
    CHECK(conv["limits"]["m_lower"].get<double>() > 0.0);
}

TEST_CASE("evolve in the conservative regime reports a tiny mass drift") {
    const fs::path dir = fresh_dir("tw_cli_mass");
    write_json(dir / "cfg.json",
               json{{"params", {{"r", 0.0}}},
                    {"evolution",
                     {{"x_max", 100.0},
                      {"n_x", 1001},
                      {"n_theta", 9},
                      {"dt", 0.02},
                      {"t_end", 10.0},
                      {"initial_mass_width", 30.0}}},
                    {"output_dir", dir.string()}});
    const RunResult res = run_cli("evolve --config " + (dir / "cfg.json").string());
    REQUIRE(res.exit_code == 0);
    const json rep = json::parse(slurp(dir / "evolve_summary.json"));
    CHECK(rep["mass_drift_per_unit_time"].get<double>() <= 1e-8);
    CHECK(!rep.contains("edge"));
}

TEST_CASE("verify --only restricts the suite and reports are deterministic") {
    const fs::path dir = fresh_dir("tw_cli_verify");
    const RunResult res = run_cli("verify --only grid --out " + dir.string());
    REQUIRE(res.exit_code == 0);
    const std::string first = slurp(dir / "verify.json");
    const json rep = json::parse(first);
    CHECK(rep["all_passed"].get<bool>());
    CHECK(rep["checks"].size() > 0);
    for (const auto& chk : rep["checks"])
        CHECK(chk["id"].get<std::string>().rfind("grid.", 0) == 0);

    const RunResult res2 = run_cli("verify --only grid --out " + dir.string());
    REQUIRE(res2.exit_code == 0);
    CHECK(slurp(dir / "verify.json") == first);   // byte-identical rerun
}

TEST_CASE("an injected fault makes verify exit with code 4 naming the check") {
    const fs::path dir = fresh_dir("tw_cli_fault");
    const RunResult res = run_cli(
        "verify --only spectral --inject-fault spectral.relations.rel1 --out " +
        dir.string());
    CHECK(res.exit_code == 4);
    CHECK(res.output.find("[FAIL] spectral.relations.rel1") != std::string::npos);
    CHECK(res.output.find("rel1") != std::string::npos);
}
