#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hjdebt/cli.hpp"
#include "hjdebt/config.hpp"
#include "hjdebt/errors.hpp"
#include "json.hpp"

using namespace hjdebt;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = HJDEBT_SOURCE_DIR;

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("hjdebt_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "hjdebt");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

fs::path write_file(const fs::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
    return p;
}

const std::string kSmallSimulate = R"({
  "model": { "x_star": 2.0, "bankruptcy_cost": 0.11 },
  "salvage": { "family": "constant", "value": 0.6 },
  "costs": { "family": "reference", "l0": 0.1, "c1": 0.2, "delta0": 1.0 },
  "simulate": { "grid_points": 6, "probes": 8, "switches": 3 },
  "output": { "samples": 41 }
})";

}  // namespace

TEST_CASE("solve writes stamped outputs", "[cli]") {
    const auto dir = scratch("solve");
    const auto r = run({"solve", "--config", (kSource / "configs/reference.json").string(), "--out",
                        dir.string()});
    REQUIRE(r.code == kExitOk);
    for (const char* f : {"solution.json", "samples.csv", "barrier.csv", "summary.txt"}) {
        CHECK(fs::exists(dir / f));
    }
    const auto sol = nlohmann::json::parse(slurp(dir / "solution.json"));
    CHECK(sol.contains("version"));
    CHECK(sol.contains("config_hash"));
    CHECK(std::abs(sol["semi_equilibrium_point"].get<double>() - 1.270754914029) < 1e-9);
    const auto csv = slurp(dir / "samples.csv");
    CHECK(csv.rfind("# version: ", 0) == 0);
    CHECK(csv.find("# config_hash: " + sol["config_hash"].get<std::string>()) != std::string::npos);
    CHECK(csv.find("x,V,p,u,v,W,arc") != std::string::npos);
    const auto summary = slurp(dir / "summary.txt");
    CHECK(summary.find("N0=") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "error.json"));
}

TEST_CASE("hypothesis failure exits 3 with a named inequality", "[cli]") {
    const auto dir = scratch("hyp");
    const auto r = run({"solve", "--config", (kSource / "configs/hypothesis_fails.json").string(),
                        "--out", dir.string()});
    CHECK(r.code == kExitHypothesis);
    const auto e = nlohmann::json::parse(slurp(dir / "error.json"));
    CHECK(e["error"] == "HypothesisViolated");
    CHECK(e["exit_code"] == 3);
    CHECK(e["message"].get<std::string>().find("W(x*) > B") != std::string::npos);
}

TEST_CASE("config errors exit 2", "[cli]") {
    const auto dir = scratch("cfg");
    const auto bad = write_file(dir / "bad.json", "{\n  \"model\": { \"x_star\": 2.0,, }\n}\n");
    auto r = run({"solve", "--config", bad.string(), "--out", (dir / "o1").string()});
    CHECK(r.code == kExitConfig);
    CHECK(r.err.find("line 2") != std::string::npos);

    const auto unknown = write_file(dir / "unknown.json", R"({"model": {"x_stra": 2.0}})");
    r = run({"solve", "--config", unknown.string(), "--out", (dir / "o2").string()});
    CHECK(r.code == kExitConfig);
    CHECK(r.err.find("model.x_stra") != std::string::npos);
    CHECK(fs::exists(dir / "o2" / "error.json"));

    r = run({"solve", "--config", (dir / "missing.json").string(), "--out", (dir / "o3").string()});
    CHECK(r.code == kExitConfig);
    r = run({"solve"});
    CHECK(r.code == kExitConfig);
    r = run({"frobnicate"});
    CHECK(r.code == kExitConfig);
    r = run({"solve", "--config", (kSource / "configs/reference.json").string(), "--jobs", "0"});
    CHECK(r.code == kExitConfig);
}

TEST_CASE("simulate reports both equilibrium conditions", "[cli]") {
    const auto dir = scratch("sim");
    const auto cfg = write_file(dir / "cfg.json", kSmallSimulate);
    const auto r = run({"simulate", "--config", cfg.string(), "--out", (dir / "o").string(),
                        "--x0", "0.5,1.6"});
    REQUIRE(r.code == kExitOk);
    CHECK(fs::exists(dir / "o" / "trajectory_000.csv"));
    CHECK(fs::exists(dir / "o" / "trajectory_001.csv"));
    const auto report = slurp(dir / "o" / "report.txt");
    CHECK(report.find("steady state at x_1=") != std::string::npos);
    CHECK(report.find("bankruptcy at T_b=") != std::string::npos);
    const auto v = nlohmann::json::parse(slurp(dir / "o" / "verification.json"));
    CHECK(v.contains("config_hash"));

    // reuse a stored solution
    REQUIRE(run({"solve", "--config", cfg.string(), "--out", (dir / "s").string()}).code == kExitOk);
    const auto r2 = run({"simulate", "--config", cfg.string(), "--out", (dir / "o2").string(),
                         "--x0", "0.5,1.6", "--solution", (dir / "s" / "solution.json").string()});
    CHECK(r2.code == kExitOk);
    CHECK(slurp(dir / "o" / "verification.json") == slurp(dir / "o2" / "verification.json"));
}

TEST_CASE("sweep tags regimes and tolerates an empty grid", "[cli]") {
    const auto dir = scratch("sweep");
    const auto cfg = write_file(dir / "p.json", R"({
      "model": { "x_star": 200.0, "bankruptcy_cost": 0.09 },
      "salvage": { "family": "power", "scale": 0.15, "exponent": 0.5 },
      "costs": { "family": "reference", "l0": 0.1, "c1": 0.2, "delta0": 1.0 },
      "sweep": { "x_star": [200.0, 400.0], "probes": [150.0] }
    })");
    auto r = run({"sweep", "--config", cfg.string(), "--out", (dir / "o").string()});
    REQUIRE(r.code == kExitOk);
    CHECK(slurp(dir / "o" / "sweep.csv").find("ponzi-decay") != std::string::npos);

    const auto bcfg = write_file(dir / "b.json", R"({
      "model": { "x_star": 1333.3333333333333, "bankruptcy_cost": 0.09 },
      "salvage": { "family": "inverse", "R": 1.0 },
      "costs": { "family": "reference", "l0": 0.1, "c1": 0.2, "delta0": 1.0 },
      "sweep": { "x_star": [1333.3333333333333], "probes": [266.66666666666667] }
    })");
    r = run({"sweep", "--config", bcfg.string(), "--out", (dir / "b").string()});
    REQUIRE(r.code == kExitOk);
    CHECK(slurp(dir / "b" / "sweep.csv").find("bounded-Rs") != std::string::npos);

    const auto ecfg = write_file(dir / "e.json", R"({
      "model": { "x_star": 200.0, "bankruptcy_cost": 0.09 },
      "salvage": { "family": "power", "scale": 0.15, "exponent": 0.5 },
      "sweep": { "x_star": [], "probes": [150.0] }
    })");
    r = run({"sweep", "--config", ecfg.string(), "--out", (dir / "e").string()});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("warning: sweep grid is empty") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "e" / "sweep.csv"));
}

TEST_CASE("validate-costs", "[cli]") {
    const auto dir = scratch("val");
    auto r = run({"validate-costs", "--config", (kSource / "configs/reference.json").string(),
                  "--out", dir.string()});
    CHECK(r.code == kExitOk);
    const auto j = nlohmann::json::parse(slurp(dir / "cost_validation.json"));
    CHECK(j["ok"] == true);
}

TEST_CASE("config round trip", "[cli]") {
    const RunConfig a = load_config((kSource / "configs/reference.json").string());
    nlohmann::json j;
    to_json(j, a);
    const RunConfig b = parse_config(j.dump());
    CHECK(a == b);
    CHECK(a.hash() == b.hash());
    RunConfig c = b;
    c.model.bankruptcy_cost = 0.12;
    CHECK(c.hash() != a.hash());
}

TEST_CASE("the binary is deterministic across runs and job counts", "[cli]") {
    const auto dir = scratch("det");
    const auto cfg = write_file(dir / "cfg.json", kSmallSimulate);
    const std::string tool = HJDEBT_CLI_PATH;
    for (const char* sub : {"solve", "simulate"}) {
        const auto a = dir / (std::string(sub) + "_a");
        const auto b = dir / (std::string(sub) + "_b");
        const std::string base = tool + " " + sub + " --config " + cfg.string();
        REQUIRE(std::system((base + " --out " + a.string() + " > /dev/null").c_str()) == 0);
        REQUIRE(std::system((base + " --jobs 2 --out " + b.string() + " > /dev/null").c_str()) == 0);
        for (const auto& e : fs::directory_iterator(a)) {
            INFO(e.path().filename().string());
            CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
        }
    }
}
