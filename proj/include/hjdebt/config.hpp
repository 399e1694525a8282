#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "hjdebt/asymptotics.hpp"

namespace hjdebt {

struct CostSpec {
    std::string family = "reference";
    double l0 = 0.1;
    double c1 = 0.2;
    double delta0 = 1.0;

    [[nodiscard]] CostModel make() const;
};

struct SimulateSpec {
    std::vector<double> x0;  // empty: uniform grid of grid_points on [0, x*]
    int grid_points = 50;
    int probes = 200;
    int switches = 5;
    unsigned long long seed = 20240611ULL;
    double residual_tol = 1e-4;
};

struct SweepSpec {
    std::vector<double> x_star;  // explicit grid; when empty the geometric one is used
    double lo = 0.0;
    double hi = 0.0;
    double factor = 2.0;
    std::vector<double> probes;

    [[nodiscard]] std::vector<double> grid() const;
};

struct OutputSpec {
    int samples = 401;  // sampled CSV rows
};

/// Everything a run needs. Serializes losslessly through JSON.
struct RunConfig {
    ModelParams model;
    CostSpec costs;
    BuildOptions build;
    SimulateSpec simulate;
    SweepSpec sweep;
    OutputSpec output;

    /// Throws Config on invalid values.
    void check() const;
    /// FNV-1a of the canonical dump.
    [[nodiscard]] std::string hash() const;
    /// Hash of the sections that determine the equilibrium (model, salvage, costs, solver).
    [[nodiscard]] std::string solution_hash() const;
};

void to_json(nlohmann::json& j, const RunConfig& c);
/// Throws Config naming the offending key; unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& j);
/// Parses text; syntax errors report line and column.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

bool operator==(const RunConfig& a, const RunConfig& b);

}  // namespace hjdebt
