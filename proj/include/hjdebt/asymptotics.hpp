#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hjdebt/equilibrium.hpp"

namespace hjdebt {

/// Value and price of the no-control regime from the implicit algebraic pair.
struct ExplicitState {
    double value = 0.0;
    double price = 0.0;
    int iterations = 0;
    bool bisection = false;
};

/// Solves the implicit pair at x without checking the regime.
ExplicitState explicit_pair(const ModelParams& m, double x);
/// Same, after checking that u = v = 0 is optimal at x. Throws RegimeViolated.
ExplicitState explicit_regime(const ModelParams& m, const CostModel& c, double x);

/// Residuals of the implicit pair at (x, value, price).
struct PairResidual {
    double value = 0.0;
    double price = 0.0;
};
PairResidual explicit_residual(const ModelParams& m, double x, double value, double price);

/// Asymptotic thresholds; sup_product is sup_s theta(s) s (may be infinite).
struct Thresholds {
    double sup_product = 0.0;
    double bounded_level = 0.0;  // M of the bounded regime (inf if sup_product is)
    double gamma = 0.0;          // price level below which controls vanish
    double control_level = 0.0;  // M2, lower end of the no-control test
};
Thresholds thresholds(const ModelParams& m, const CostModel& c);

/// sup_s theta(s) s for the salvage family.
double salvage_sup_product(const SalvageFunction& f);

enum class Regime { Bounded, Ponzi };
const char* to_string(Regime r) noexcept;
Regime classify(const SalvageFunction& f);

/// Builds the full concatenation; falls back to the top arc on RestartStalled.
EquilibriumSolution build_with_fallback(const ModelParams& m, const CostModel& c,
                                        const BuildOptions& opt, std::string* note = nullptr);

struct SweepPoint {
    double x_bankrupt = 0.0;
    double x = 0.0;
    double value = 0.0;
    double price = 0.0;
    double u = 0.0;
    double v = 0.0;
    double bound_liminf = 0.0;  // B(1 - R/x)^{r/(r+lambda)}
    double bound_e1 = 0.0;      // B(x/(theta x*))^{r/(r-mu)}
    double bound_e2 = 0.0;      // B(x/tau)^{r gamma/(r+lambda)}
    double explicit_value = 0.0;  // NaN when the no-control regime fails
    double explicit_price = 0.0;
};

struct SweepLevel {
    double x_bankrupt = 0.0;
    double salvage = 0.0;
    double tau = 0.0;
    bool built = false;
    bool complete = false;
    std::string note;  // fallback reason or build error
};

struct SweepResult {
    std::string family;
    Regime regime = Regime::Bounded;
    Thresholds thr;
    std::vector<SweepLevel> levels;
    std::vector<SweepPoint> points;  // levels-major, probes-minor
};

struct SweepOptions {
    std::vector<double> grid;    // bankruptcy levels
    std::vector<double> probes;  // debt ratios; skipped where x >= x*
    BuildOptions build;
    int jobs = 1;
};

/// Parallel map over the grid; a failed level keeps its note and has no points.
SweepResult sweep(const ModelParams& base, const CostModel& c, const SweepOptions& opt);

/// Geometric grid lo, 2 lo, 4 lo, ... up to hi (inclusive within 1e-9).
std::vector<double> geometric_grid(double lo, double hi, double factor = 2.0);

struct BoundedReport {
    SweepResult result;
    double probe = 0.0;
    double bound = 0.0;
    bool bound_holds = false;     // V >= bound - tol at every built level
    bool controls_zero = false;   // u = v = 0 at every probe
    double max_explicit_gap = 0.0;
    std::vector<double> diffs;    // successive |V_{k+1} - V_k|
};
BoundedReport regime_bounded(const ModelParams& base, const CostModel& c, double x_probe,
                             const std::vector<double>& grid, double tol = 1e-3, int jobs = 1);

struct PonziReport {
    SweepResult result;
    double probe = 0.0;
    bool decreasing = false;
    bool e1_holds = false;
    bool e2_holds = false;
};
PonziReport regime_ponzi(const ModelParams& base, const CostModel& c, double x_probe,
                         const std::vector<double>& grid, int jobs = 1);

struct DevaluationConditions {
    double level_threshold = 0.0;    // x* must exceed this
    double cost_threshold = 0.0;     // B must be at least this
    double product_threshold = 0.0;  // theta(x*) x* must exceed this
    bool level_ok = false;
    bool product_ok = false;
    [[nodiscard]] bool hold() const { return level_ok && product_ok; }
};
DevaluationConditions devaluation_conditions(const ModelParams& m, const CostModel& c);

struct DevaluationWitness {
    DevaluationConditions conditions;
    bool found = false;
    double x = 0.0;
    double v = 0.0;
    bool complete = false;
    std::string note;
};
/// Scans v* on `grid` points of the covered domain. Throws WitnessNotFound
/// when the conditions hold and no point has v* > 0.
DevaluationWitness devaluation_active(const ModelParams& m, const CostModel& c, int grid = 1000,
                                      const BuildOptions& opt = {});

/// Columns x_star, x, V, p, u, v, regime, bound_liminf, bound_e1, bound_e2,
/// explicit_V, explicit_p.
void write_sweep_csv(std::ostream& os, const SweepResult& r);

}  // namespace hjdebt
