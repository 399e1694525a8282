#pragma once

#include <memory>
#include <vector>

#include "hjdebt/backward_solver.hpp"

namespace hjdebt {

struct BuildOptions {
    SolverOptions solver;
    /// Stop after the first arc; the solution then covers (x1, x*] only.
    bool top_arc_only = false;
};

struct EquilibriumPoint {
    double value = 0.0;
    double price = 1.0;
    double slope = 0.0;  // right derivative of the value
};

struct Controls {
    double u = 0.0;
    double v = 0.0;
};

/**
 * @brief Value and price maps assembled from backward arcs.
 *
 * arcs()[0] covers (x1, x*], arcs()[k] covers (x_{k+1}, x_k] with x_k the
 * k-th touch point; the last arc reaches 0. Immutable once built.
 */
class EquilibriumSolution {
public:
    /// Throws HypothesisViolated, RestartStalled, NonCauchy or StepFailure.
    static EquilibriumSolution build(const ModelParams& params, const CostModel& costs,
                                     const BuildOptions& opt = {});
    /// Reassembles a solution from stored arcs (deserialization).
    static EquilibriumSolution assemble(const ModelParams& params, const CostModel& costs,
                                        std::vector<BackwardArc> arcs,
                                        std::vector<double> touch_points, bool complete);

    [[nodiscard]] EquilibriumPoint eval(double x) const;
    [[nodiscard]] double value(double x) const { return eval(x).value; }
    [[nodiscard]] double price(double x) const { return eval(x).price; }
    [[nodiscard]] Controls feedback(double x) const;
    /// First touch point; 0 when the top arc reaches zero without touching.
    [[nodiscard]] double semi_equilibrium_point() const;

    [[nodiscard]] const std::vector<double>& touch_points() const noexcept { return touch_; }
    [[nodiscard]] const std::vector<BackwardArc>& arcs() const noexcept { return arcs_; }
    [[nodiscard]] const std::vector<EpsLimit>& restarts() const noexcept { return restarts_; }
    [[nodiscard]] std::size_t arc_index(double x) const;
    /// Lower end of the covered domain (0 when complete).
    [[nodiscard]] double domain_lo() const noexcept { return complete_ ? 0.0 : touch_.front(); }
    [[nodiscard]] bool complete() const noexcept { return complete_; }
    [[nodiscard]] double x_bankrupt() const { return ham_->params().x_bankrupt; }

    [[nodiscard]] const Hamiltonian& hamiltonian() const noexcept { return *ham_; }
    [[nodiscard]] const ConstantStrategy& strategy() const noexcept { return *cs_; }

private:
    EquilibriumSolution(const ModelParams& params, const CostModel& costs);

    std::shared_ptr<Hamiltonian> ham_;
    std::shared_ptr<ConstantStrategy> cs_;
    std::vector<BackwardArc> arcs_;
    std::vector<double> touch_;
    std::vector<EpsLimit> restarts_;
    bool complete_ = true;
};

/// Checks W(x*) > B and theta(x*) <= p_c(x*); returns an empty string when both hold.
std::string hypothesis_violation(const ConstantStrategy& cs);

}  // namespace hjdebt
