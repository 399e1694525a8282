#pragma once

#include <iosfwd>
#include <vector>

#include "hjdebt/constant_strategy.hpp"
#include "hjdebt/dopri.hpp"

namespace hjdebt {

enum class StopReason { HitW, HitZero, Singular, QExit, StepFailure };

const char* to_string(StopReason s) noexcept;

struct SolverOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    double h_min = 1e-12;
    double x_tiny = 1e-12;
    double tol_lim = 1e-8;
    int max_levels = 40;
};

/// Data imposed at the right end of an arc.
struct TerminalData {
    double x = 0.0;
    double value = 0.0;
    double price = 1.0;
};

/**
 * @brief One backward-integrated segment of (value, price) in x.
 *
 * State layout: value Z, price q, y = int dx/H_xi and I = int (r+lambda+v)/H_xi dx,
 * the last two anchored at the terminal point.
 */
struct BackwardArc {
    TerminalData terminal;
    double x_left = 0.0;
    StopReason stop = StopReason::StepFailure;
    ode::DenseSolution<4> sol;
    std::size_t rejected = 0;

    [[nodiscard]] double clamp(double x) const;
    [[nodiscard]] ode::State<4> state(double x) const { return sol.eval(clamp(x)); }
    [[nodiscard]] double value(double x) const { return state(x)[0]; }
    [[nodiscard]] double price(double x) const { return state(x)[1]; }
    /// Derivatives from the dense output polynomial.
    [[nodiscard]] double value_slope(double x) const { return sol.deriv(clamp(x))[0]; }
    [[nodiscard]] double price_slope(double x) const { return sol.deriv(clamp(x))[1]; }
    /// Right ends of all accepted steps, descending in x, terminal first.
    [[nodiscard]] std::vector<double> nodes() const;
};

/// Sequence of regularized restarts at one touch point and its limit.
struct EpsLimit {
    double x0 = 0.0;
    BackwardArc arc;  // finest level, the representative of the limit
    double left = 0.0;
    std::vector<double> eps;
    std::vector<double> left_ends;
    std::vector<double> gaps;  // sup distance between consecutive levels
};

class BackwardSolver {
public:
    BackwardSolver(const ConstantStrategy& cs, SolverOptions opt = {});

    [[nodiscard]] const ConstantStrategy& strategy() const noexcept { return cs_; }
    [[nodiscard]] const SolverOptions& options() const noexcept { return opt_; }

    /// Integrates toward smaller x until the first stopping event.
    [[nodiscard]] BackwardArc integrate(const TerminalData& term, bool stop_at_barrier = true,
                                        double x_stop = -1.0) const;
    /// Arc from (x0, W(x0) - eps, p_c(x0)).
    [[nodiscard]] BackwardArc restart(double x0, double eps) const;
    /// Halving eps until two levels agree to tol_lim; throws NonCauchy / RestartStalled.
    [[nodiscard]] EpsLimit eps_limit(double x0) const;
    /// Lower bound on restart progress, evaluated between the flat level and x_touch.
    [[nodiscard]] double delta_flat_bound(double x_touch, double price_floor) const;

    /// Largest gap in value and price over the common domain of two arcs.
    static double sup_distance(const BackwardArc& a, const BackwardArc& b);

private:
    const ConstantStrategy& cs_;
    SolverOptions opt_;
};

/// CSV columns x, Z, q, Z_prime, q_prime, H_xi, event.
void write_arc_csv(std::ostream& os, const BackwardArc& arc, const Hamiltonian& ham);

}  // namespace hjdebt
