#pragma once

#include <iosfwd>

#include "hjdebt/cost_model.hpp"
#include "hjdebt/model_params.hpp"

namespace hjdebt {

/// Minus: costate below the peak (rising debt). Plus: above the peak.
enum class Branch { Minus, Plus };

/// Hamiltonian evaluation with the minimizers and gradient cached.
struct HamiltonianPoint {
    double x = 0.0;
    double xi = 0.0;
    double p = 1.0;
    double u = 0.0;  // optimal repayment fraction
    double v = 0.0;  // optimal devaluation rate
    double value = 0.0;
    double d_x = 0.0;
    double d_xi = 0.0;  // equals the closed-loop drift of x
    double d_p = 0.0;
};

/// Result of the non-throwing minus-branch solve used inside the integrators.
struct MinusRoot {
    bool feasible = false;
    double xi = 0.0;
    double d_xi = 0.0;
    double u = 0.0;
    double v = 0.0;
};

/**
 * @brief Pointwise-minimized Hamiltonian of the borrower.
 *
 * H(x,xi,p) = min_u{L(u) - u xi/p} + min_v{c(v) - v x xi} + ((lambda+r)/p - lambda - mu) x xi.
 * All minimizations are closed form through u_star / v_star.
 */
class Hamiltonian {
public:
    Hamiltonian(ModelParams params, CostModel costs);

    [[nodiscard]] const ModelParams& params() const noexcept { return params_; }
    [[nodiscard]] const CostModel& costs() const noexcept { return costs_; }

    [[nodiscard]] double value(double x, double xi, double p) const;
    [[nodiscard]] HamiltonianPoint point(double x, double xi, double p) const;
    [[nodiscard]] double drift(double x, double xi, double p) const;

    /// Unique maximizer of xi -> H(x, xi, p); requires x > 0.
    [[nodiscard]] double argmax_costate(double x, double p) const;
    /// max over xi of H(x, xi, p).
    [[nodiscard]] double max_value(double x, double p) const;

    /// Root xi of H(x, xi, p) = r*eta on the requested branch.
    [[nodiscard]] double branch_costate(Branch b, double x, double eta, double p) const;
    /// Price slope ((r+lambda+v)p - (r+lambda)) / H_xi at the branch root.
    [[nodiscard]] double branch_price_slope(Branch b, double x, double eta, double p) const;
    /// Derivative of the branch root in eta: r / H_xi.
    [[nodiscard]] double branch_costate_deta(Branch b, double x, double eta, double p) const;

    /// Minus-branch solve that reports infeasibility instead of throwing.
    [[nodiscard]] MinusRoot minus_root(double x, double eta, double p) const;

    /// |H_xi| below this is treated as the singular surface.
    [[nodiscard]] static double singular_threshold(double x) { return 1e-9 * (1.0 + x); }

    /// Hoelder constant of eta -> minus root on [x1, x*] x [p1, 1].
    [[nodiscard]] double holder_constant(double x1, double p1) const;

private:
    ModelParams params_;
    CostModel costs_;
};

/// CSV dump of (xi, H, H_xi) on n points of [0, xi_max].
void write_hamiltonian_curve(std::ostream& os, const Hamiltonian& ham, double x, double p,
                             double xi_max, int n);

}  // namespace hjdebt
