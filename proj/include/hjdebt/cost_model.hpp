#pragma once

#include <functional>
#include <string>
#include <vector>

namespace hjdebt {

/// Scalar map used for cost functions and their derivatives.
using ScalarFn = std::function<double(double)>;

/**
 * @brief User-supplied effort/devaluation costs.
 *
 * The effort cost acts on repayment fractions u in [0,1), the devaluation
 * cost on rates v >= 0. Inverse marginals are optional; when absent they
 * are computed by bisection.
 */
struct CostFunctions {
    ScalarFn effort;
    ScalarFn effort_marginal;
    ScalarFn effort_curvature;
    ScalarFn effort_marginal_inv;  // optional
    ScalarFn deval;
    ScalarFn deval_marginal;
    ScalarFn deval_curvature;
    ScalarFn deval_marginal_inv;  // optional
    double delta0 = 1.0;
};

/// Pair of convex costs. Immutable after construction.
class CostModel {
public:
    CostModel(std::string family, CostFunctions fns);

    /// Closed-form family: effort l0*u - ln(1-u) - u, devaluation c1*v + v^2/2.
    static CostModel reference(double l0, double c1, double delta0 = 1.0);

    [[nodiscard]] const std::string& family() const noexcept { return family_; }
    [[nodiscard]] double delta0() const noexcept { return fns_.delta0; }
    /// Parameters of the reference family (zero for custom models).
    [[nodiscard]] double effort_base() const noexcept { return l0_; }
    [[nodiscard]] double deval_base() const noexcept { return c1_; }

    [[nodiscard]] double effort(double u) const { return fns_.effort(u); }
    [[nodiscard]] double effort_marginal(double u) const { return fns_.effort_marginal(u); }
    [[nodiscard]] double effort_curvature(double u) const { return fns_.effort_curvature(u); }
    /// Inverse of the effort marginal on [effort_marginal(0), inf).
    [[nodiscard]] double effort_marginal_inv(double rho) const;

    [[nodiscard]] double deval(double v) const { return fns_.deval(v); }
    [[nodiscard]] double deval_marginal(double v) const { return fns_.deval_marginal(v); }
    [[nodiscard]] double deval_curvature(double v) const { return fns_.deval_curvature(v); }
    [[nodiscard]] double deval_marginal_inv(double rho) const;
    /// Inverse of the devaluation cost itself (v with deval(v) = y, y >= 0).
    [[nodiscard]] double deval_inv(double y) const;

    [[nodiscard]] double effort_threshold() const { return effort_threshold_; }
    [[nodiscard]] double deval_threshold() const { return deval_threshold_; }

private:
    std::string family_;
    CostFunctions fns_;
    double l0_ = 0.0;
    double c1_ = 0.0;
    double effort_threshold_;
    double deval_threshold_;
};

/// Optimal repayment fraction for marginal value xi at price p.
double u_star(const CostModel& costs, double xi, double p);

/// Optimal devaluation rate at debt ratio x and marginal value xi.
double v_star(const CostModel& costs, double x, double xi);

/// Convex conjugate sup_u {rho*u - effort(u)} over u in [0,1).
double conj_effort(const CostModel& costs, double rho);

/// Convex conjugate sup_v {rho*v - deval(v)} over v >= 0.
double conj_deval(const CostModel& costs, double rho);

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> violations;
};

/// Grid checks of the structural assumptions on the costs; never throws.
ValidationReport validate(const CostModel& costs);

}  // namespace hjdebt
