#pragma once

#include <iosfwd>
#include <vector>

#include "hjdebt/hamiltonian.hpp"

namespace hjdebt {

/**
 * @brief Strategies that hold the debt ratio fixed forever.
 *
 * The planner devaluation rate minimizes
 *   L((r+lambda)(r-mu)x/(r+lambda+v)) + c(v)
 * and the implied price is (r+lambda)/(r+lambda+v).
 */
class ConstantStrategy {
public:
    explicit ConstantStrategy(const Hamiltonian& ham);

    [[nodiscard]] const Hamiltonian& hamiltonian() const noexcept { return ham_; }

    /// Devaluation rate of the cheapest constant strategy at x.
    [[nodiscard]] double devaluation(double x) const;
    /// Implied bond price (r+lambda)/(r+lambda+v).
    [[nodiscard]] double price(double x) const;
    /// Barrier value max_value(x, price(x)) / r.
    [[nodiscard]] double cost(double x) const;
    /// (1/r)[L(u_c) + c(v_c)] with u_c fixed by the stationarity constraint.
    [[nodiscard]] double cost_direct(double x) const;
    /// Closed-form slope (r-mu)/r * p L'(p (r-mu) x), p = price(x).
    [[nodiscard]] double cost_slope(double x) const;

    /// Level where devaluation switches on: (r+lambda)c'(0) = (r-mu)x L'((r-mu)x).
    [[nodiscard]] double devaluation_threshold() const noexcept { return x_deval_; }
    /// Level where devaluation pays at unit price: c'(0) = x L'((r-mu)x).
    [[nodiscard]] double flat_threshold() const noexcept { return x_flat_; }

private:
    double planner_gradient(double x, double v) const;

    const Hamiltonian& ham_;
    double x_deval_;
    double x_flat_;
};

/**
 * @brief Tabulated barrier on a uniform grid with monotone cubic interpolation.
 */
class ConstantStrategyCurve {
public:
    ConstantStrategyCurve(const ConstantStrategy& cs, double x_max, int nodes = 2048);

    [[nodiscard]] double cost(double x) const;
    [[nodiscard]] double x_max() const noexcept { return x_max_; }
    [[nodiscard]] const std::vector<double>& grid() const noexcept { return x_; }
    [[nodiscard]] const std::vector<double>& devaluation() const noexcept { return v_; }
    [[nodiscard]] const std::vector<double>& price() const noexcept { return p_; }
    [[nodiscard]] const std::vector<double>& costs() const noexcept { return w_; }
    [[nodiscard]] const std::vector<double>& slopes() const noexcept { return dw_; }
    [[nodiscard]] double devaluation_threshold() const noexcept { return x_deval_; }
    [[nodiscard]] double flat_threshold() const noexcept { return x_flat_; }

    /// CSV with columns x, v_c, p_c, W, W_prime.
    void write_csv(std::ostream& os) const;

private:
    double x_max_;
    double h_;
    double x_deval_;
    double x_flat_;
    std::vector<double> x_, v_, p_, w_, dw_;
    std::vector<double> tangent_;  // interpolation slopes
};

}  // namespace hjdebt
