#pragma once

#include <string>

namespace hjdebt {

/**
 * @brief Recovery rate of lenders as a function of the bankruptcy level s.
 *
 * constant: value; inverse: min(1, R/s); power: min(1, scale * s^-exponent).
 */
struct SalvageFunction {
    enum class Kind { Constant, Inverse, Power };

    Kind kind = Kind::Constant;
    double value = 0.5;     // constant level
    double R = 1.0;         // inverse family
    double scale = 1.0;     // power family
    double exponent = 0.5;  // power family

    static SalvageFunction constant(double v) { return {Kind::Constant, v, 1.0, 1.0, 0.5}; }
    static SalvageFunction inverse(double R) { return {Kind::Inverse, 0.5, R, 1.0, 0.5}; }
    static SalvageFunction power(double scale, double exponent) {
        return {Kind::Power, 0.5, 1.0, scale, exponent};
    }

    [[nodiscard]] double operator()(double s) const;
    [[nodiscard]] std::string name() const;
};

/// Economic constants of the borrowing problem.
struct ModelParams {
    double discount = 0.05;         // r
    double repayment = 0.2;         // lambda, principal repayment rate
    double growth = 0.02;           // mu, mean income growth
    double x_bankrupt = 10.0;       // bankruptcy threshold
    double bankruptcy_cost = 0.09;  // B
    SalvageFunction salvage = SalvageFunction::constant(0.6);

    /// Throws Domain if r > mu >= 0, lambda >= 0, x* > 0, B > 0, theta(x*) in [0,1] fails.
    void check() const;

    [[nodiscard]] double salvage_at_threshold() const { return salvage(x_bankrupt); }
};

}  // namespace hjdebt
