#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <vector>

#include "hjdebt/equilibrium.hpp"

namespace hjdebt {

/// Controls as a function of time and state, plus the posted price map.
struct Policy {
    std::function<Controls(double t, double x)> controls;
    std::function<double(double x)> price;
};

/// Feedback controls and price of a built solution.
Policy equilibrium_policy(const EquilibriumSolution& sol);

/// Open-loop controls, constant between switch times.
struct PiecewiseControls {
    std::vector<double> switch_times;  // ascending
    std::vector<Controls> values;      // switch_times.size() + 1 entries

    [[nodiscard]] Controls at(double t) const;
};

struct SimOptions {
    double t_max = 0.0;  // 0: 400 / r
    double rtol = 1e-10;
    double atol = 1e-13;
    /// Touch points; reaching one from below within 1e-9 ends the run as a steady state.
    std::vector<double> steady_levels;
};

enum class EndReason { Bankrupt, Steady, Horizon, Failure };

const char* to_string(EndReason e) noexcept;

struct Trajectory {
    std::vector<double> t, x, u, v, cost, discount;  // cost: running discounted cost
    EndReason end = EndReason::Horizon;
    double t_end = 0.0;
    double bankruptcy_time = std::numeric_limits<double>::infinity();
    int steady_index = -1;  // index into steady_levels, -1 for the origin
    Controls hold;          // controls that keep x fixed after a steady end
    double hold_price = 1.0;
    double cost_acc = 0.0;  // integral of e^{-rt}[L+c] up to t_end
    double log_discount = 0.0;
    double price_acc = 0.0;  // integral of (r+lambda) D up to t_end
};

Trajectory simulate(const Hamiltonian& ham, const Policy& policy, double x0,
                    const SimOptions& opt);

/// J with the bankruptcy term or the stationary tail; tail_bound gets the horizon remainder.
double discounted_cost(const Trajectory& tr, const Hamiltonian& ham,
                       double* tail_bound = nullptr);

/// Bond price functional with the salvage term at bankruptcy.
double price_functional(const Trajectory& tr, const Hamiltonian& ham, double salvage,
                        double* tail_bound = nullptr);

struct PointCheck {
    double x0 = 0.0;
    double J = 0.0, V = 0.0, Psi = 0.0, p = 0.0;
    double res_value = 0.0, res_price = 0.0;
    double phi_drift = 0.0;  // max |phi(t) - phi(0)|
    EndReason end = EndReason::Horizon;
    double bankruptcy_time = 0.0;
    int steady_index = -1;
};

struct ProbeCheck {
    double x0 = 0.0;
    double J = 0.0, V = 0.0;
    double gap = 0.0;           // J - V, must stay >= -1e-6
    double phi_decrease = 0.0;  // largest drop of phi between nodes
};

struct VerifyOptions {
    int probes = 200;
    int switches = 5;
    std::uint64_t seed = 20240611;
    int jobs = 1;
    SimOptions sim;
};

struct VerifyReport {
    std::vector<PointCheck> points;
    std::vector<ProbeCheck> probes;
    double max_res_value = 0.0;
    double max_res_price = 0.0;
    double max_phi_drift = 0.0;
    double worst_probe_gap = std::numeric_limits<double>::infinity();
    double worst_phi_decrease = 0.0;
};

VerifyReport verify_equilibrium(const EquilibriumSolution& sol, const std::vector<double>& x0s,
                                const VerifyOptions& opt = {});

/// CSV columns t, x, u, v, cost, D.
void write_trajectory_csv(std::ostream& os, const Trajectory& tr);

}  // namespace hjdebt
