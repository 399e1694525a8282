#include "hjdebt/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "hjdebt/dopri.hpp"
#include "hjdebt/errors.hpp"
#include "hjdebt/io.hpp"
#include "hjdebt/parallel.hpp"

namespace hjdebt {

const char* to_string(EndReason e) noexcept {
    switch (e) {
        case EndReason::Bankrupt: return "bankrupt";
        case EndReason::Steady: return "steady";
        case EndReason::Horizon: return "horizon";
        case EndReason::Failure: return "failure";
    }
    return "unknown";
}

Policy equilibrium_policy(const EquilibriumSolution& sol) {
    Policy p;
    p.controls = [&sol](double, double x) { return sol.feedback(x); };
    p.price = [&sol](double x) { return sol.price(x); };
    return p;
}

Controls PiecewiseControls::at(double t) const {
    const auto it = std::upper_bound(switch_times.begin(), switch_times.end(), t);
    return values[static_cast<std::size_t>(it - switch_times.begin())];
}

namespace {

struct Dynamics {
    const Hamiltonian& ham;
    const Policy& policy;

    double r() const { return ham.params().discount; }

    Controls controls(double t, double x) const {
        const double xs = ham.params().x_bankrupt;
        const double xx = std::clamp(x, 0.0, xs);
        Controls c = policy.controls(t, xx);
        if (xx <= 0.0) c.u = 0.0;  // nothing left to repay
        c.u = std::clamp(c.u, 0.0, 1.0 - 1e-12);
        c.v = std::max(c.v, 0.0);
        return c;
    }

    double drift(double x, const Controls& c, double p) const {
        const auto& m = ham.params();
        const double xx = std::max(x, 0.0);
        const double d = ((m.repayment + m.discount) / p - m.repayment - m.growth - c.v) * xx -
                         c.u / p;
        return (xx <= 0.0 && d < 0.0) ? 0.0 : d;
    }

    double price(double x) const {
        return policy.price(std::clamp(x, 0.0, ham.params().x_bankrupt));
    }
};

void record(Trajectory& tr, const Dynamics& dyn, double t, const ode::State<4>& y) {
    const Controls c = dyn.controls(t, y[0]);
    tr.t.push_back(t);
    tr.x.push_back(y[0]);
    tr.u.push_back(c.u);
    tr.v.push_back(c.v);
    tr.cost.push_back(y[1]);
    tr.discount.push_back(std::exp(y[2]));
}

}  // namespace

Trajectory simulate(const Hamiltonian& ham, const Policy& policy, double x0,
                    const SimOptions& opt) {
    const auto& m = ham.params();
    const double r = m.discount;
    const double rl = m.discount + m.repayment;
    const double xs = m.x_bankrupt;
    const double t_max = opt.t_max > 0.0 ? opt.t_max : 400.0 / r;
    const Dynamics dyn{ham, policy};
    const auto& costs = ham.costs();

    Trajectory tr;
    auto hold_at = [&](double level, int idx) {
        tr.end = EndReason::Steady;
        tr.steady_index = idx;
        const double p = dyn.price(level);
        Controls c = dyn.controls(tr.t_end, level);
        c.u = std::max(0.0, level * (rl - p * (m.repayment + m.growth + c.v)));
        tr.hold = c;
        tr.hold_price = p;
    };

    // target level: smallest touch point above x0
    double level = -1.0;
    int level_idx = -1;
    for (std::size_t k = 0; k < opt.steady_levels.size(); ++k) {
        const double lk = opt.steady_levels[k];
        if (lk >= x0 - 1e-9 && (level < 0.0 || lk < level)) {
            level = lk;
            level_idx = static_cast<int>(k);
        }
    }

    ode::State<4> y0{x0, 0.0, 0.0, 0.0};
    record(tr, dyn, 0.0, y0);
    if (x0 >= xs) {
        tr.end = EndReason::Bankrupt;
        tr.bankruptcy_time = 0.0;
        return tr;
    }
    if (!opt.steady_levels.empty() && x0 <= 0.0) {
        hold_at(0.0, -1);
        return tr;
    }
    if (level_idx >= 0 && std::abs(x0 - level) <= 1e-9) {
        hold_at(level, level_idx);
        return tr;
    }

    ode::Rhs<4> rhs = [&](double t, const ode::State<4>& y, ode::State<4>& dy) {
        const Controls c = dyn.controls(t, y[0]);
        const double p = dyn.price(y[0]);
        if (!(p > 0.0)) return ode::RhsStatus::Infeasible;
        dy[0] = dyn.drift(y[0], c, p);
        dy[1] = std::exp(-r * t) * (costs.effort(c.u) + costs.deval(c.v));
        dy[2] = -(rl + c.v);
        dy[3] = rl * std::exp(y[2]);
        return ode::RhsStatus::Ok;
    };
    std::vector<ode::EventFn<4>> events;
    events.push_back([xs](double, const ode::State<4>& y) { return y[0] - xs; });
    if (level_idx >= 0) {
        events.push_back(
            [level](double, const ode::State<4>& y) { return y[0] - (level - 1e-9); });
    }
    ode::Options o;
    o.rtol = opt.rtol;
    o.atol = opt.atol;
    o.h_min = 1e-14;
    o.h_init = 1e-3;
    const auto res = ode::integrate<4>(rhs, 0.0, y0, t_max, o, events);

    for (const auto& st : res.solution.steps) {
        const double t1 = std::min(st.t1(), res.solution.t_end);
        record(tr, dyn, t1, st.eval(t1));
    }
    tr.t_end = res.solution.t_end;
    const ode::State<4> yend = res.solution.eval(tr.t_end);
    tr.cost_acc = yend[1];
    tr.log_discount = yend[2];
    tr.price_acc = yend[3];

    switch (res.termination) {
        case ode::Termination::Event:
            if (res.event_index == 0) {
                tr.end = EndReason::Bankrupt;
                tr.bankruptcy_time = tr.t_end;
            } else {
                hold_at(level, level_idx);
            }
            break;
        case ode::Termination::Completed: tr.end = EndReason::Horizon; break;
        default: tr.end = EndReason::Failure; break;
    }
    return tr;
}

double discounted_cost(const Trajectory& tr, const Hamiltonian& ham, double* tail_bound) {
    const auto& m = ham.params();
    const auto& c = ham.costs();
    const double r = m.discount;
    const double disc = std::exp(-r * tr.t_end);
    double tail = 0.0;
    double J = tr.cost_acc;
    switch (tr.end) {
        case EndReason::Bankrupt: J += disc * m.bankruptcy_cost; break;
        case EndReason::Steady: J += disc * (c.effort(tr.hold.u) + c.deval(tr.hold.v)) / r; break;
        default: {
            double sup = 0.0;
            for (std::size_t i = 0; i < tr.u.size(); ++i) {
                sup = std::max(sup, c.effort(tr.u[i]) + c.deval(tr.v[i]));
            }
            tail = disc * sup / r;
        }
    }
    if (tail_bound) *tail_bound = tail;
    return J;
}

double price_functional(const Trajectory& tr, const Hamiltonian& ham, double salvage,
                        double* tail_bound) {
    const auto& m = ham.params();
    const double rl = m.discount + m.repayment;
    const double D = std::exp(tr.log_discount);
    double psi = tr.price_acc;
    double tail = 0.0;
    switch (tr.end) {
        case EndReason::Bankrupt: psi += D * salvage; break;
        case EndReason::Steady: psi += D * rl / (rl + tr.hold.v); break;
        default:
            // limit of the accumulator with the last devaluation rate frozen
            psi += D * rl / (rl + (tr.v.empty() ? 0.0 : tr.v.back()));
            tail = D;
    }
    if (tail_bound) *tail_bound = tail;
    return psi;
}

namespace {

PiecewiseControls draw_probe(std::mt19937_64& rng, int switches, const Controls& anchor,
                             bool near_anchor) {
    std::uniform_real_distribution<double> time(0.0, 60.0);
    std::uniform_real_distribution<double> wide(0.0, 0.3);
    std::uniform_real_distribution<double> jitter(-0.05, 0.05);
    PiecewiseControls pc;
    for (int i = 0; i < switches; ++i) pc.switch_times.push_back(time(rng));
    std::sort(pc.switch_times.begin(), pc.switch_times.end());
    for (int i = 0; i <= switches; ++i) {
        Controls c;
        if (near_anchor) {
            c.u = std::max(0.0, anchor.u + jitter(rng));
            c.v = std::max(0.0, anchor.v + jitter(rng));
        } else {
            c.u = wide(rng);
            c.v = wide(rng);
        }
        pc.values.push_back(c);
    }
    return pc;
}

}  // namespace

VerifyReport verify_equilibrium(const EquilibriumSolution& sol, const std::vector<double>& x0s,
                                const VerifyOptions& opt) {
    const Hamiltonian& ham = sol.hamiltonian();
    const double r = ham.params().discount;
    const double xs = sol.x_bankrupt();
    const double salvage = ham.params().salvage(xs);
    const Policy eq = equilibrium_policy(sol);

    VerifyReport rep;
    rep.points.resize(x0s.size());
    SimOptions sim = opt.sim;
    sim.steady_levels = sol.touch_points();
    parallel_for(x0s.size(), opt.jobs, [&](std::size_t i) {
        const double x0 = x0s[i];
        const Trajectory tr = simulate(ham, eq, x0, sim);
        PointCheck pc;
        pc.x0 = x0;
        pc.J = discounted_cost(tr, ham);
        pc.Psi = price_functional(tr, ham, salvage);
        pc.V = sol.value(x0);
        pc.p = sol.price(x0);
        pc.res_value = std::abs(pc.J - pc.V);
        pc.res_price = std::abs(pc.Psi - pc.p);
        pc.end = tr.end;
        pc.bankruptcy_time = tr.bankruptcy_time;
        pc.steady_index = tr.steady_index;
        for (std::size_t j = 0; j < tr.t.size(); ++j) {
            const double phi =
                tr.cost[j] + std::exp(-r * tr.t[j]) * sol.value(std::clamp(tr.x[j], 0.0, xs));
            pc.phi_drift = std::max(pc.phi_drift, std::abs(phi - pc.V));
        }
        rep.points[i] = pc;
    });

    // probes: draws happen serially so the sample does not depend on jobs
    std::mt19937_64 rng(opt.seed);
    std::vector<std::pair<double, PiecewiseControls>> draws;
    std::vector<double> interior;
    for (double x : x0s) {
        if (x > 0.0 && x < xs) interior.push_back(x);
    }
    if (!interior.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, interior.size() - 1);
        for (int k = 0; k < opt.probes; ++k) {
            const double x0 = interior[pick(rng)];
            draws.emplace_back(x0, draw_probe(rng, opt.switches, sol.feedback(x0), k % 2 == 1));
        }
    }
    rep.probes.resize(draws.size());
    SimOptions probe_sim = opt.sim;
    probe_sim.steady_levels.clear();
    parallel_for(draws.size(), opt.jobs, [&](std::size_t k) {
        const auto& [x0, pcs] = draws[k];
        Policy pol;
        pol.controls = [&pcs](double t, double) { return pcs.at(t); };
        pol.price = eq.price;
        const Trajectory tr = simulate(ham, pol, x0, probe_sim);
        ProbeCheck pr;
        pr.x0 = x0;
        pr.J = discounted_cost(tr, ham);
        pr.V = sol.value(x0);
        pr.gap = pr.J - pr.V;
        double prev = pr.V;
        for (std::size_t j = 0; j < tr.t.size(); ++j) {
            const double phi =
                tr.cost[j] + std::exp(-r * tr.t[j]) * sol.value(std::clamp(tr.x[j], 0.0, xs));
            pr.phi_decrease = std::max(pr.phi_decrease, prev - phi);
            prev = phi;
        }
        rep.probes[k] = pr;
    });

    for (const auto& p : rep.points) {
        rep.max_res_value = std::max(rep.max_res_value, p.res_value);
        rep.max_res_price = std::max(rep.max_res_price, p.res_price);
        rep.max_phi_drift = std::max(rep.max_phi_drift, p.phi_drift);
    }
    for (const auto& p : rep.probes) {
        rep.worst_probe_gap = std::min(rep.worst_probe_gap, p.gap);
        rep.worst_phi_decrease = std::max(rep.worst_phi_decrease, p.phi_decrease);
    }
    return rep;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
    CsvWriter csv(os);
    csv.comment("end", to_string(tr.end));
    csv.header({"t", "x", "u", "v", "cost", "D"});
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
        csv.row({tr.t[i], tr.x[i], tr.u[i], tr.v[i], tr.cost[i], tr.discount[i]});
    }
}

}  // namespace hjdebt
