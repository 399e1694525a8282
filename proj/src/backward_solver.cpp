#include "hjdebt/backward_solver.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "hjdebt/errors.hpp"
#include "hjdebt/io.hpp"

namespace hjdebt {

const char* to_string(StopReason s) noexcept {
    switch (s) {
        case StopReason::HitW: return "HitW";
        case StopReason::HitZero: return "HitZero";
        case StopReason::Singular: return "Singular";
        case StopReason::QExit: return "QExitUnitInterval";
        case StopReason::StepFailure: return "StepFailure";
    }
    return "Unknown";
}

double BackwardArc::clamp(double x) const { return std::clamp(x, x_left, terminal.x); }

std::vector<double> BackwardArc::nodes() const {
    std::vector<double> out;
    out.reserve(sol.steps.size() + 1);
    out.push_back(terminal.x);
    for (const auto& s : sol.steps) out.push_back(std::max(s.t1(), x_left));
    return out;
}

BackwardSolver::BackwardSolver(const ConstantStrategy& cs, SolverOptions opt)
    : cs_(cs), opt_(opt) {}

BackwardArc BackwardSolver::integrate(const TerminalData& term, bool stop_at_barrier,
                                      double x_stop) const {
    const Hamiltonian& ham = cs_.hamiltonian();
    const auto& m = ham.params();
    const double rl = m.discount + m.repayment;
    if (!(term.price > 0.0 && term.price <= 1.0)) {
        throw Error(ErrorKind::Domain, "integrate: terminal price outside (0,1]");
    }
    if (!(term.value > 0.0) || !(term.x > 0.0)) {
        throw Error(ErrorKind::Domain, "integrate: need positive terminal value and x");
    }

    ode::Rhs<4> rhs = [&](double x, const ode::State<4>& y, ode::State<4>& dy) {
        const double Z = y[0];
        const double q = y[1];
        if (!(q > 0.0) || q > 1.0 + 1e-12 || !(Z > 0.0) || !(x > 0.0)) {
            return ode::RhsStatus::Infeasible;
        }
        const MinusRoot root = ham.minus_root(x, Z, std::min(q, 1.0));
        if (!root.feasible) return ode::RhsStatus::Infeasible;
        // near x = 0 H_xi is small for scale reasons only; compare with its value at xi = 0
        const double d_xi0 = ((rl / std::min(q, 1.0)) - m.repayment - m.growth) * x;
        if (std::abs(root.d_xi) <= Hamiltonian::singular_threshold(x) &&
            std::abs(root.d_xi) <= 1e-6 * d_xi0) {
            return ode::RhsStatus::Singular;
        }
        dy[0] = root.xi;
        dy[1] = ((rl + root.v) * q - rl) / root.d_xi;
        dy[2] = 1.0 / root.d_xi;
        dy[3] = (rl + root.v) / root.d_xi;
        return ode::RhsStatus::Ok;
    };

    std::vector<ode::EventFn<4>> events;
    // 0: barrier contact; 1: value reaches zero; 2, 3: price leaves (0,1]
    events.push_back([&, stop_at_barrier](double x, const ode::State<4>& y) {
        return stop_at_barrier ? y[0] - cs_.cost(x) : -1.0;
    });
    events.push_back([](double, const ode::State<4>& y) { return -y[0]; });
    events.push_back([](double, const ode::State<4>& y) { return y[1] - (1.0 + 1e-12); });
    events.push_back([](double, const ode::State<4>& y) { return -y[1]; });

    ode::Options o;
    o.rtol = opt_.rtol;
    o.atol = opt_.atol;
    o.h_min = opt_.h_min;
    o.h_init = std::min(1e-4 * term.x, 1e-3);
    const double x_end = x_stop > 0.0 ? x_stop : opt_.x_tiny;

    auto res = ode::integrate<4>(rhs, term.x, {term.value, term.price, 0.0, 0.0}, x_end, o, events);

    BackwardArc arc;
    arc.terminal = term;
    arc.rejected = res.rejected;
    arc.x_left = res.solution.t_end;
    switch (res.termination) {
        case ode::Termination::Completed: arc.stop = StopReason::HitZero; break;
        case ode::Termination::Event:
            arc.stop = res.event_index == 0   ? StopReason::HitW
                       : res.event_index == 1 ? StopReason::HitZero
                                              : StopReason::QExit;
            break;
        case ode::Termination::StepUnderflow:
            arc.stop = res.last_failure == ode::RhsStatus::Singular ? StopReason::Singular
                                                                    : StopReason::StepFailure;
            break;
        case ode::Termination::MaxSteps: arc.stop = StopReason::StepFailure; break;
    }
    arc.sol = std::move(res.solution);
    return arc;
}

BackwardArc BackwardSolver::restart(double x0, double eps) const {
    const double w = cs_.cost(x0);
    if (!(eps > 0.0) || !(eps < w)) {
        throw Error(ErrorKind::Domain, "restart: need 0 < eps < W(x0)");
    }
    return integrate({x0, w - eps, cs_.price(x0)});
}

double BackwardSolver::sup_distance(const BackwardArc& a, const BackwardArc& b) {
    const double lo = std::max(a.x_left, b.x_left);
    const double hi = std::min(a.terminal.x, b.terminal.x);
    if (!(hi > lo)) return 0.0;
    std::vector<double> xs;
    for (const auto* arc : {&a, &b}) {
        for (double x : arc->nodes()) {
            if (x >= lo && x <= hi) xs.push_back(x);
        }
    }
    for (int i = 0; i <= 256; ++i) xs.push_back(lo + (hi - lo) * i / 256.0);
    double d = 0.0;
    for (double x : xs) {
        const auto sa = a.state(x);
        const auto sb = b.state(x);
        d = std::max({d, std::abs(sa[0] - sb[0]), std::abs(sa[1] - sb[1])});
    }
    return d;
}

EpsLimit BackwardSolver::eps_limit(double x0) const {
    EpsLimit out;
    out.x0 = x0;
    const double w0 = cs_.cost(x0);
    const double eps0 = 1e-3 * (1.0 + w0);
    BackwardArc prev;
    bool have_prev = false;
    for (int n = 0; n < opt_.max_levels; ++n) {
        const double eps = std::ldexp(eps0, -n);
        BackwardArc arc = restart(x0, eps);
        if (arc.stop != StopReason::HitW && arc.stop != StopReason::HitZero) {
            std::ostringstream msg;
            msg << "restart at x0=" << format_double(x0) << " (eps=" << format_double(eps)
                << ") stopped with " << to_string(arc.stop) << " at x="
                << format_double(arc.x_left)
                << "; the restarted arc leaves the solvable region next to the barrier";
            throw Error(ErrorKind::RestartStalled, msg.str());
        }
        out.eps.push_back(eps);
        out.left_ends.push_back(arc.x_left);
        if (have_prev) {
            const double gap = sup_distance(prev, arc);
            out.gaps.push_back(gap);
            if (gap < opt_.tol_lim) {
                out.arc = std::move(arc);
                out.left = out.left_ends.back();
                if (out.arc.stop == StopReason::HitZero) out.left = 0.0;
                if (x0 - out.left < 1e-7 * (1.0 + x0)) {
                    throw Error(ErrorKind::RestartStalled,
                                "restart at x0=" + format_double(x0) +
                                    " makes no progress: the arc re-touches the barrier "
                                    "immediately (barrier slope exceeds the peak costate)");
                }
                return out;
            }
        }
        prev = std::move(arc);
        have_prev = true;
    }
    throw Error(ErrorKind::NonCauchy,
                "eps_limit at x0=" + format_double(x0) + " not Cauchy within " +
                    std::to_string(opt_.max_levels) + " levels");
}

double BackwardSolver::delta_flat_bound(double x_touch, double price_floor) const {
    const Hamiltonian& ham = cs_.hamiltonian();
    const double xf = cs_.flat_threshold();
    const double lo = std::min(xf, x_touch);
    const double hi = std::max(xf, x_touch);
    double delta1 = INFINITY;
    for (int i = 0; i <= 400; ++i) {
        const double x = lo + (hi - lo) * i / 400.0;
        delta1 = std::min(delta1, ham.argmax_costate(x, cs_.price(x)) - cs_.cost_slope(x));
    }
    const double C = ham.holder_constant(lo, price_floor);
    const double w1 = cs_.cost_slope(x_touch);
    return std::min(delta1, delta1 * delta1 / (8.0 * C * C * (2.0 * w1 + delta1)));
}

void write_arc_csv(std::ostream& os, const BackwardArc& arc, const Hamiltonian& ham) {
    CsvWriter csv(os);
    csv.comment("stop_reason", to_string(arc.stop));
    csv.header({"x", "Z", "q", "Z_prime", "q_prime", "H_xi", "event"});
    const auto xs = arc.nodes();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double x = xs[i];
        const auto s = arc.state(x);
        const double dz = arc.value_slope(x);
        const double hxi = ham.drift(x, dz, std::min(s[1], 1.0));
        const bool last = i + 1 == xs.size();
        csv.raw_row({format_double(x), format_double(s[0]), format_double(s[1]),
                     format_double(dz), format_double(arc.price_slope(x)), format_double(hxi),
                     last ? to_string(arc.stop) : ""});
    }
}

}  // namespace hjdebt
