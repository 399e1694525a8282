#include "hjdebt/equilibrium.hpp"

#include <cmath>

#include "hjdebt/errors.hpp"
#include "hjdebt/io.hpp"

namespace hjdebt {

std::string hypothesis_violation(const ConstantStrategy& cs) {
    const auto& m = cs.hamiltonian().params();
    const double xs = m.x_bankrupt;
    const double w = cs.cost(xs);
    if (!(w > m.bankruptcy_cost)) {
        return "hypothesis W(x*) > B fails: W(x*)=" + format_double(w) +
               ", B=" + format_double(m.bankruptcy_cost);
    }
    const double th = m.salvage_at_threshold();
    const double pc = cs.price(xs);
    if (!(th <= pc)) {
        return "hypothesis theta(x*) <= p_c(x*) fails: theta(x*)=" + format_double(th) +
               ", p_c(x*)=" + format_double(pc);
    }
    return {};
}

EquilibriumSolution::EquilibriumSolution(const ModelParams& params, const CostModel& costs)
    : ham_(std::make_shared<Hamiltonian>(params, costs)),
      cs_(std::make_shared<ConstantStrategy>(*ham_)) {}

EquilibriumSolution EquilibriumSolution::build(const ModelParams& params, const CostModel& costs,
                                               const BuildOptions& opt) {
    const auto rep = validate(costs);
    if (!rep.ok) {
        std::string msg = "cost assumptions fail:";
        for (const auto& v : rep.violations) msg += " " + v + ";";
        throw Error(ErrorKind::HypothesisViolated, msg);
    }
    EquilibriumSolution sol(params, costs);
    if (auto why = hypothesis_violation(*sol.cs_); !why.empty()) {
        throw Error(ErrorKind::HypothesisViolated, why);
    }
    const BackwardSolver solver(*sol.cs_, opt.solver);
    const double xs = params.x_bankrupt;
    BackwardArc top = solver.integrate({xs, params.bankruptcy_cost, params.salvage(xs)});
    if (top.stop != StopReason::HitW && top.stop != StopReason::HitZero) {
        throw Error(ErrorKind::StepFailure, std::string("top arc stopped with ") +
                                                to_string(top.stop) + " at x=" +
                                                format_double(top.x_left) +
                                                " before reaching the barrier");
    }
    const bool touched = top.stop == StopReason::HitW;
    const double x1 = top.x_left;
    sol.arcs_.push_back(std::move(top));
    if (!touched) return sol;

    sol.touch_.push_back(x1);
    if (opt.top_arc_only) {
        sol.complete_ = false;
        return sol;
    }
    double xk = x1;
    for (int guard = 0; guard < 10000; ++guard) {
        EpsLimit lim = solver.eps_limit(xk);
        const double next = lim.left;
        sol.arcs_.push_back(lim.arc);
        sol.restarts_.push_back(std::move(lim));
        if (next <= 0.0) return sol;
        sol.touch_.push_back(next);
        xk = next;
    }
    throw Error(ErrorKind::StepFailure, "too many touch points");
}

EquilibriumSolution EquilibriumSolution::assemble(const ModelParams& params,
                                                  const CostModel& costs,
                                                  std::vector<BackwardArc> arcs,
                                                  std::vector<double> touch_points,
                                                  bool complete) {
    EquilibriumSolution sol(params, costs);
    sol.arcs_ = std::move(arcs);
    sol.touch_ = std::move(touch_points);
    sol.complete_ = complete;
    if (sol.arcs_.empty()) throw Error(ErrorKind::Domain, "assemble: no arcs");
    return sol;
}

std::size_t EquilibriumSolution::arc_index(double x) const {
    for (std::size_t k = 0; k < arcs_.size(); ++k) {
        const double lower = k < touch_.size() ? touch_[k] : 0.0;
        if (x > lower || k + 1 == arcs_.size()) return k;
    }
    return arcs_.size() - 1;
}

EquilibriumPoint EquilibriumSolution::eval(double x) const {
    const double xs = x_bankrupt();
    if (x < 0.0 || x > xs * (1.0 + 1e-14)) {
        throw Error(ErrorKind::Domain, "eval: x outside [0, x*]");
    }
    if (!complete_ && x <= touch_.front()) {
        throw Error(ErrorKind::Domain, "eval: partial solution covers (x1, x*] only");
    }
    x = std::min(x, xs);
    const BackwardArc& arc = arcs_[arc_index(x)];
    EquilibriumPoint out;
    if (x < arc.x_left) {
        // below x_tiny: continue linearly to V(0) = 0
        const auto s = arc.state(arc.x_left);
        out.value = arc.x_left > 0.0 ? s[0] * x / arc.x_left : 0.0;
        out.price = s[1];
        out.slope = arc.value_slope(arc.x_left);
        return out;
    }
    const auto s = arc.state(x);
    out.value = s[0];
    out.price = s[1];
    out.slope = arc.value_slope(x);
    return out;
}

Controls EquilibriumSolution::feedback(double x) const {
    const auto e = eval(x);
    const auto& c = ham_->costs();
    const double slope = std::max(e.slope, 0.0);
    return {u_star(c, slope, e.price), v_star(c, x, slope)};
}

double EquilibriumSolution::semi_equilibrium_point() const {
    return touch_.empty() ? 0.0 : touch_.front();
}

}  // namespace hjdebt
