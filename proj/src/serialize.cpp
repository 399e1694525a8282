#include "hjdebt/serialize.hpp"

#include <cmath>

#include "hjdebt/errors.hpp"
#include "hjdebt/io.hpp"

namespace hjdebt {

using nlohmann::json;

namespace {

// JSON has no inf/nan; those become null
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json state_json(const ode::State<4>& s) { return json::array({s[0], s[1], s[2], s[3]}); }

ode::State<4> state_from(const json& j) {
    if (!j.is_array() || j.size() != 4) throw Error(ErrorKind::Config, "solution: bad state");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

json arc_json(const BackwardArc& a) {
    json steps = json::array();
    for (const auto& st : a.sol.steps) {
        json rc = json::array();
        for (const auto& row : st.rc) rc.push_back(state_json(row));
        steps.push_back({{"t0", st.t0}, {"h", st.h}, {"rc", rc}});
    }
    return {{"terminal",
             {{"x", a.terminal.x}, {"value", a.terminal.value}, {"price", a.terminal.price}}},
            {"x_left", a.x_left},
            {"stop", to_string(a.stop)},
            {"rejected", a.rejected},
            {"t_begin", a.sol.t_begin},
            {"t_end", a.sol.t_end},
            {"y_begin", state_json(a.sol.y_begin)},
            {"steps", steps}};
}

BackwardArc arc_from(const json& j) {
    BackwardArc a;
    const json& t = j.at("terminal");
    a.terminal = {t.at("x").get<double>(), t.at("value").get<double>(),
                  t.at("price").get<double>()};
    a.x_left = j.at("x_left").get<double>();
    a.stop = stop_reason_from_string(j.at("stop").get<std::string>());
    a.rejected = j.at("rejected").get<std::size_t>();
    a.sol.t_begin = j.at("t_begin").get<double>();
    a.sol.t_end = j.at("t_end").get<double>();
    a.sol.y_begin = state_from(j.at("y_begin"));
    for (const auto& s : j.at("steps")) {
        ode::DenseStep<4> st;
        st.t0 = s.at("t0").get<double>();
        st.h = s.at("h").get<double>();
        const json& rc = s.at("rc");
        if (!rc.is_array() || rc.size() != st.rc.size()) {
            throw Error(ErrorKind::Config, "solution: bad dense step");
        }
        for (std::size_t i = 0; i < st.rc.size(); ++i) st.rc[i] = state_from(rc[i]);
        a.sol.steps.push_back(st);
    }
    return a;
}

}  // namespace

StopReason stop_reason_from_string(const std::string& s) {
    for (StopReason r : {StopReason::HitW, StopReason::HitZero, StopReason::Singular,
                         StopReason::QExit, StopReason::StepFailure}) {
        if (s == to_string(r)) return r;
    }
    throw Error(ErrorKind::Config, "solution: unknown stop reason '" + s + "'");
}

json solution_to_json(const EquilibriumSolution& sol) {
    json arcs = json::array();
    for (const auto& a : sol.arcs()) arcs.push_back(arc_json(a));
    json restarts = json::array();
    for (const auto& r : sol.restarts()) {
        restarts.push_back({{"x0", r.x0},
                            {"left", r.left},
                            {"eps", r.eps},
                            {"left_ends", r.left_ends},
                            {"gaps", r.gaps}});
    }
    return {{"complete", sol.complete()},
            {"touch_points", sol.touch_points()},
            {"restarts", restarts},
            {"arcs", arcs}};
}

EquilibriumSolution solution_from_json(const json& j, const ModelParams& m, const CostModel& c) {
    try {
        std::vector<BackwardArc> arcs;
        for (const auto& a : j.at("arcs")) arcs.push_back(arc_from(a));
        return EquilibriumSolution::assemble(m, c, std::move(arcs),
                                             j.at("touch_points").get<std::vector<double>>(),
                                             j.at("complete").get<bool>());
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Config, std::string("solution file: ") + e.what());
    }
}

json verify_report_to_json(const VerifyReport& r) {
    json points = json::array();
    for (const auto& p : r.points) {
        points.push_back({{"x0", p.x0},
                          {"J", p.J},
                          {"V", p.V},
                          {"Psi", p.Psi},
                          {"p", p.p},
                          {"residual_value", p.res_value},
                          {"residual_price", p.res_price},
                          {"phi_drift", p.phi_drift},
                          {"end", to_string(p.end)},
                          {"bankruptcy_time", num(p.bankruptcy_time)},
                          {"steady_index", p.steady_index}});
    }
    json probes = json::array();
    for (const auto& p : r.probes) {
        probes.push_back({{"x0", p.x0},
                          {"J", p.J},
                          {"V", p.V},
                          {"gap", p.gap},
                          {"phi_decrease", p.phi_decrease}});
    }
    return {{"max_residual_value", r.max_res_value},
            {"max_residual_price", r.max_res_price},
            {"max_phi_drift", r.max_phi_drift},
            {"worst_probe_gap", num(r.worst_probe_gap)},
            {"worst_phi_decrease", r.worst_phi_decrease},
            {"points", points},
            {"probes", probes}};
}

json sweep_to_json(const SweepResult& r) {
    json levels = json::array();
    for (const auto& l : r.levels) {
        levels.push_back({{"x_star", l.x_bankrupt},
                          {"salvage", l.salvage},
                          {"tau", num(l.tau)},
                          {"built", l.built},
                          {"complete", l.complete},
                          {"note", l.note}});
    }
    json points = json::array();
    for (const auto& p : r.points) {
        points.push_back({{"x_star", p.x_bankrupt},
                          {"x", p.x},
                          {"V", p.value},
                          {"p", p.price},
                          {"u", p.u},
                          {"v", p.v},
                          {"bound_liminf", num(p.bound_liminf)},
                          {"bound_e1", num(p.bound_e1)},
                          {"bound_e2", num(p.bound_e2)},
                          {"explicit_V", num(p.explicit_value)},
                          {"explicit_p", num(p.explicit_price)}});
    }
    return {{"family", r.family},
            {"regime", to_string(r.regime)},
            {"thresholds",
             {{"sup_product", num(r.thr.sup_product)},
              {"M", num(r.thr.bounded_level)},
              {"gamma", r.thr.gamma},
              {"M2", r.thr.control_level}}},
            {"levels", levels},
            {"points", points}};
}

}  // namespace hjdebt
