#include "hjdebt/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "hjdebt/errors.hpp"
#include "hjdebt/io.hpp"
#include "hjdebt/parallel.hpp"
#include "hjdebt/roots.hpp"

namespace hjdebt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double pair_rhs(const ModelParams& m, double x, double p) {
    const double th = m.salvage_at_threshold();
    const double k = (m.discount - m.growth) / (m.discount + m.repayment);
    return th * m.x_bankrupt / x * std::pow((1.0 - p) / (1.0 - th), k);
}

double pair_value(const ModelParams& m, double p) {
    const double th = m.salvage_at_threshold();
    return m.bankruptcy_cost *
           std::pow((1.0 - p) / (1.0 - th), m.discount / (m.discount + m.repayment));
}

// limsup of theta(s) s, used by the liminf bound
double salvage_limsup_product(const SalvageFunction& f) {
    switch (f.kind) {
        case SalvageFunction::Kind::Constant: return f.value > 0.0 ? kInf : 0.0;
        case SalvageFunction::Kind::Inverse: return f.R;
        case SalvageFunction::Kind::Power:
            if (f.exponent < 1.0) return f.scale > 0.0 ? kInf : 0.0;
            return f.exponent == 1.0 ? f.scale : 0.0;
    }
    return kInf;
}

}  // namespace

ExplicitState explicit_pair(const ModelParams& m, double x) {
    const double th = m.salvage_at_threshold();
    if (!(th < 1.0) || !(x > 0.0)) {
        throw Error(ErrorKind::Domain, "explicit_pair needs theta(x*) < 1 and x > 0");
    }
    ExplicitState s;
    double p = th;
    bool ok = false;
    for (int it = 1; it <= 10000; ++it) {
        const double next = 0.5 * p + 0.5 * pair_rhs(m, x, p);
        s.iterations = it;
        if (!(next > 0.0 && next < 1.0)) break;
        if (std::abs(next - p) <= 1e-12 * std::max(1.0, p)) {
            p = next;
            ok = true;
            break;
        }
        p = next;
    }
    if (!ok) {
        // p - rhs(p) is increasing on [0,1): negative at 0, positive at 1
        p = roots::bisect([&](double q) { return q - pair_rhs(m, x, q); }, 0.0, 1.0, 1e-15);
        s.bisection = true;
    }
    s.price = p;
    s.value = pair_value(m, p);
    return s;
}

PairResidual explicit_residual(const ModelParams& m, double x, double value, double price) {
    return {std::abs(value - pair_value(m, price)), std::abs(price - pair_rhs(m, x, price))};
}

double salvage_sup_product(const SalvageFunction& f) {
    switch (f.kind) {
        case SalvageFunction::Kind::Constant: return f.value > 0.0 ? kInf : 0.0;
        case SalvageFunction::Kind::Inverse: return f.R;
        case SalvageFunction::Kind::Power:
            if (f.exponent < 1.0) return f.scale > 0.0 ? kInf : 0.0;
            // theta = 1 up to scale^{1/e}, then scale s^{1-e} decreases
            return std::pow(f.scale, 1.0 / f.exponent);
    }
    return kInf;
}

const char* to_string(Regime r) noexcept {
    return r == Regime::Bounded ? "bounded-Rs" : "ponzi-decay";
}

Regime classify(const SalvageFunction& f) {
    return std::isfinite(salvage_limsup_product(f)) ? Regime::Bounded : Regime::Ponzi;
}

Thresholds thresholds(const ModelParams& m, const CostModel& c) {
    const double rm = m.discount - m.growth;
    const double B = m.bankruptcy_cost;
    const double l0 = c.effort_threshold();
    const double c0 = c.deval_threshold();
    const double vinv = c.deval_inv(m.discount * B);
    Thresholds t;
    t.sup_product = salvage_sup_product(m.salvage);
    const double C1 = t.sup_product;
    t.bounded_level = std::isfinite(C1)
                          ? std::max({4.0, 4.0 * B / l0, 4.0 * C1 * B / c0, 2.0 * C1 * vinv}) / rm
                          : kInf;
    t.gamma = std::min(rm / (2.0 * vinv), rm * c0 / (4.0 * B));
    t.control_level = std::max(4.0 / rm, 4.0 * B / (rm * l0));
    return t;
}

ExplicitState explicit_regime(const ModelParams& m, const CostModel& c, double x) {
    const Thresholds t = thresholds(m, c);
    if (x < t.control_level || x > m.x_bankrupt) {
        throw Error(ErrorKind::RegimeViolated,
                    "no-control regime needs M2 <= x <= x*: x=" + format_double(x) +
                        ", M2=" + format_double(t.control_level));
    }
    const ExplicitState s = explicit_pair(m, x);
    const double rl = m.discount + m.repayment;
    const double slope =
        m.discount * s.price * s.value / ((rl - (m.repayment + m.growth) * s.price) * x);
    if (s.price > t.gamma) {
        throw Error(ErrorKind::RegimeViolated,
                    "price above gamma: p=" + format_double(s.price) +
                        ", gamma=" + format_double(t.gamma));
    }
    if (slope / s.price > c.effort_threshold()) {
        throw Error(ErrorKind::RegimeViolated, "repayment would be active at x=" + format_double(x));
    }
    if (slope * x > c.deval_threshold()) {
        throw Error(ErrorKind::RegimeViolated,
                    "devaluation would be active at x=" + format_double(x));
    }
    return s;
}

EquilibriumSolution build_with_fallback(const ModelParams& m, const CostModel& c,
                                        const BuildOptions& opt, std::string* note) {
    try {
        return EquilibriumSolution::build(m, c, opt);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::RestartStalled) throw;
        if (note) *note = std::string("top arc only: ") + e.what();
        BuildOptions top = opt;
        top.top_arc_only = true;
        return EquilibriumSolution::build(m, c, top);
    }
}

std::vector<double> geometric_grid(double lo, double hi, double factor) {
    std::vector<double> g;
    if (!(lo > 0.0) || !(factor > 1.0)) return g;
    for (double x = lo; x <= hi * (1.0 + 1e-9); x *= factor) g.push_back(x);
    return g;
}

namespace {

// first x >= M2 with p(x) <= gamma; p is nonincreasing
double find_tau(const EquilibriumSolution& sol, const Thresholds& t, double theta) {
    const double xs = sol.x_bankrupt();
    if (!(xs > t.control_level)) return kNaN;
    if (theta >= t.gamma) return xs;
    const double a = std::max(t.control_level, sol.domain_lo() + 1e-9 * (1.0 + xs));
    if (sol.price(a) <= t.gamma) return a;
    return roots::bisect([&](double x) { return sol.price(x) <= t.gamma ? 1.0 : -1.0; }, a, xs,
                  1e-10 * (1.0 + xs));
}

}  // namespace

SweepResult sweep(const ModelParams& base, const CostModel& c, const SweepOptions& opt) {
    SweepResult res;
    res.family = base.salvage.name();
    res.regime = classify(base.salvage);
    res.thr = thresholds(base, c);
    const double R = salvage_limsup_product(base.salvage);
    const double rl = base.discount + base.repayment;
    const double rm = base.discount - base.growth;

    const std::size_t n = opt.grid.size();
    res.levels.resize(n);
    std::vector<std::vector<SweepPoint>> per(n);
    parallel_for(n, opt.jobs, [&](std::size_t i) {
        ModelParams m = base;
        m.x_bankrupt = opt.grid[i];
        SweepLevel& lv = res.levels[i];
        lv.x_bankrupt = m.x_bankrupt;
        lv.salvage = m.salvage_at_threshold();
        lv.tau = kNaN;
        std::optional<EquilibriumSolution> sol;
        try {
            m.check();
            sol.emplace(build_with_fallback(m, c, opt.build, &lv.note));
        } catch (const Error& e) {
            lv.note = std::string(to_string(e.kind())) + ": " + e.what();
            return;
        }
        lv.built = true;
        lv.complete = sol->complete();
        const Thresholds t = thresholds(m, c);
        lv.tau = find_tau(*sol, t, lv.salvage);
        const double B = m.bankruptcy_cost;
        for (double x : opt.probes) {
            if (!(x > sol->domain_lo()) || x >= m.x_bankrupt) continue;
            SweepPoint pt;
            pt.x_bankrupt = m.x_bankrupt;
            pt.x = x;
            const EquilibriumPoint e = sol->eval(x);
            const Controls fb = sol->feedback(x);
            pt.value = e.value;
            pt.price = e.price;
            pt.u = fb.u;
            pt.v = fb.v;
            pt.bound_liminf =
                (std::isfinite(R) && x > R) ? B * std::pow(1.0 - R / x, base.discount / rl) : kNaN;
            pt.bound_e1 = lv.salvage > 0.0
                              ? B * std::pow(x / (lv.salvage * m.x_bankrupt), base.discount / rm)
                              : kInf;
            pt.bound_e2 =
                std::isfinite(lv.tau) ? B * std::pow(x / lv.tau, base.discount * t.gamma / rl) : kNaN;
            try {
                const ExplicitState s = explicit_regime(m, c, x);
                pt.explicit_value = s.value;
                pt.explicit_price = s.price;
            } catch (const Error&) {
                pt.explicit_value = kNaN;
                pt.explicit_price = kNaN;
            }
            per[i].push_back(pt);
        }
    });
    for (auto& v : per) res.points.insert(res.points.end(), v.begin(), v.end());
    return res;
}

namespace {

std::vector<const SweepPoint*> at_probe(const SweepResult& r, double x) {
    std::vector<const SweepPoint*> out;
    for (const auto& p : r.points) {
        if (p.x == x) out.push_back(&p);
    }
    return out;
}

}  // namespace

BoundedReport regime_bounded(const ModelParams& base, const CostModel& c, double x_probe,
                             const std::vector<double>& grid, double tol, int jobs) {
    const Thresholds t = thresholds(base, c);
    if (classify(base.salvage) != Regime::Bounded) {
        throw Error(ErrorKind::Domain, "regime_bounded needs sup theta(s) s < inf");
    }
    if (x_probe < t.bounded_level) {
        throw Error(ErrorKind::Domain, "probe " + format_double(x_probe) +
                                           " below threshold M=" + format_double(t.bounded_level));
    }
    BoundedReport rep;
    rep.probe = x_probe;
    SweepOptions so;
    so.grid = grid;
    so.probes = {x_probe};
    so.jobs = jobs;
    rep.result = sweep(base, c, so);
    const double R = salvage_limsup_product(base.salvage);
    rep.bound = base.bankruptcy_cost *
                std::pow(1.0 - R / x_probe, base.discount / (base.discount + base.repayment));
    const auto pts = at_probe(rep.result, x_probe);
    rep.bound_holds = !pts.empty();
    rep.controls_zero = !pts.empty();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const SweepPoint& p = *pts[i];
        rep.bound_holds = rep.bound_holds && p.value >= rep.bound - tol;
        rep.controls_zero = rep.controls_zero && p.u == 0.0 && p.v == 0.0;
        if (std::isfinite(p.explicit_value)) {
            rep.max_explicit_gap =
                std::max({rep.max_explicit_gap, std::abs(p.value - p.explicit_value),
                          std::abs(p.price - p.explicit_price)});
        }
        if (i > 0) rep.diffs.push_back(std::abs(p.value - pts[i - 1]->value));
    }
    return rep;
}

PonziReport regime_ponzi(const ModelParams& base, const CostModel& c, double x_probe,
                         const std::vector<double>& grid, int jobs) {
    const Thresholds t = thresholds(base, c);
    if (x_probe < t.control_level) {
        throw Error(ErrorKind::Domain, "probe " + format_double(x_probe) +
                                           " below threshold M2=" + format_double(t.control_level));
    }
    PonziReport rep;
    rep.probe = x_probe;
    SweepOptions so;
    so.grid = grid;
    so.probes = {x_probe};
    so.jobs = jobs;
    rep.result = sweep(base, c, so);
    const auto pts = at_probe(rep.result, x_probe);
    rep.decreasing = pts.size() >= 2;
    rep.e1_holds = !pts.empty();
    rep.e2_holds = !pts.empty();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const SweepPoint& p = *pts[i];
        if (i > 0) rep.decreasing = rep.decreasing && p.value < pts[i - 1]->value;
        rep.e1_holds = rep.e1_holds && p.value <= p.bound_e1;
        rep.e2_holds = rep.e2_holds && (!std::isfinite(p.bound_e2) || p.value <= p.bound_e2);
    }
    return rep;
}

DevaluationConditions devaluation_conditions(const ModelParams& m, const CostModel& c) {
    const double r = m.discount;
    const double rm = m.discount - m.growth;
    const double B = m.bankruptcy_cost;
    const double l0 = c.effort_threshold();
    const double c0 = c.deval_threshold();
    DevaluationConditions d;
    d.level_threshold = (l0 + B * r) / (l0 * rm);
    d.cost_threshold = 2.0 * rm * c0 / r;
    d.product_threshold = 2.0 * (r + m.repayment) * c0 / rm * (1.0 / (r * B) + 1.0 / l0);
    d.level_ok = m.x_bankrupt > d.level_threshold && B >= d.cost_threshold;
    d.product_ok = m.salvage_at_threshold() * m.x_bankrupt > d.product_threshold;
    return d;
}

DevaluationWitness devaluation_active(const ModelParams& m, const CostModel& c, int grid,
                                      const BuildOptions& opt) {
    DevaluationWitness w;
    w.conditions = devaluation_conditions(m, c);
    const EquilibriumSolution sol = build_with_fallback(m, c, opt, &w.note);
    w.complete = sol.complete();
    const double lo = sol.domain_lo();
    const double xs = m.x_bankrupt;
    for (int i = 1; i <= grid; ++i) {
        const double x = lo + (xs - lo) * i / grid;
        const double v = sol.feedback(x).v;
        if (v > w.v) {
            w.v = v;
            w.x = x;
            w.found = true;
        }
    }
    if (w.conditions.hold() && !w.found) {
        throw Error(ErrorKind::WitnessNotFound,
                    "devaluation conditions hold but v* = 0 on the scanned grid");
    }
    return w;
}

void write_sweep_csv(std::ostream& os, const SweepResult& r) {
    CsvWriter csv(os);
    csv.comment("family", r.family);
    csv.comment("regime", to_string(r.regime));
    csv.header({"x_star", "x", "V", "p", "u", "v", "regime", "bound_liminf", "bound_e1", "bound_e2",
                "explicit_V", "explicit_p"});
    for (const auto& p : r.points) {
        csv.raw_row({format_double(p.x_bankrupt), format_double(p.x), format_double(p.value),
                     format_double(p.price), format_double(p.u), format_double(p.v),
                     to_string(r.regime), format_double(p.bound_liminf), format_double(p.bound_e1),
                     format_double(p.bound_e2), format_double(p.explicit_value),
                     format_double(p.explicit_price)});
    }
}

}  // namespace hjdebt
