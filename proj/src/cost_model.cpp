#include "hjdebt/cost_model.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "hjdebt/errors.hpp"
#include "hjdebt/roots.hpp"

namespace hjdebt {

namespace {

constexpr int kInverseMaxIter = 200;

double inverse_tol(double rho) { return 1e-12 * (1.0 + std::abs(rho)); }

}  // namespace

CostModel::CostModel(std::string family, CostFunctions fns)
    : family_(std::move(family)), fns_(std::move(fns)) {
    if (!fns_.effort || !fns_.effort_marginal || !fns_.effort_curvature || !fns_.deval ||
        !fns_.deval_marginal || !fns_.deval_curvature) {
        throw Error(ErrorKind::Domain, "CostModel: missing cost function");
    }
    effort_threshold_ = fns_.effort_marginal(0.0);
    deval_threshold_ = fns_.deval_marginal(0.0);
}

CostModel CostModel::reference(double l0, double c1, double delta0) {
    if (!(l0 > 0.0) || !(c1 > 0.0) || !(delta0 > 0.0)) {
        throw Error(ErrorKind::Domain, "reference costs need l0 > 0, c1 > 0, delta0 > 0");
    }
    CostFunctions f;
    f.effort = [l0](double u) { return l0 * u - std::log1p(-u) - u; };
    f.effort_marginal = [l0](double u) { return l0 + u / (1.0 - u); };
    f.effort_curvature = [](double u) { return 1.0 / ((1.0 - u) * (1.0 - u)); };
    f.effort_marginal_inv = [l0](double rho) { return (rho - l0) / (1.0 + rho - l0); };
    f.deval = [c1](double v) { return c1 * v + 0.5 * v * v; };
    f.deval_marginal = [c1](double v) { return c1 + v; };
    f.deval_curvature = [](double) { return 1.0; };
    f.deval_marginal_inv = [c1](double rho) { return rho - c1; };
    f.delta0 = delta0;
    CostModel m("reference", std::move(f));
    m.l0_ = l0;
    m.c1_ = c1;
    return m;
}

double CostModel::effort_marginal_inv(double rho) const {
    if (rho <= effort_threshold_) return 0.0;
    if (fns_.effort_marginal_inv) return fns_.effort_marginal_inv(rho);
    // marginal blows up at u -> 1; walk the upper end toward 1
    double hi = 0.5;
    int k = 1;
    while (fns_.effort_marginal(hi) < rho) {
        if (++k > 60) {
            throw Error(ErrorKind::BracketFailure, "effort marginal does not reach target");
        }
        hi = 1.0 - std::ldexp(1.0, -k);
    }
    return roots::bisect([&](double u) { return fns_.effort_marginal(u) - rho; }, 0.0, hi,
                         inverse_tol(rho), kInverseMaxIter);
}

double CostModel::deval_marginal_inv(double rho) const {
    if (rho <= deval_threshold_) return 0.0;
    if (fns_.deval_marginal_inv) return fns_.deval_marginal_inv(rho);
    double hi = 1.0;
    int k = 0;
    while (fns_.deval_marginal(hi) < rho) {
        if (++k > 1100) {
            throw Error(ErrorKind::BracketFailure, "deval marginal does not reach target");
        }
        hi *= 2.0;
    }
    return roots::bisect([&](double v) { return fns_.deval_marginal(v) - rho; }, 0.0, hi,
                         inverse_tol(rho), kInverseMaxIter);
}

double CostModel::deval_inv(double y) const {
    if (y <= 0.0) return 0.0;
    if (family_ == "reference") return -c1_ + std::sqrt(c1_ * c1_ + 2.0 * y);
    double hi = 1.0;
    int k = 0;
    while (fns_.deval(hi) < y) {
        if (++k > 1100) throw Error(ErrorKind::BracketFailure, "deval does not reach target");
        hi *= 2.0;
    }
    return roots::bisect([&](double v) { return fns_.deval(v) - y; }, 0.0, hi, 1e-15 * hi,
                         kInverseMaxIter);
}

double u_star(const CostModel& costs, double xi, double p) {
    if (!(p > 0.0)) throw Error(ErrorKind::Domain, "u_star: price must be positive");
    const double rho = xi / p;
    if (rho <= costs.effort_threshold()) return 0.0;
    return costs.effort_marginal_inv(rho);
}

double v_star(const CostModel& costs, double x, double xi) {
    const double rho = x * xi;
    if (rho <= costs.deval_threshold()) return 0.0;
    return costs.deval_marginal_inv(rho);
}

double conj_effort(const CostModel& costs, double rho) {
    if (rho <= costs.effort_threshold()) return 0.0;
    const double u = costs.effort_marginal_inv(rho);
    return rho * u - costs.effort(u);
}

double conj_deval(const CostModel& costs, double rho) {
    if (rho <= costs.deval_threshold()) return 0.0;
    const double v = costs.deval_marginal_inv(rho);
    return rho * v - costs.deval(v);
}

ValidationReport validate(const CostModel& costs) {
    ValidationReport rep;
    auto fail = [&rep](const std::string& msg) {
        for (const auto& m : rep.violations) {
            if (m == msg) return;
        }
        rep.ok = false;
        rep.violations.push_back(msg);
    };
    auto guarded = [&](const char* what, auto&& check) {
        try {
            check();
        } catch (const std::exception& e) {
            fail(std::string(what) + " check raised: " + e.what());
        }
    };

    if (!(costs.delta0() > 0.0)) fail("delta0 > 0 violated");

    guarded("effort", [&] {
        if (std::abs(costs.effort(0.0)) > 1e-14) fail("L(0) = 0 violated");
        if (!(costs.effort_marginal(0.0) > 0.0)) fail("L'(0) > 0 violated");
        for (int i = 0; i <= 200; ++i) {
            const double u = 0.999 * i / 200.0;
            if (!(costs.effort_marginal(u) > 0.0)) fail("L' > 0 violated");
            if (!(costs.effort_curvature(u) >= costs.delta0())) fail("L'' >= delta0 violated");
        }
        // blow-up at u -> 1: six more decades of approach must add at least 10 L(1/2)
        if (!(costs.effort(1.0 - 1e-12) - costs.effort(1.0 - 1e-6) > 10.0 * costs.effort(0.5))) {
            fail("L(u) -> inf as u -> 1 violated");
        }
    });
    guarded("deval", [&] {
        if (std::abs(costs.deval(0.0)) > 1e-14) fail("c(0) = 0 violated");
        if (!(costs.deval_marginal(0.0) > 0.0)) fail("c'(0) > 0 violated");
        for (int i = 0; i <= 200; ++i) {
            const double v = 50.0 * i / 200.0;
            if (!(costs.deval_marginal(v) > 0.0)) fail("c' > 0 violated");
            if (!(costs.deval_curvature(v) >= costs.delta0())) fail("c'' >= delta0 violated");
        }
    });
    if (!rep.ok) return rep;

    guarded("inverse", [&] {
        for (int i = 0; i <= 100; ++i) {
            const double u = 0.99 * i / 100.0;
            const double back = costs.effort_marginal_inv(costs.effort_marginal(u));
            if (std::abs(back - u) > 1e-10 * u + 1e-14) fail("L' inverse round trip violated");
            const double v = 20.0 * i / 100.0;
            const double vb = costs.deval_marginal_inv(costs.deval_marginal(v));
            if (std::abs(vb - v) > 1e-10 * v + 1e-14) fail("c' inverse round trip violated");
        }
    });
    return rep;
}

}  // namespace hjdebt
