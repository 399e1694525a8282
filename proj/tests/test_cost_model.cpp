#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "hjdebt/cost_model.hpp"

using namespace hjdebt;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const CostModel kRef = CostModel::reference(0.1, 0.2);

// brute-force argmin of f on [lo, hi] with the given step
template <class F>
double grid_argmin(F f, double lo, double hi, double step) {
    double best = lo, fb = f(lo);
    for (double x = lo; x <= hi; x += step) {
        const double fx = f(x);
        if (fx < fb) {
            fb = fx;
            best = x;
        }
    }
    return best;
}

template <class F>
double grid_max(F f, double lo, double hi, double step) {
    double fb = f(lo);
    for (double x = lo; x <= hi; x += step) fb = std::max(fb, f(x));
    return fb;
}

bool mentions(const ValidationReport& r, const std::string& s) {
    return std::any_of(r.violations.begin(), r.violations.end(),
                       [&](const std::string& v) { return v.find(s) != std::string::npos; });
}

CostFunctions linear_effort() {
    CostFunctions f;
    f.effort = [](double u) { return u; };
    f.effort_marginal = [](double) { return 1.0; };
    f.effort_curvature = [](double) { return 0.0; };
    f.deval = [](double v) { return 0.2 * v + 0.5 * v * v; };
    f.deval_marginal = [](double v) { return 0.2 + v; };
    f.deval_curvature = [](double) { return 1.0; };
    f.delta0 = 1.0;
    return f;
}

}  // namespace

TEST_CASE("reference closed forms", "[cost_model]") {
    CHECK(kRef.effort(0.0) == 0.0);
    CHECK(kRef.deval(0.0) == 0.0);
    CHECK_THAT(kRef.effort_marginal(0.5), WithinRel(0.1 + 1.0, 1e-14));
    CHECK_THAT(kRef.effort_curvature(0.5), WithinRel(4.0, 1e-14));
    CHECK(kRef.effort_threshold() == 0.1);
    CHECK(kRef.deval_threshold() == 0.2);
    for (double u : {0.0, 0.1, 0.5, 0.9, 0.999}) {
        CHECK_THAT(kRef.effort_marginal_inv(kRef.effort_marginal(u)), WithinAbs(u, 1e-12));
    }
    for (double v : {0.0, 0.3, 2.0, 50.0}) {
        CHECK_THAT(kRef.deval_marginal_inv(kRef.deval_marginal(v)), WithinAbs(v, 1e-12));
        CHECK_THAT(kRef.deval_inv(kRef.deval(v)), WithinRel(v, 1e-12));
    }
}

TEST_CASE("u_star examples", "[cost_model]") {
    CHECK(u_star(kRef, 0.05, 1.0) == 0.0);
    CHECK(u_star(kRef, 0.0, 0.3) == 0.0);
    const double u = u_star(kRef, 0.6, 0.5);
    CHECK_THAT(u, WithinAbs(1.1 / 2.1, 1e-12));
    // oracle: brute minimization of L(u) - u xi/p
    const double g = grid_argmin([](double w) { return kRef.effort(w) - w * 0.6 / 0.5; }, 0.0,
                                 0.999, 1e-6);
    CHECK_THAT(u, WithinAbs(g, 2e-6));
}

TEST_CASE("v_star examples", "[cost_model]") {
    CHECK(v_star(kRef, 0.5, 0.3) == 0.0);  // x xi = 0.15 < c1
    CHECK(v_star(kRef, 0.0, 5.0) == 0.0);
    const double v = v_star(kRef, 4.0, 0.3);
    CHECK_THAT(v, WithinAbs(1.0, 1e-12));
    const double g =
        grid_argmin([](double w) { return kRef.deval(w) - w * 1.2; }, 0.0, 3.0, 1e-6);
    CHECK_THAT(v, WithinAbs(g, 2e-6));
}

TEST_CASE("conjugates", "[cost_model]") {
    for (double rho : {-1.0, 0.0, 0.05, 0.1}) CHECK(conj_effort(kRef, rho) == 0.0);
    for (double rho : {0.3, 1.0, 4.0}) {
        const double closed = 0.5 * (rho - 0.2) * (rho - 0.2);
        CHECK_THAT(conj_deval(kRef, rho), WithinAbs(closed, 1e-13));
        const double sup =
            grid_max([&](double v) { return rho * v - kRef.deval(v); }, 0.0, 10.0, 1e-5);
        CHECK_THAT(conj_deval(kRef, rho), WithinAbs(sup, 1e-9));
    }
    for (double rho = -1.0; rho <= 10.0; rho += 0.25) {
        CHECK(conj_effort(kRef, rho) <= std::max(0.0, rho) + 1e-15);
    }
}

TEST_CASE("Fenchel-Young inequality and equality", "[cost_model]") {
    for (double rho : {0.0, 0.2, 0.7, 3.0, 9.0}) {
        const double us = u_star(kRef, rho, 1.0);
        CHECK_THAT(conj_effort(kRef, rho) + kRef.effort(us), WithinAbs(rho * us, 1e-9));
        for (double u = 0.0; u < 0.99; u += 0.07) {
            CHECK(conj_effort(kRef, rho) + kRef.effort(u) >= rho * u - 1e-12);
        }
        const double vs = v_star(kRef, 1.0, rho);
        CHECK_THAT(conj_deval(kRef, rho) + kRef.deval(vs), WithinAbs(rho * vs, 1e-9));
    }
}

TEST_CASE("conjugate derivatives are the minimizers", "[cost_model]") {
    const double h = 1e-5;
    for (double rho : {0.3, 0.8, 2.0, 7.0}) {
        const double fd = (conj_effort(kRef, rho + h) - conj_effort(kRef, rho - h)) / (2 * h);
        CHECK_THAT(fd, WithinRel(u_star(kRef, rho, 1.0), 1e-6));
        const double fc = (conj_deval(kRef, rho + h) - conj_deval(kRef, rho - h)) / (2 * h);
        CHECK_THAT(fc, WithinRel(v_star(kRef, 1.0, rho), 1e-6));
    }
}

TEST_CASE("minimizers are monotone above threshold", "[cost_model]") {
    double prev = 0.0;
    for (double xi = 0.11; xi < 5.0; xi += 0.01) {
        const double u = u_star(kRef, xi, 1.0);
        CHECK(u > prev + 1e-12);
        prev = u;
    }
    prev = 1.0;
    for (double p = 0.1; p <= 1.0; p += 0.01) {
        const double u = u_star(kRef, 0.5, p);  // above threshold while p < 5
        CHECK(u < prev - 1e-12);
        prev = u;
    }
    prev = 0.0;
    for (double x = 1.0; x < 10.0; x += 0.05) {
        const double v = v_star(kRef, x, 0.3);
        CHECK(v > prev + 1e-12);
        prev = v;
    }
}

TEST_CASE("validate", "[cost_model]") {
    CHECK(validate(kRef).ok);
    CHECK(validate(CostModel::reference(0.5, 0.05)).ok);

    const auto lin = validate(CostModel("linear", linear_effort()));
    CHECK_FALSE(lin.ok);
    CHECK(mentions(lin, "L'' >= delta0 violated"));

    CostFunctions sq = linear_effort();
    sq.effort = [](double u) { return 0.1 * u - std::log1p(-u) - u; };
    sq.effort_marginal = [](double u) { return 0.1 + u / (1 - u); };
    sq.effort_curvature = [](double u) { return 1.0 / ((1 - u) * (1 - u)); };
    sq.deval = [](double v) { return v * v; };
    sq.deval_marginal = [](double v) { return 2 * v; };
    sq.deval_curvature = [](double) { return 2.0; };
    const auto bad_c = validate(CostModel("square", sq));
    CHECK_FALSE(bad_c.ok);
    CHECK(mentions(bad_c, "c'(0) > 0 violated"));
}

TEST_CASE("generic model falls back to bisection inverses", "[cost_model]") {
    CostFunctions f = linear_effort();
    f.effort = [](double u) { return 0.3 * u - std::log1p(-u) - u; };
    f.effort_marginal = [](double u) { return 0.3 + u / (1 - u); };
    f.effort_curvature = [](double u) { return 1.0 / ((1 - u) * (1 - u)); };
    const CostModel g("custom", f);
    CHECK(validate(g).ok);
    for (double u : {0.0, 0.2, 0.75, 0.99}) {
        CHECK_THAT(g.effort_marginal_inv(g.effort_marginal(u)), WithinAbs(u, 1e-10));
    }
    for (double v : {0.0, 1.0, 30.0}) {
        CHECK_THAT(g.deval_marginal_inv(g.deval_marginal(v)), WithinAbs(v, 1e-9 * (1 + v)));
    }
}
