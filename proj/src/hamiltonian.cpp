#include "hjdebt/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <utility>

#include "hjdebt/errors.hpp"
#include "hjdebt/io.hpp"
#include "hjdebt/roots.hpp"

namespace hjdebt {

Hamiltonian::Hamiltonian(ModelParams params, CostModel costs)
    : params_(std::move(params)), costs_(std::move(costs)) {
    params_.check();
}

double Hamiltonian::value(double x, double xi, double p) const {
    if (!(p > 0.0)) throw Error(ErrorKind::Domain, "H: price must be positive");
    const double r = params_.discount;
    const double lam = params_.repayment;
    const double mu = params_.growth;
    const double u = u_star(costs_, xi, p);
    const double v = v_star(costs_, x, xi);
    return (costs_.effort(u) - u * xi / p) + (costs_.deval(v) - v * x * xi) +
           ((lam + r) / p - lam - mu) * x * xi;
}

HamiltonianPoint Hamiltonian::point(double x, double xi, double p) const {
    if (!(p > 0.0)) throw Error(ErrorKind::Domain, "H: price must be positive");
    const double r = params_.discount;
    const double lam = params_.repayment;
    const double mu = params_.growth;
    HamiltonianPoint hp;
    hp.x = x;
    hp.xi = xi;
    hp.p = p;
    hp.u = u_star(costs_, xi, p);
    hp.v = v_star(costs_, x, xi);
    hp.value = (costs_.effort(hp.u) - hp.u * xi / p) + (costs_.deval(hp.v) - hp.v * x * xi) +
               ((lam + r) / p - lam - mu) * x * xi;
    const double gap = (lam + r) - p * (lam + mu + hp.v);
    hp.d_x = gap * xi / p;
    hp.d_xi = (x * gap - hp.u) / p;
    hp.d_p = (hp.u - x * (lam + r)) * xi / (p * p);
    return hp;
}

double Hamiltonian::drift(double x, double xi, double p) const {
    const double r = params_.discount;
    const double lam = params_.repayment;
    const double mu = params_.growth;
    const double u = u_star(costs_, xi, p);
    const double v = v_star(costs_, x, xi);
    return (x * ((lam + r) - p * (lam + mu + v)) - u) / p;
}

double Hamiltonian::argmax_costate(double x, double p) const {
    if (!(x > 0.0)) throw Error(ErrorKind::Domain, "argmax_costate: need x > 0");
    if (!(p > 0.0)) throw Error(ErrorKind::Domain, "argmax_costate: price must be positive");
    double hi = std::max(p * costs_.effort_threshold(), costs_.deval_threshold() / x);
    int k = 0;
    while (drift(x, hi, p) > 0.0) {
        if (++k > 2000) throw Error(ErrorKind::BracketFailure, "argmax_costate: no bracket");
        hi *= 2.0;
    }
    double lo = 0.0;
    // plain bisection to full precision; H_xi is only piecewise smooth
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (drift(x, mid, p) > 0.0) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

double Hamiltonian::max_value(double x, double p) const {
    if (x <= 0.0) return 0.0;
    return value(x, argmax_costate(x, p), p);
}

MinusRoot Hamiltonian::minus_root(double x, double eta, double p) const {
    MinusRoot out;
    const double target = params_.discount * eta;
    if (!(target > 0.0) || !(x > 0.0) || !(p > 0.0)) return out;
    const double peak_xi = argmax_costate(x, p);
    const double peak = value(x, peak_xi, p);
    auto finish = [&](double xi) {
        const auto hp = point(x, xi, p);
        out.feasible = true;
        out.xi = xi;
        out.d_xi = hp.d_xi;
        out.u = hp.u;
        out.v = hp.v;
        return out;
    };
    if (target >= peak) {
        if (target <= peak + 1e-14 * (1.0 + peak)) return finish(peak_xi);
        return out;
    }
    const double r = params_.discount;
    const double lam = params_.repayment;
    const double mu = params_.growth;
    // exact when both minimizers vanish; Newton then stops at once
    const double guess = target / (((lam + r) / p - lam - mu) * x);
    auto fdf = [&](double xi, double& f, double& df) {
        const auto hp = point(x, xi, p);
        f = hp.value - target;
        df = hp.d_xi;
    };
    const auto res = roots::safe_newton(fdf, 0.0, peak_xi, guess, 1e-17 * peak_xi + 1e-300);
    return finish(res.x);
}

double Hamiltonian::branch_costate(Branch b, double x, double eta, double p) const {
    if (!(eta > 0.0)) throw Error(ErrorKind::Domain, "branch_costate: need eta > 0");
    if (!(x > 0.0)) throw Error(ErrorKind::Domain, "branch_costate: need x > 0");
    const double target = params_.discount * eta;
    const double peak_xi = argmax_costate(x, p);
    const double peak = value(x, peak_xi, p);
    if (target > peak + 1e-14 * (1.0 + peak)) {
        throw Error(ErrorKind::NoSolution, "branch_costate: r*eta exceeds max_value(x,p)");
    }
    if (target >= peak) return peak_xi;
    if (b == Branch::Minus) return minus_root(x, eta, p).xi;

    double hi = 2.0 * peak_xi;
    int k = 0;
    while (value(x, hi, p) > target) {
        if (++k > 2000) throw Error(ErrorKind::BracketFailure, "plus branch: no bracket");
        hi *= 2.0;
    }
    auto fdf = [&](double xi, double& f, double& df) {
        const auto hp = point(x, xi, p);
        f = hp.value - target;
        df = hp.d_xi;
    };
    return roots::safe_newton(fdf, peak_xi, hi, 0.5 * (peak_xi + hi), 1e-17 * hi).x;
}

double Hamiltonian::branch_price_slope(Branch b, double x, double eta, double p) const {
    const double xi = branch_costate(b, x, eta, p);
    const auto hp = point(x, xi, p);
    if (std::abs(hp.d_xi) < singular_threshold(x)) {
        throw Error(ErrorKind::SingularSlope, "branch_price_slope: H_xi vanishes");
    }
    const double rl = params_.discount + params_.repayment;
    return ((rl + hp.v) * p - rl) / hp.d_xi;
}

double Hamiltonian::branch_costate_deta(Branch b, double x, double eta, double p) const {
    const double xi = branch_costate(b, x, eta, p);
    const auto hp = point(x, xi, p);
    if (std::abs(hp.d_xi) < singular_threshold(x)) {
        throw Error(ErrorKind::SingularSlope, "branch_costate_deta: H_xi vanishes");
    }
    return params_.discount / hp.d_xi;
}

double Hamiltonian::holder_constant(double x1, double p1) const {
    const double r = params_.discount;
    const double mu = params_.growth;
    const double B = params_.bankruptcy_cost;
    return std::sqrt(2.0 * r * costs_.delta0() / std::min(1.0, x1 * x1 * p1)) +
           std::sqrt(2.0 * B) * r / ((r - mu) * x1);
}

void write_hamiltonian_curve(std::ostream& os, const Hamiltonian& ham, double x, double p,
                             double xi_max, int n) {
    CsvWriter csv(os);
    csv.header({"xi", "H", "H_xi"});
    for (int i = 0; i < n; ++i) {
        const double xi = xi_max * i / std::max(1, n - 1);
        const auto hp = ham.point(x, xi, p);
        csv.row({xi, hp.value, hp.d_xi});
    }
}

}  // namespace hjdebt
