#include "hjdebt/constant_strategy.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "hjdebt/errors.hpp"
#include "hjdebt/io.hpp"
#include "hjdebt/roots.hpp"

namespace hjdebt {

namespace {

// Root of an increasing g on [0, 1/(r-mu)); g blows up at the right end.
template <class G>
double increasing_root(G&& g, double upper) {
    double hi = upper * (1.0 - 1e-15);
    if (!(g(hi) > 0.0)) {
        throw Error(ErrorKind::BracketFailure, "threshold equation does not cross zero");
    }
    return roots::bisect(g, 0.0, hi, 0.0);
}

}  // namespace

ConstantStrategy::ConstantStrategy(const Hamiltonian& ham) : ham_(ham) {
    const auto& m = ham_.params();
    const auto& c = ham_.costs();
    const double rm = m.discount - m.growth;
    const double rl = m.discount + m.repayment;
    const double cp0 = c.deval_threshold();
    x_deval_ = increasing_root(
        [&](double x) { return rm * x * c.effort_marginal(rm * x) - rl * cp0; }, 1.0 / rm);
    x_flat_ = increasing_root([&](double x) { return x * c.effort_marginal(rm * x) - cp0; },
                              1.0 / rm);
}

double ConstantStrategy::planner_gradient(double x, double v) const {
    const auto& m = ham_.params();
    const auto& c = ham_.costs();
    const double rl = m.discount + m.repayment;
    const double k = rl * (m.discount - m.growth) * x;
    const double u = k / (rl + v);
    if (u >= 1.0) return -INFINITY;
    return c.deval_marginal(v) - k / ((rl + v) * (rl + v)) * c.effort_marginal(u);
}

double ConstantStrategy::devaluation(double x) const {
    if (x <= x_deval_) return 0.0;
    const auto& m = ham_.params();
    const double rl = m.discount + m.repayment;
    const double k = rl * (m.discount - m.growth) * x;
    const double lo = std::max(0.0, k - rl);
    double hi = std::max(1.0, 2.0 * lo);
    int n = 0;
    while (!(planner_gradient(x, hi) > 0.0)) {
        if (++n > 1100) throw Error(ErrorKind::BracketFailure, "devaluation: no bracket");
        hi *= 2.0;
    }
    return roots::bisect([&](double v) { return planner_gradient(x, v); }, lo, hi, 0.0);
}

double ConstantStrategy::price(double x) const {
    const auto& m = ham_.params();
    const double rl = m.discount + m.repayment;
    return rl / (rl + devaluation(x));
}

double ConstantStrategy::cost(double x) const {
    if (x <= 0.0) return 0.0;
    return ham_.max_value(x, price(x)) / ham_.params().discount;
}

double ConstantStrategy::cost_direct(double x) const {
    if (x <= 0.0) return 0.0;
    const auto& m = ham_.params();
    const auto& c = ham_.costs();
    const double rl = m.discount + m.repayment;
    const double v = devaluation(x);
    const double u = rl * (m.discount - m.growth) * x / (rl + v);
    return (c.effort(u) + c.deval(v)) / m.discount;
}

double ConstantStrategy::cost_slope(double x) const {
    const auto& m = ham_.params();
    const double rm = m.discount - m.growth;
    const double p = price(x);
    return rm / m.discount * p * ham_.costs().effort_marginal(p * rm * x);
}

ConstantStrategyCurve::ConstantStrategyCurve(const ConstantStrategy& cs, double x_max, int nodes)
    : x_max_(x_max),
      h_(x_max / (nodes - 1)),
      x_deval_(cs.devaluation_threshold()),
      x_flat_(cs.flat_threshold()) {
    if (nodes < 3 || !(x_max > 0.0)) {
        throw Error(ErrorKind::Domain, "ConstantStrategyCurve: need >= 3 nodes and x_max > 0");
    }
    const std::size_t n = static_cast<std::size_t>(nodes);
    x_.resize(n);
    v_.resize(n);
    p_.resize(n);
    w_.resize(n);
    dw_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = (i + 1 == n) ? x_max : h_ * static_cast<double>(i);
        x_[i] = x;
        v_[i] = cs.devaluation(x);
        p_[i] = cs.price(x);
        w_[i] = cs.cost(x);
        dw_[i] = x > 0.0 ? cs.cost_slope(x) : 0.0;
    }
    // Fritsch-Carlson tangents on the tabulated values
    std::vector<double> delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = (w_[i + 1] - w_[i]) / h_;
    tangent_.assign(n, 0.0);
    tangent_[0] = delta[0];
    tangent_[n - 1] = delta[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            tangent_[i] = 0.0;
        } else {
            tangent_[i] = 2.0 / (1.0 / delta[i - 1] + 1.0 / delta[i]);
        }
    }
}

double ConstantStrategyCurve::cost(double x) const {
    if (x <= 0.0) return w_.front();
    if (x >= x_max_) return w_.back();
    const std::size_t i = std::min(static_cast<std::size_t>(x / h_), x_.size() - 2);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * w_[i] + (t3 - 2 * t2 + t) * h * tangent_[i] +
           (-2 * t3 + 3 * t2) * w_[i + 1] + (t3 - t2) * h * tangent_[i + 1];
}

void ConstantStrategyCurve::write_csv(std::ostream& os) const {
    CsvWriter csv(os);
    csv.comment("x_c", format_double(x_deval_));
    csv.comment("x_flat", format_double(x_flat_));
    csv.header({"x", "v_c", "p_c", "W", "W_prime"});
    for (std::size_t i = 0; i < x_.size(); ++i) csv.row({x_[i], v_[i], p_[i], w_[i], dw_[i]});
}

}  // namespace hjdebt
