#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace hjdebt::ode {

/// Outcome of one right-hand-side evaluation.
enum class RhsStatus { Ok, Infeasible, Singular };

template <std::size_t N>
using State = std::array<double, N>;

/// One accepted step with the continuous extension of order 4.
template <std::size_t N>
struct DenseStep {
    double t0 = 0.0;
    double h = 0.0;  // signed
    std::array<State<N>, 5> rc{};

    [[nodiscard]] double t1() const { return t0 + h; }

    [[nodiscard]] State<N> eval(double t) const {
        const double th = (t - t0) / h;
        const double th1 = 1.0 - th;
        State<N> y;
        for (std::size_t i = 0; i < N; ++i) {
            y[i] = rc[0][i] +
                   th * (rc[1][i] + th1 * (rc[2][i] + th * (rc[3][i] + th1 * rc[4][i])));
        }
        return y;
    }

    [[nodiscard]] State<N> deriv(double t) const {
        const double th = (t - t0) / h;
        const double th1 = 1.0 - th;
        State<N> dy;
        for (std::size_t i = 0; i < N; ++i) {
            const double P = rc[2][i] + th * (rc[3][i] + th1 * rc[4][i]);
            const double dP = rc[3][i] + (1.0 - 2.0 * th) * rc[4][i];
            const double Q = rc[1][i] + th1 * P;
            const double dQ = -P + th1 * dP;
            dy[i] = (Q + th * dQ) / h;
        }
        return dy;
    }
};

/// Piecewise dense solution; t may run forward or backward.
template <std::size_t N>
class DenseSolution {
public:
    std::vector<DenseStep<N>> steps;
    double t_begin = 0.0;
    double t_end = 0.0;
    State<N> y_begin{};

    [[nodiscard]] bool empty() const { return steps.empty(); }

    [[nodiscard]] std::size_t locate(double t) const {
        // steps are ordered in integration direction
        const bool fwd = t_end >= t_begin;
        std::size_t lo = 0, hi = steps.size();
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            const bool after = fwd ? (t >= steps[mid].t0) : (t <= steps[mid].t0);
            if (after) lo = mid; else hi = mid;
        }
        return lo;
    }

    [[nodiscard]] State<N> eval(double t) const {
        if (steps.empty()) return y_begin;
        return steps[locate(t)].eval(t);
    }
    [[nodiscard]] State<N> deriv(double t) const { return steps[locate(t)].deriv(t); }
};

struct Options {
    double rtol = 1e-9;
    double atol = 1e-12;
    double h_init = 0.0;  // 0: automatic
    double h_min = 1e-12;
    double h_max = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 2000000;
};

enum class Termination { Completed, Event, StepUnderflow, MaxSteps };

template <std::size_t N>
struct Result {
    DenseSolution<N> solution;
    Termination termination = Termination::Completed;
    int event_index = -1;
    RhsStatus last_failure = RhsStatus::Ok;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
};

template <std::size_t N>
using Rhs = std::function<RhsStatus(double, const State<N>&, State<N>&)>;

/// Event fires when g goes from negative to >= 0.
template <std::size_t N>
using EventFn = std::function<double(double, const State<N>&)>;

/**
 * @brief Dormand-Prince 5(4) with the standard quartic dense output.
 *
 * An Infeasible or Singular right-hand side rejects the step and shrinks it;
 * once |h| < h_min the integration stops with StepUnderflow and the
 * solution up to the last accepted step is kept.
 */
template <std::size_t N>
Result<N> integrate(const Rhs<N>& f, double t0, const State<N>& y0, double t_end,
                    const Options& opt, const std::vector<EventFn<N>>& events = {}) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                            a75 = -2187.0 / 6784, a76 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    static constexpr double d1 = -12715105075.0 / 11282082432.0,
                            d3 = 87487479700.0 / 32700410799.0,
                            d4 = -10690763975.0 / 1880347072.0,
                            d5 = 701980252875.0 / 199316789632.0,
                            d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

    Result<N> res;
    res.solution.t_begin = t0;
    res.solution.t_end = t0;
    res.solution.y_begin = y0;
    const double dir = t_end >= t0 ? 1.0 : -1.0;
    const double span = std::abs(t_end - t0);
    if (span == 0.0) return res;

    State<N> y = y0, k1, k2, k3, k4, k5, k6, k7, ytmp, ynew;
    double t = t0;
    RhsStatus st = f(t, y, k1);
    if (st != RhsStatus::Ok) {
        res.termination = Termination::StepUnderflow;
        res.last_failure = st;
        return res;
    }

    std::vector<double> g_prev(events.size());
    for (std::size_t e = 0; e < events.size(); ++e) g_prev[e] = events[e](t, y);

    double h = opt.h_init > 0.0 ? opt.h_init : std::min(1e-3 * span, 1e-2);
    h = std::min(h, opt.h_max);
    bool last_rejected = false;

    auto stage = [&](State<N>& out, double tt, std::initializer_list<std::pair<double, const State<N>*>> terms,
                     double hh) {
        for (std::size_t i = 0; i < N; ++i) {
            double s = 0.0;
            for (const auto& [a, k] : terms) s += a * (*k)[i];
            ytmp[i] = y[i] + hh * s;
        }
        return f(tt, ytmp, out);
    };

    while (res.accepted < opt.max_steps) {
        const double remaining = std::abs(t_end - t);
        if (remaining <= 1e-15 * std::max(1.0, std::abs(t_end))) {
            res.termination = Termination::Completed;
            return res;
        }
        bool final_step = false;
        if (h >= remaining) {
            h = remaining;
            final_step = true;
        }
        // minimum step is relative below |t| = 1 so arcs can reach x_tiny
        const double h_floor = std::max(opt.h_min * std::min(1.0, std::abs(t)), 1e-18);
        if (h < h_floor && !final_step) {
            res.termination = Termination::StepUnderflow;
            return res;
        }
        const double hs = dir * h;

        RhsStatus s = stage(k2, t + c2 * hs, {{a21, &k1}}, hs);
        if (s == RhsStatus::Ok) s = stage(k3, t + c3 * hs, {{a31, &k1}, {a32, &k2}}, hs);
        if (s == RhsStatus::Ok) s = stage(k4, t + c4 * hs, {{a41, &k1}, {a42, &k2}, {a43, &k3}}, hs);
        if (s == RhsStatus::Ok)
            s = stage(k5, t + c5 * hs, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}, hs);
        if (s == RhsStatus::Ok)
            s = stage(k6, t + hs, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}},
                      hs);
        if (s == RhsStatus::Ok) {
            for (std::size_t i = 0; i < N; ++i) {
                ynew[i] = y[i] + hs * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] +
                                       a76 * k6[i]);
            }
            s = f(t + hs, ynew, k7);
        }
        if (s != RhsStatus::Ok) {
            res.last_failure = s;
            ++res.rejected;
            if (final_step && h < h_floor) {
                res.termination = Termination::StepUnderflow;
                return res;
            }
            h *= 0.25;
            last_rejected = true;
            continue;
        }

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double ei = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                    e6 * k6[i] + e7 * k7[i]);
            const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (ei / sc) * (ei / sc);
        }
        err = std::sqrt(err / N);
        if (!std::isfinite(err)) err = 1e10;

        if (err > 1.0) {
            ++res.rejected;
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            last_rejected = true;
            if (h < h_floor) {
                res.termination = Termination::StepUnderflow;
                return res;
            }
            continue;
        }

        DenseStep<N> ds;
        ds.t0 = t;
        ds.h = hs;
        for (std::size_t i = 0; i < N; ++i) {
            const double dy = ynew[i] - y[i];
            const double bspl = hs * k1[i] - dy;
            ds.rc[0][i] = y[i];
            ds.rc[1][i] = dy;
            ds.rc[2][i] = bspl;
            ds.rc[3][i] = dy - hs * k7[i] - bspl;
            ds.rc[4][i] = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                                d7 * k7[i]);
        }
        const double t_new = final_step ? t_end : t + hs;

        // event check on the accepted step
        int fired = -1;
        double t_fire = t_new;
        for (std::size_t e = 0; e < events.size(); ++e) {
            const double g1 = events[e](t_new, ynew);
            if (g_prev[e] < 0.0 && g1 >= 0.0) {
                double lo = t, hi = t_new;
                while (std::abs(hi - lo) > 1e-12 * std::max(1.0, std::abs(t))) {
                    const double mid = 0.5 * (lo + hi);
                    if (mid == lo || mid == hi) break;
                    if (events[e](mid, ds.eval(mid)) >= 0.0) hi = mid; else lo = mid;
                }
                if (fired < 0 || dir * (hi - t_fire) < 0.0) {
                    fired = static_cast<int>(e);
                    t_fire = hi;
                }
            }
            g_prev[e] = g1;
        }

        res.solution.steps.push_back(ds);
        ++res.accepted;
        if (fired >= 0) {
            res.solution.t_end = t_fire;
            res.termination = Termination::Event;
            res.event_index = fired;
            return res;
        }
        t = t_new;
        y = ynew;
        k1 = k7;
        res.solution.t_end = t;
        if (final_step) {
            res.termination = Termination::Completed;
            return res;
        }

        double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
        fac = std::clamp(fac, 0.2, 10.0);
        if (last_rejected) fac = std::min(fac, 1.0);
        last_rejected = false;
        h = std::min(h * fac, opt.h_max);
    }
    res.termination = Termination::MaxSteps;
    return res;
}

}  // namespace hjdebt::ode
