#pragma once

#include <cmath>
#include <string>

#include "hjdebt/errors.hpp"

namespace hjdebt::roots {

/**
 * @brief Bisection on a sign change.
 *
 * Requires f(lo) and f(hi) of opposite sign (zero counts as either).
 * Stops when the bracket is below xtol or cannot be split further.
 */
template <class F>
double bisect(F&& f, double lo, double hi, double xtol, int max_iter = 200) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo < 0.0) == (fhi < 0.0)) {
        throw Error(ErrorKind::BracketFailure,
                    "bisect: no sign change on [" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "]");
    }
    for (int it = 0; it < max_iter && std::abs(hi - lo) > xtol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= std::min(lo, hi) || mid >= std::max(lo, hi)) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Result of a bracketed Newton solve.
struct NewtonResult {
    double x;
    int iterations;
};

/**
 * @brief Newton iteration safeguarded by a bracket (rtsafe).
 *
 * fdf(x, f, df) fills the value and derivative. [lo, hi] must bracket
 * a root with f(lo) < 0 < f(hi) or the reverse. Falls back to bisection
 * whenever the Newton step leaves the bracket or converges too slowly.
 */
template <class FdF>
NewtonResult safe_newton(FdF&& fdf, double lo, double hi, double x0, double xtol,
                         int max_iter = 200) {
    double flo, fhi, d;
    fdf(lo, flo, d);
    fdf(hi, fhi, d);
    if (flo == 0.0) return {lo, 0};
    if (fhi == 0.0) return {hi, 0};
    if ((flo < 0.0) == (fhi < 0.0)) {
        throw Error(ErrorKind::BracketFailure, "safe_newton: root not bracketed");
    }
    // orient so that f(xl) < 0
    double xl = lo, xh = hi;
    if (flo > 0.0) std::swap(xl, xh);

    double x = (x0 > std::min(lo, hi) && x0 < std::max(lo, hi)) ? x0 : 0.5 * (lo + hi);
    double dx_old = std::abs(hi - lo);
    double dx = dx_old;
    double f, df;
    fdf(x, f, df);
    for (int it = 1; it <= max_iter; ++it) {
        const bool newton_out = ((x - xh) * df - f) * ((x - xl) * df - f) > 0.0;
        const bool too_slow = std::abs(2.0 * f) > std::abs(dx_old * df);
        dx_old = dx;
        if (newton_out || too_slow || df == 0.0) {
            dx = 0.5 * (xh - xl);
            x = xl + dx;
        } else {
            dx = f / df;
            const double prev = x;
            x -= dx;
            if (x == prev) return {x, it};
        }
        if (std::abs(dx) <= xtol) return {x, it};
        fdf(x, f, df);
        if (f == 0.0) return {x, it};
        if (f < 0.0) xl = x; else xh = x;
        if (std::abs(xh - xl) <= xtol) return {0.5 * (xl + xh), it};
    }
    return {x, max_iter};
}

}  // namespace hjdebt::roots
