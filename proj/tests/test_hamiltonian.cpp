#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "hjdebt/errors.hpp"
#include "hjdebt/hamiltonian.hpp"

using namespace hjdebt;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Hamiltonian reference_ham() { return Hamiltonian(ModelParams{}, CostModel::reference(0.1, 0.2)); }

// H by brute minimization over the controls, independent of u_star / v_star
double brute_h(const Hamiltonian& h, double x, double xi, double p) {
    const auto& m = h.params();
    const auto& c = h.costs();
    double mu = 0.0;
    for (double u = 0.0; u < 0.999; u += 1e-5) mu = std::min(mu, c.effort(u) - u * xi / p);
    double mv = 0.0;
    for (double v = 0.0; v < 5.0; v += 1e-5) mv = std::min(mv, c.deval(v) - v * x * xi);
    return mu + mv + ((m.repayment + m.discount) / p - m.repayment - m.growth) * x * xi;
}

double golden_max(const std::function<double(double)>& f, double a, double b) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    while (b - a > 1e-12) {
        if (f(c) > f(d)) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    return f(0.5 * (a + b));
}

}  // namespace

TEST_CASE("H at zero costate and reference point", "[hamiltonian]") {
    const auto h = reference_ham();
    for (double x : {0.0, 0.5, 3.0, 20.0}) {
        for (double p : {0.1, 0.6, 1.0}) CHECK(h.value(x, 0.0, p) == 0.0);
    }
    CHECK_THAT(h.value(1.0, 0.05, 1.0), WithinAbs(0.0015, 1e-15));
    CHECK_THAT(brute_h(h, 1.0, 0.05, 1.0), WithinAbs(0.0015, 1e-12));
    CHECK_THAT(h.value(2.0, 0.3, 0.7), WithinAbs(brute_h(h, 2.0, 0.3, 0.7), 1e-9));
    CHECK_THROWS_AS(h.value(1.0, 0.1, 0.0), Error);
}

TEST_CASE("H upper bound and concavity", "[hamiltonian]") {
    const auto h = reference_ham();
    const auto& m = h.params();
    for (double x : {0.3, 1.0, 4.0}) {
        for (double p : {0.3, 0.8, 1.0}) {
            const double k = ((m.repayment + m.discount) / p - m.repayment - m.growth) * x;
            const double d = 1e-3;
            for (double xi = d; xi < 3.0; xi += 0.01) {
                CHECK(h.value(x, xi, p) <= k * xi + 1e-15);
                const double second = h.value(x, xi + d, p) - 2 * h.value(x, xi, p) + h.value(x, xi - d, p);
                CHECK(second <= 1e-8);
            }
        }
    }
}

TEST_CASE("gradient identities", "[hamiltonian]") {
    const auto h = reference_ham();
    const auto& m = h.params();
    for (double x : {0.5, 2.0}) {
        for (double p : {0.4, 1.0}) {
            const auto pt = h.point(x, 0.0, p);
            CHECK_THAT(pt.d_xi, WithinAbs(((m.repayment + m.discount) / p - (m.repayment + m.growth)) * x, 1e-14));
        }
    }
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(0.1, 8.0), uxi(0.01, 2.0), up(0.2, 1.0);
    int checked = 0;
    while (checked < 50) {
        const double x = ux(rng), xi = uxi(rng), p = up(rng);
        // stay away from the kinks of the minimizers
        if (std::abs(xi - p * 0.1) < 1e-3 || std::abs(x * xi - 0.2) < 1e-3) continue;
        const auto pt = h.point(x, xi, p);
        auto fd = [&](int which) {
            const double a[3] = {x, xi, p};
            const double step = 1e-6 * (1 + std::abs(a[which]));
            double lo[3] = {x, xi, p}, hi[3] = {x, xi, p};
            lo[which] -= step;
            hi[which] += step;
            return (h.value(hi[0], hi[1], hi[2]) - h.value(lo[0], lo[1], lo[2])) / (2 * step);
        };
        const double g[3] = {pt.d_x, pt.d_xi, pt.d_p};
        for (int k = 0; k < 3; ++k) {
            CHECK(std::abs(fd(k) - g[k]) <= 1e-5 * std::max(1e-3, std::abs(g[k])));
        }
        if (pt.u < x * (m.repayment + m.discount)) CHECK(pt.d_p < 0.0);
        ++checked;
    }
}

TEST_CASE("peak costate and maximum", "[hamiltonian]") {
    const auto h = reference_ham();
    const double xs = h.argmax_costate(1.0, 1.0);
    CHECK_THAT(xs, WithinAbs(0.1 + 0.03 / 0.97, 1e-10));
    const double hmax = 0.1 * 0.03 - std::log(0.97) - 0.03;
    CHECK_THAT(h.max_value(1.0, 1.0), WithinAbs(hmax, 1e-13));
    const double gm = golden_max([&](double xi) { return h.value(1.0, xi, 1.0); }, 0.0, 2.0);
    CHECK_THAT(h.max_value(1.0, 1.0), WithinAbs(gm, 1e-13));
    for (double x : {0.5, 1.0, 3.0, 9.0}) {
        for (double p : {0.3, 1.0}) {
            const double s = h.argmax_costate(x, p);
            CHECK(std::abs(h.point(x, s, p).d_xi) < 1e-9);
            CHECK(s >= std::min(p * 0.1, 0.2 / x) - 1e-15);
            CHECK(h.value(x, s + 1e-3, p) < h.value(x, s, p));
            CHECK(h.value(x, s - 1e-3, p) < h.value(x, s, p));
            const auto pt = h.point(x, s, p);
            CHECK_THAT(h.max_value(x, p),
                       WithinAbs(h.costs().effort(pt.u) + h.costs().deval(pt.v), 1e-12));
        }
        double prev = h.max_value(x, 0.2);
        for (double p = 0.3; p <= 1.0 + 1e-12; p += 0.1) {
            const double cur = h.max_value(x, p);
            CHECK(cur < prev);
            prev = cur;
        }
    }
}

TEST_CASE("branch roots", "[hamiltonian]") {
    const auto h = reference_ham();
    const double r = h.params().discount;
    for (double x : {0.7, 2.0, 6.0}) {
        for (double p : {0.5, 1.0}) {
            const double hm = h.max_value(x, p);
            const double s = h.argmax_costate(x, p);
            CHECK_THAT(h.branch_costate(Branch::Minus, x, hm / r, p), WithinAbs(s, 1e-8));
            CHECK_THAT(h.branch_costate(Branch::Plus, x, hm / r, p), WithinAbs(s, 1e-8));
            double pm = 0.0, pp = 1e300;
            for (int i = 1; i <= 20; ++i) {
                const double eta = hm / r * i / 21.0;
                const double fm = h.branch_costate(Branch::Minus, x, eta, p);
                const double fp = h.branch_costate(Branch::Plus, x, eta, p);
                CHECK(std::abs(h.value(x, fm, p) - r * eta) <= 1e-10 * (1 + r * eta));
                CHECK(std::abs(h.value(x, fp, p) - r * eta) <= 1e-10 * (1 + r * eta));
                CHECK(fm > pm);
                CHECK(fp < pp);
                pm = fm;
                pp = fp;
            }
            CHECK_THROWS_AS(h.branch_costate(Branch::Minus, x, 1.01 * hm / r, p), Error);
        }
    }
    CHECK_THROWS_AS(h.branch_costate(Branch::Minus, 1.0, 0.0, 1.0), Error);
    // below both thresholds the minus root is linear in eta
    const double x = 1.0, p = 0.9, eta = 0.001;
    const double lin = p * r * eta / ((0.2 + r - p * 0.22) * x);
    CHECK_THAT(h.branch_costate(Branch::Minus, x, eta, p), WithinRel(lin, 1e-10));
}

TEST_CASE("price slope and eta derivative", "[hamiltonian]") {
    const auto h = reference_ham();
    const double r = h.params().discount;
    const double x = 2.0, p = 0.9;
    const double hm = h.max_value(x, p);
    const double eta = 0.5 * hm / r;
    const double f = h.branch_costate(Branch::Minus, x, eta, p);
    const auto pt = h.point(x, f, p);
    REQUIRE(pt.v == 0.0);
    REQUIRE(pt.d_xi > 0.0);
    CHECK(h.branch_price_slope(Branch::Minus, x, eta, p) < 0.0);
    // p = 1 with no devaluation: the numerator vanishes
    const double e1 = 0.3 * h.max_value(0.5, 1.0) / r;
    REQUIRE(h.point(0.5, h.branch_costate(Branch::Minus, 0.5, e1, 1.0), 1.0).v == 0.0);
    CHECK(h.branch_price_slope(Branch::Minus, 0.5, e1, 1.0) == 0.0);

    for (double xx : {0.8, 2.0, 5.0}) {
        const double m = h.max_value(xx, 0.8) / r;
        for (int i = 1; i <= 10; ++i) {
            const double e = m * i / 11.0;
            const double d = 1e-7 * m;
            for (Branch b : {Branch::Minus, Branch::Plus}) {
                const double fd =
                    (h.branch_costate(b, xx, e + d, 0.8) - h.branch_costate(b, xx, e - d, 0.8)) / (2 * d);
                const double an = h.branch_costate_deta(b, xx, e, 0.8);
                CHECK(std::abs(fd - an) <= 1e-4 * std::abs(an));
                CHECK((b == Branch::Minus ? an > 0.0 : an < 0.0));
            }
        }
    }
    const double near = h.max_value(1.0, 1.0) * (1 - 1e-8) / r;
    CHECK(std::abs(h.branch_costate_deta(Branch::Minus, 1.0, near, 1.0)) > 1e3);
    CHECK_THROWS_AS(h.branch_costate_deta(Branch::Minus, 1.0, h.max_value(1.0, 1.0) / r, 1.0), Error);
}

TEST_CASE("minus root grows with the price", "[hamiltonian]") {
    const auto h = reference_ham();
    const double r = h.params().discount;
    for (double x : {0.8, 2.0}) {
        const double eta = 0.4 * h.max_value(x, 0.9) / r;
        for (double p : {0.6, 0.8}) {
            const double f = h.branch_costate(Branch::Minus, x, eta, p);
            const double d = 1e-6;
            const double fd = (h.branch_costate(Branch::Minus, x, eta, p + d) -
                               h.branch_costate(Branch::Minus, x, eta, p - d)) / (2 * d);
            const auto pt = h.point(x, f, p);
            CHECK_THAT(fd, WithinRel(-pt.d_p / pt.d_xi, 1e-5));
            CHECK(fd > f / p);
        }
    }
}

TEST_CASE("minus_root mirrors the throwing solve", "[hamiltonian]") {
    const auto h = reference_ham();
    const double r = h.params().discount;
    const double eta = 0.5 * h.max_value(1.5, 0.7) / r;
    const MinusRoot m = h.minus_root(1.5, eta, 0.7);
    REQUIRE(m.feasible);
    CHECK_THAT(m.xi, WithinAbs(h.branch_costate(Branch::Minus, 1.5, eta, 0.7), 1e-12));
    CHECK_FALSE(h.minus_root(1.5, 2 * h.max_value(1.5, 0.7) / r, 0.7).feasible);
}

TEST_CASE("Hoelder constant dominates sampled ratios", "[hamiltonian]") {
    const auto h = reference_ham();
    const double r = h.params().discount;
    const double B = h.params().bankruptcy_cost;
    const double x1 = 0.5, p1 = 0.5;
    const double C = h.holder_constant(x1, p1);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ux(x1, h.params().x_bankrupt), up(p1, 1.0), uu(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double x = ux(rng), p = up(rng);
        const double top = std::min(h.max_value(x, p) / r, 2 * B);
        const double e1 = top * uu(rng), e2 = top * uu(rng);
        if (e1 <= 0 || e2 <= 0 || e1 == e2) continue;
        const double d = std::abs(h.branch_costate(Branch::Minus, x, e1, p) -
                                  h.branch_costate(Branch::Minus, x, e2, p));
        worst = std::max(worst, d / std::sqrt(std::abs(e1 - e2)));
    }
    CHECK(worst <= C);
}

TEST_CASE("curve dump", "[hamiltonian]") {
    std::ostringstream os;
    write_hamiltonian_curve(os, reference_ham(), 1.0, 1.0, 0.5, 11);
    const std::string s = os.str();
    CHECK(s.find("xi") != std::string::npos);
    CHECK(std::count(s.begin(), s.end(), '\n') >= 12);
}
