#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>

#include "gsmlayer/specfun.hpp"
#include "support/oracles.hpp"

using namespace gsml;
using testsupport::legendre_oracle;

TEST_CASE("normalized Legendre matches the extended-precision oracle") {
    const int l_max = 17;
    // real interior points, near-pole, and evanescent (imaginary) arguments
    const cplx args[] = {cplx(0.3, 0.0), cplx(-0.77, 0.0), cplx(0.999, 0.0),
                         cplx(0.0, 0.35), cplx(0.0, 1.31), cplx(0.0, 2.6)};
    for (const cplx u : args) {
        CAPTURE(u.real());
        CAPTURE(u.imag());
        const legendre_table t = make_legendre_table(u, l_max);
        for (int l = 0; l <= l_max; ++l)
            for (int m = 0; m <= l; ++m) {
                const cplx ref = legendre_oracle(l, m, u);
                const double scale = std::max(std::abs(ref), 1.0);
                CAPTURE(l);
                CAPTURE(m);
                CHECK(std::abs(t.value(l, m) - ref) <= 1e-10 * scale);
            }
    }
}

TEST_CASE("Legendre seeds and fixed values") {
    const legendre_table t0 = make_legendre_table(cplx(0.0, 0.0), 2);
    CHECK(t0.value(0, 0).real() == doctest::Approx(1.0 / std::sqrt(2.0)));
    // P~_1^1(0) = -sqrt(3)/2: Condon-Shortley sign is part of the convention
    CHECK(t0.value(1, 1).real() == doctest::Approx(-std::sqrt(3.0) / 2.0));
    CHECK(t0.value(1, 0).real() == doctest::Approx(0.0));
    // P~_2^0(u) = sqrt(5/2) (3u^2-1)/2
    const legendre_table t = make_legendre_table(cplx(0.6, 0.0), 2);
    CHECK(t.value(2, 0).real() ==
          doctest::Approx(std::sqrt(2.5) * (3.0 * 0.36 - 1.0) / 2.0));
}

TEST_CASE("Legendre derivative agrees with central differences") {
    const int l_max = 9;
    const double h = 1e-6;
    for (const cplx u : {cplx(0.42, 0.0), cplx(0.0, 0.8)}) {
        const legendre_table t = make_legendre_table(u, l_max);
        const legendre_table tp = make_legendre_table(u + h, l_max);
        const legendre_table tm = make_legendre_table(u - h, l_max);
        for (int l = 1; l <= l_max; ++l)
            for (int m = 0; m <= l; ++m) {
                const cplx fd = (tp.value(l, m) - tm.value(l, m)) / (2.0 * h);
                const double scale = std::max(std::abs(fd), 1.0);
                CAPTURE(l);
                CAPTURE(m);
                CHECK(std::abs(t.derivative(l, m) - fd) <= 2e-4 * scale);
            }
    }
}

TEST_CASE("Legendre endpoint derivative for m = 0") {
    // dP~_l^0/du at u = +-1 is (+-1)^(l+1) l(l+1)/2 sqrt((2l+1)/2)
    for (const double s : {1.0, -1.0}) {
        const legendre_table t = make_legendre_table(cplx(s, 0.0), 6);
        for (int l = 1; l <= 6; ++l) {
            const double expect = std::pow(s, l + 1) * l * (l + 1) / 2.0 *
                                  std::sqrt((2.0 * l + 1.0) / 2.0);
            CHECK(t.derivative(l, 0).real() == doctest::Approx(expect));
            CHECK(t.derivative(l, 0).imag() == doctest::Approx(0.0));
        }
    }
}

TEST_CASE("Legendre overflow raises a descriptive error") {
    CHECK_THROWS_AS(make_legendre_table(cplx(0.0, 200.0), 140), std::overflow_error);
    try {
        make_legendre_table(cplx(0.0, 200.0), 140);
    } catch (const std::overflow_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("l=") != std::string::npos);
        CHECK(msg.find("u=") != std::string::npos);
    }
}

TEST_CASE("angular functions: interior definition and parity") {
    const int l_max = 8;
    const cplx u(0.37, 0.0);
    const legendre_table t = make_legendre_table(u, l_max);
    const angular_table a = make_angular_table(t);
    const angular_table a_neg =
        make_angular_table(make_legendre_table(-u, l_max));
    const cplx s = std::sqrt(1.0 - u * u);
    for (int l = 1; l <= l_max; ++l)
        for (int m = 0; m <= l; ++m) {
            const double nl = std::sqrt(static_cast<double>(l) * (l + 1));
            CHECK(std::abs(a.delta_lm(l, m) - (-s * t.derivative(l, m) / nl)) <= 1e-14);
            CHECK(std::abs(a.pi_lm(l, m) - (-double(m) * t.value(l, m) / (nl * s))) <=
                  1e-14);
            // parity across u -> -u
            const double pd = ((l + m + 1) % 2 == 0) ? 1.0 : -1.0;
            const double pp = ((l + m) % 2 == 0) ? 1.0 : -1.0;
            CHECK(std::abs(a_neg.delta_lm(l, m) - pd * a.delta_lm(l, m)) <= 1e-13);
            CHECK(std::abs(a_neg.pi_lm(l, m) - pp * a.pi_lm(l, m)) <= 1e-13);
        }
}

TEST_CASE("angular functions at the poles") {
    for (const double s : {1.0, -1.0}) {
        const angular_table a =
            make_angular_table(make_legendre_table(cplx(s, 0.0), 7));
        for (int l = 1; l <= 7; ++l) {
            const double v = std::sqrt((2.0 * l + 1.0) / 8.0);
            // only m = 1 survives; parity carries the u = -1 values
            const double pd = (s > 0.0) ? 1.0 : (((l + 2) % 2 == 0) ? 1.0 : -1.0);
            const double pp = (s > 0.0) ? 1.0 : (((l + 1) % 2 == 0) ? 1.0 : -1.0);
            CHECK(a.delta_lm(l, 1).real() == doctest::Approx(-v * pd));
            CHECK(a.pi_lm(l, 1).real() == doctest::Approx(v * pp));
            for (int m = 0; m <= l; ++m) {
                if (m == 1) continue;
                CHECK(std::abs(a.delta_lm(l, m)) <= 1e-14);
                CHECK(std::abs(a.pi_lm(l, m)) <= 1e-14);
            }
        }
    }
}

TEST_CASE("spherical Bessel functions: closed forms and cross relation") {
    for (const double x : {0.5, 3.7, 20.0}) {
        const auto j = spherical_bessel(1, 8, x);
        const auto h = spherical_bessel(4, 8, x);
        CHECK(std::abs(j[0] - std::sin(x) / x) <= 1e-14);
        CHECK(std::abs(j[1] - (std::sin(x) / (x * x) - std::cos(x) / x)) <= 1e-14);
        // h_l^(2) = j_l - i y_l, so y_l = i (h_l - j_l); y_0 = -cos x / x
        const cplx y0 = cplx(0, 1) * (h[0] - j[0]);
        CHECK(std::abs(y0 - cplx(-std::cos(x) / x, 0.0)) <= 1e-13);
        // cross product j_l y_{l-1} - j_{l-1} y_l = 1/x^2 validates both
        // recurrence directions at once
        for (int l = 1; l <= 8; ++l) {
            const cplx yl = cplx(0, 1) * (h[l] - j[l]);
            const cplx ylm = cplx(0, 1) * (h[l - 1] - j[l - 1]);
            CAPTURE(l);
            CHECK(std::abs(j[l] * ylm - j[l - 1] * yl - 1.0 / (x * x)) <=
                  1e-12 / (x * x) + 1e-15);
        }
    }
}

TEST_CASE("spherical Bessel small-argument behavior") {
    const double x = 1e-8;
    const auto j = spherical_bessel(1, 4, x);
    CHECK(j[0].real() == doctest::Approx(1.0));
    // j_l ~ x^l / (2l+1)!!
    CHECK(j[1].real() == doctest::Approx(x / 3.0));
    CHECK(j[2].real() == doctest::Approx(x * x / 15.0));
    const auto j0 = spherical_bessel(1, 2, 0.0);
    CHECK(j0[0].real() == 1.0);
    CHECK(j0[1] == cplx(0.0, 0.0));
    CHECK_THROWS_AS(spherical_bessel(4, 2, 0.0), std::domain_error);
}

TEST_CASE("Gauss-Legendre rule: exactness, symmetry, weight sum") {
    const quad_rule q = gauss_legendre(10);
    REQUIRE(q.nodes.size() == 10);
    double wsum = 0.0;
    for (double w : q.weights) wsum += w;
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    for (std::size_t i = 1; i < q.nodes.size(); ++i)
        CHECK(q.nodes[i] > q.nodes[i - 1]);
    // order n integrates polynomials of degree <= 2n-1 exactly
    for (int deg = 0; deg <= 19; ++deg) {
        double acc = 0.0;
        for (std::size_t i = 0; i < q.nodes.size(); ++i)
            acc += q.weights[i] * std::pow(q.nodes[i], deg);
        const double exact = (deg % 2 == 0) ? 2.0 / (deg + 1) : 0.0;
        CAPTURE(deg);
        CHECK(std::abs(acc - exact) <= 1e-13);
    }
    CHECK_THROWS_AS(gauss_legendre(0), std::invalid_argument);
    CHECK_THROWS_AS(gauss_legendre(513), std::invalid_argument);
}
