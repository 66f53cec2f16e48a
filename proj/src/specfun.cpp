#include "gsmlayer/specfun.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gsml {

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

legendre_table make_legendre_table(cplx u, int l_max) {
    if (l_max < 0)
        throw std::invalid_argument("make_legendre_table: l_max must be nonnegative");
    constexpr double cap = 1e280;

    legendre_table t;
    t.l_max = l_max;
    t.u = u;
    const std::size_t n = legendre_table::slot(l_max, l_max) + 1;
    t.p.assign(n, cplx{});
    t.dp.assign(n, cplx{});

    const cplx s = std::sqrt(1.0 - u * u);  // principal branch; real >= 0 on [-1,1] and on j*t
    auto check = [&](cplx v, int l, int m) {
        if (std::abs(v) > cap) {
            std::ostringstream os;
            os << "make_legendre_table: overflow at l=" << l << " m=" << m
               << " u=(" << u.real() << "," << u.imag() << ")";
            throw std::overflow_error(os.str());
        }
        return v;
    };

    // diagonal seed P~_0^0 = 1/sqrt(2); P~_m^m descends the diagonal with the
    // Condon-Shortley sign folded in
    t.p[0] = 1.0 / std::sqrt(2.0);
    for (int m = 1; m <= l_max; ++m) {
        cplx prev = t.p[legendre_table::slot(m - 1, m - 1)];
        cplx v = -prev * std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
        t.p[legendre_table::slot(m, m)] = check(v, m, m);
    }
    // first off-diagonal, then the l recurrence at fixed m
    for (int m = 0; m < l_max; ++m) {
        cplx pmm = t.p[legendre_table::slot(m, m)];
        t.p[legendre_table::slot(m + 1, m)] =
            check(std::sqrt(2.0 * m + 3.0) * u * pmm, m + 1, m);
        for (int l = m + 2; l <= l_max; ++l) {
            double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
            double b = std::sqrt((double(l - 1) * (l - 1) - double(m) * m) /
                                 (4.0 * double(l - 1) * (l - 1) - 1.0));
            cplx v = a * (u * t.p[legendre_table::slot(l - 1, m)] -
                          b * t.p[legendre_table::slot(l - 2, m)]);
            t.p[legendre_table::slot(l, m)] = check(v, l, m);
        }
    }

    // derivative d/du from the l-lowering relation; undefined at u = +-1 for
    // m >= 1 (the angular limits are taken separately)
    const cplx one_minus_u2 = 1.0 - u * u;
    const bool at_pole = std::abs(one_minus_u2) < 1e-28;
    for (int m = 0; m <= l_max; ++m) {
        for (int l = m; l <= l_max; ++l) {
            if (at_pole) {
                if (m == 0) {
                    // P~_l'(+-1) = sign^(l+1) * l(l+1)/2 * sqrt((2l+1)/2)
                    double sign = (u.real() >= 0.0) ? 1.0 : ((l % 2 == 0) ? -1.0 : 1.0);
                    t.dp[legendre_table::slot(l, 0)] =
                        sign * 0.5 * l * (l + 1.0) * std::sqrt((2.0 * l + 1.0) / 2.0);
                }
                continue;
            }
            cplx num = -double(l) * u * t.p[legendre_table::slot(l, m)];
            if (l > m)
                num += std::sqrt((2.0 * l + 1.0) * (double(l) * l - double(m) * m) /
                                 (2.0 * l - 1.0)) *
                       t.p[legendre_table::slot(l - 1, m)];
            t.dp[legendre_table::slot(l, m)] = num / one_minus_u2;
        }
    }
    return t;
}

angular_table make_angular_table(const legendre_table& t) {
    angular_table a;
    a.l_max = t.l_max;
    a.u = t.u;
    a.delta.assign(t.p.size(), cplx{});
    a.pi.assign(t.p.size(), cplx{});

    const cplx s = std::sqrt(1.0 - t.u * t.u);
    const bool at_pole = std::abs(1.0 - t.u * t.u) < 1e-28;

    if (at_pole) {
        // only m = 1 survives; signs at u = -1 follow the parity relations
        const bool north = t.u.real() >= 0.0;
        for (int l = 1; l <= t.l_max; ++l) {
            double mag = std::sqrt((2.0 * l + 1.0) / 8.0);
            double d = -mag, p = mag;  // values at u = +1
            if (!north) {
                d *= (l % 2 == 0) ? 1.0 : -1.0;   // (-1)^(l+2)
                p *= (l % 2 == 0) ? -1.0 : 1.0;   // (-1)^(l+1)
            }
            a.delta[angular_table::slot(l, 1)] = d;
            a.pi[angular_table::slot(l, 1)] = p;
        }
        return a;
    }

    for (int l = 1; l <= t.l_max; ++l) {
        double norm = std::sqrt(double(l) * (l + 1.0));
        for (int m = 0; m <= l; ++m) {
            a.delta[angular_table::slot(l, m)] =
                -s * t.dp[legendre_table::slot(l, m)] / norm;
            a.pi[angular_table::slot(l, m)] =
                -double(m) * t.p[legendre_table::slot(l, m)] / (norm * s);
        }
    }
    return a;
}

std::vector<cplx> spherical_bessel(int kind, int l_max, double x) {
    if (kind != 1 && kind != 4)
        throw std::invalid_argument("spherical_bessel: kind must be 1 (j_l) or 4 (h_l^(2))");
    if (l_max < 0)
        throw std::invalid_argument("spherical_bessel: l_max must be nonnegative");
    if (x < 0.0)
        throw std::domain_error("spherical_bessel: argument must be nonnegative");
    if (kind == 4 && x == 0.0)
        throw std::domain_error("spherical_bessel: outgoing h_l^(2) is singular at x=0");

    std::vector<cplx> out(l_max + 1);

    // regular part j_l
    std::vector<double> j(l_max + 1, 0.0);
    if (x == 0.0) {
        j[0] = 1.0;
    } else if (x < 1e-6) {
        // series avoids the 0/0 in the Miller normalization for tiny x
        double num = 1.0;
        for (int l = 0; l <= l_max; ++l) {
            if (l > 0) num *= x / (2.0 * l + 1.0);
            j[l] = num * (1.0 - x * x / (2.0 * (2.0 * l + 3.0)));
        }
    } else {
        int start = l_max + 16 + static_cast<int>(std::ceil(x));
        double jp = 0.0, jc = 1e-280;
        std::vector<double> tmp(l_max + 1, 0.0);
        for (int l = start; l >= 0; --l) {
            double jm = (2.0 * l + 3.0) / x * jc - jp;
            jp = jc;
            jc = jm;
            if (l <= l_max) tmp[l] = jc;
            if (std::abs(jc) > 1e250) {  // renormalize mid-flight
                double scale = 1e-250;
                jc *= scale;
                jp *= scale;
                for (int q = l; q <= l_max; ++q) tmp[q] *= scale;
            }
        }
        double scale = (std::sin(x) / x) / tmp[0];
        for (int l = 0; l <= l_max; ++l) j[l] = tmp[l] * scale;
    }

    if (kind == 1) {
        for (int l = 0; l <= l_max; ++l) out[l] = j[l];
        return out;
    }

    // y_l by stable upward recurrence, h^(2) = j - i y
    std::vector<double> y(l_max + 1);
    y[0] = -std::cos(x) / x;
    if (l_max >= 1) y[1] = -std::cos(x) / (x * x) - std::sin(x) / x;
    for (int l = 2; l <= l_max; ++l)
        y[l] = (2.0 * l - 1.0) / x * y[l - 1] - y[l - 2];
    for (int l = 0; l <= l_max; ++l) out[l] = cplx(j[l], -y[l]);
    return out;
}

quad_rule gauss_legendre(int order) {
    if (order < 1 || order > 512)
        throw std::invalid_argument("gauss_legendre: order must lie in [1, 512]");

    quad_rule r;
    r.nodes.assign(order, 0.0);
    r.weights.assign(order, 0.0);

    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Tricomi-style initial guess, then Newton on P_n
        double x = std::cos(pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int l = 2; l <= order; ++l) {
                double p2 = ((2.0 * l - 1.0) * x * p1 - (l - 1.0) * p0) / l;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) {
                // one polishing step, then stop
                p0 = 1.0;
                p1 = x;
                for (int l = 2; l <= order; ++l) {
                    double p2 = ((2.0 * l - 1.0) * x * p1 - (l - 1.0) * p0) / l;
                    p0 = p1;
                    p1 = p2;
                }
                dp = order * (x * p1 - p0) / (x * x - 1.0);
                x -= p1 / dp;
                break;
            }
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[i] = -x;  // ascending order
        r.weights[i] = w;
        r.nodes[order - 1 - i] = x;
        r.weights[order - 1 - i] = w;
    }
    if (order % 2 == 1) r.nodes[order / 2] = 0.0;
    return r;
}

} // namespace gsml
