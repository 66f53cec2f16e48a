#pragma once

// Special functions: normalized associated Legendre tables (complex argument),
// the derived polar angular functions, spherical Bessel/Hankel radial factors,
// and Gauss-Legendre rules.  Everything downstream builds on these.

#include <vector>

#include "gsmlayer/common.hpp"

namespace gsml {

// Table of P~_l^m(u): associated Legendre functions carrying the
// Condon-Shortley phase, normalized to unit L2 norm on [-1,1]:
//   integral |P~_l^m(u)|^2 du = 1  (for real u).
// The argument may be complex (evanescent spectral points u = j*t).
// Derivatives d/du are stored alongside; at u = +-1 they are valid for
// m = 0 only (the angular_table below handles the polar limits).
struct legendre_table {
    int l_max = 0;
    cplx u;
    std::vector<cplx> p, dp;  // packed over (l,m), 0 <= m <= l <= l_max

    static std::size_t slot(int l, int m) {
        return static_cast<std::size_t>(l) * (l + 1) / 2 + m;
    }
    cplx value(int l, int m) const { return p[slot(l, m)]; }
    cplx derivative(int l, int m) const { return dp[slot(l, m)]; }
};

// Build the table by the m-seeded three-term recurrence.  Magnitudes are
// capped at 1e280; exceeding the cap throws std::overflow_error naming
// (l, m, u) so the offending configuration is identifiable.
legendre_table make_legendre_table(cplx u, int l_max);

// Polar angular functions of the vector spherical harmonics:
//   delta_l^m(u) = -sqrt(1-u^2) * dP~_l^m/du / sqrt(l(l+1))
//   pi_l^m(u)    = -m * P~_l^m(u) / (sqrt(l(l+1)) * sqrt(1-u^2))
// At u = +-1 only m = 1 survives, with
//   delta_l^1(+1) = -sqrt((2l+1)/8),  pi_l^1(+1) = +sqrt((2l+1)/8)
// and parity delta(-u) = (-1)^(l+m+1) delta(u), pi(-u) = (-1)^(l+m) pi(u).
struct angular_table {
    int l_max = 0;
    cplx u;
    std::vector<cplx> delta, pi;

    static std::size_t slot(int l, int m) { return legendre_table::slot(l, m); }
    cplx delta_lm(int l, int m) const { return delta[slot(l, m)]; }
    cplx pi_lm(int l, int m) const { return pi[slot(l, m)]; }
};

angular_table make_angular_table(const legendre_table& t);

// Spherical Bessel radial factors.  kind = 1 gives j_l (regular, downward
// Miller recurrence); kind = 4 gives h_l^(2) = j_l - i*y_l (outgoing under
// the e^{+j omega t} convention; y_l by upward recurrence).  x must be
// nonnegative, and strictly positive for kind 4 (outgoing waves are
// singular at the origin).
std::vector<cplx> spherical_bessel(int kind, int l_max, double x);

// Gauss-Legendre rule on [-1,1].  order in [1, 512]; nodes by Newton
// iteration on P_n, weights 2 / ((1-x^2) P_n'(x)^2).
struct quad_rule {
    std::vector<double> nodes, weights;
};

quad_rule gauss_legendre(int order);

} // namespace gsml
