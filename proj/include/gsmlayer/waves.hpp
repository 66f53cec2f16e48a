#pragma once

// Spherical and planar vector wave functions, the canonical mode basis, and
// the spherical->planar coupling coefficients used by the transformation
// matrix assembly.

#include <Eigen/Core>
#include <string>
#include <utility>
#include <vector>

#include "gsmlayer/common.hpp"
#include "gsmlayer/specfun.hpp"

namespace gsml {

// one spherical mode: tau = 1 (TE, no radial E) / 2 (TM), sigma = 0 (even,
// cos m beta) / 1 (odd, sin m beta), azimuthal order m >= 0, degree l >= 1
struct svwf_index {
    int tau = 1;
    int sigma = 0;
    int m = 0;
    int l = 1;

    bool operator==(const svwf_index& o) const {
        return tau == o.tau && sigma == o.sigma && m == o.m && l == o.l;
    }
    std::string to_string() const;
};

// canonical ordering: l outermost, then m = 0..l, then sigma (odd skipped for
// m = 0 where sin(m beta) vanishes identically), then tau.  The basis for a
// smaller l_max is a strict prefix of the basis for a larger one, which lets
// truncated operators embed by simple row/column restriction.
struct svwf_basis {
    int l_max = 0;
    std::vector<svwf_index> modes;

    int size() const { return static_cast<int>(modes.size()); }
    // flat position of a mode in canonical order
    int position(const svwf_index& n) const;
    // basis indices grouped by azimuthal order m (operators above stratified
    // media are block-diagonal in m)
    std::vector<std::vector<int>> indices_by_m() const;
};

svwf_basis make_svwf_basis(int l_max);

// dimension 2 l_max (l_max + 2) without building the mode list
int svwf_basis_size(int l_max);

// plane-wave direction: cos(polar) = u (complex on the evanescent part of the
// spectrum), azimuth beta.  "reflected" selects the upgoing branch produced by
// specular reflection: the polar cosine flips sign while sin(polar) keeps the
// same principal value.
struct pvwf_direction {
    cplx u{1.0, 0.0};
    double beta = 0.0;
    bool reflected = false;
};

// polarization vector of plane wave i (1 = TE, 2 = TM) with the spectral
// normalization absorbed: TE carries j/(4 pi) along the azimuth unit vector,
// TM carries -1/(4 pi) along the polar unit vector
Eigen::Vector3cd eval_pvwf(int i, const pvwf_direction& dir, double k,
                           const Eigen::Vector3d& r);

// spherical wave u_n^{(p)}: p = 1 regular (spherical Bessel j_l), p = 4
// outgoing (Hankel h_l^{(2)}, suited to exp(+j omega t) time dependence).
// p = 4 at r = 0 is singular and throws std::domain_error.
Eigen::Vector3cd eval_svwf(int p, const svwf_index& n, double k,
                           const Eigen::Vector3d& r);

// evaluate every mode of the basis at one point, sharing the Legendre /
// Bessel work across modes; result is indexed by canonical basis position
std::vector<Eigen::Vector3cd> eval_svwf_all(int p, const svwf_basis& basis,
                                            double k, const Eigen::Vector3d& r);

// polar-spectrum coupling coefficient B_{n i}(u): pairs the mode's Delta / pi
// angular function with the plane-wave polarization.  The dagger variant
// conjugates the explicit powers of j (the angular functions themselves are
// evaluated at the same, possibly complex, u).
cplx b_coefficient(const svwf_index& n, int i, const angular_table& ang,
                   bool dagger = false);

// azimuthal coupling A_{n i}(beta) decomposed as c cos(m beta) + s sin(m beta)
std::pair<double, double> azimuthal_cs(int tau, int sigma, int i);

// closed form of the beta integral of A_{n i} A_{n' i} over a full period;
// zero unless the two modes share the same m
double azimuthal_integral(const svwf_index& n, const svwf_index& n2, int i);

} // namespace gsml
