#pragma once

// Assembly of the spherical-wave interaction matrix W above a stratified
// medium: a truncated spectral contour (real propagating segment plus an
// imaginary evanescent segment), Fresnel-weighted products of the coupling
// coefficients, and the closed-form azimuthal integrals.  W is symmetric and
// block-diagonal in the azimuthal order m.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "gsmlayer/common.hpp"
#include "gsmlayer/fresnel.hpp"
#include "gsmlayer/waves.hpp"

namespace gsml {

struct contour_spec {
    double kappa_m = 1.3;            // truncation of the evanescent segment (> 1)
    double iota = 0.55;              // accuracy parameter feeding kappa_rule
    int quad_order_evanescent = 33;  // Gauss-Legendre order per panel
    int quad_order_propagating = 33;
    // both segments are split into geometric panels graded toward u = 0,
    // where lossy stacks put a TM surface-wave pole close to the path
    int panels_per_segment = 5;
    double panel_ratio = 0.25;
    // negate the evanescent weights: breaks the spectral completeness that
    // boundary-condition checks rely on (used as a negative control)
    bool flip_evanescent = false;

    void validate() const;
    std::uint64_t fingerprint() const;
};

// truncation degree from the circumscribing-sphere electrical size:
// ceil(kR + 2 (kR)^(1/3) + 3)
int lmax_rule(double kr_min);

// empirical contour truncation point (iota l_max + 1)/kR + 0.03 kR, floored
// just above 1; stated validity l_max <= 20 (warns beyond)
double kappa_rule(int l_max, double kr_min, double iota = 0.55);

// quadrature nodes on the truncated contour; evanescent nodes (u = j t,
// weight j dt) come first, then the real propagating nodes on [-1, 0]
struct contour_nodes {
    std::vector<cplx> u;
    std::vector<cplx> w;
    int n_evanescent = 0;
};

contour_nodes make_contour_nodes(const contour_spec& c);

class wmatrix {
public:
    svwf_basis basis;
    double frequency_hz = 0.0;
    std::uint64_t stack_hash = 0;
    std::uint64_t contour_hash = 0;

    std::vector<std::vector<int>> rows_by_m;  // basis indices per m-block
    std::vector<int> pos_in_block;            // basis index -> row within its block
    std::vector<Eigen::MatrixXcd> blocks;     // dense symmetric block per m

    int size() const { return basis.size(); }
    cplx entry(int row, int col) const;       // exact 0 across m-blocks
    Eigen::MatrixXcd dense() const;
    double max_abs() const;

    // A * W and W * X through the block structure (the full dense product
    // would dominate the solve budget at high truncation degree)
    Eigen::MatrixXcd times_dense_right(const Eigen::MatrixXcd& a) const;
    Eigen::MatrixXcd times_dense_left(const Eigen::MatrixXcd& x) const;
};

// numerical assembly of W for one stack at one frequency; k must match the
// top-medium wavenumber at omega
wmatrix assemble_w(const svwf_basis& basis, const layer_stack& stack, double k,
                   double omega, const contour_spec& contour);

} // namespace gsml
