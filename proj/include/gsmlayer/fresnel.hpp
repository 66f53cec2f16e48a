#pragma once

// Planar stratified media: longitudinal wavenumbers with the decaying branch,
// TE/TM wave impedances, interface reflection coefficients, and the composite
// downward recursion giving the stack reflection rho_i(u) seen from the top
// medium, valid for complex polar cosine u on the spectral contour.

#include <cstdint>
#include <string>
#include <vector>

#include "gsmlayer/common.hpp"

namespace gsml {

struct layer {
    double eps_r = 1.0;      // relative permittivity
    double sigma = 0.0;      // conductivity, S/m
    double mu_r = 1.0;       // relative permeability
    double thickness = 0.0;  // m; ignored for semi-infinite media
};

enum class termination { half_space, pec, pmc };

struct layer_stack {
    double z_interface = -1.0;  // top surface height, antenna-centered (< 0)
    layer above;                // medium filling z > z_interface (lossless)
    std::vector<layer> layers;  // finite layers, listed top to bottom
    termination bottom = termination::half_space;
    layer bottom_medium;        // semi-infinite backing when bottom == half_space

    void validate() const;       // throws std::invalid_argument
    std::uint64_t fingerprint() const;  // material + geometry hash for caching
    std::size_t interface_count() const {
        return layers.size() + 1;  // top surface plus one per finite layer
    }
};

// complex permittivity eps_r eps0 - j sigma / omega (passive: Im <= 0)
cplx medium_eps(const layer& lay, double omega);

// wavenumber of the (lossless) top medium
double k_top(const layer_stack& stack, double omega);

// longitudinal wavenumber sqrt(k_n^2 - k1^2 (1 - u^2)): principal square
// root, then flipped if Im > 0 so the wave decays under exp(+j omega t);
// ties (Im == 0) keep Re >= 0
cplx kz_in_layer(const layer& lay, cplx u, double omega, double k1);

// TE (i=1): omega mu / kz; TM (i=2): kz / (omega eps)
cplx wave_impedance(int i, const layer& lay, cplx u, double omega, double k1);

// reflection coefficient at interface n (1-based from the top surface) seen
// from above: (-1)^(i+1) (Z_below - Z_above)/(Z_below + Z_above), computed
// from the impedance ratio for stability at extreme conductivities.  PEC /
// PMC terminations are the Z -> 0 / Z -> inf limits.
cplx interface_gamma(int i, const layer_stack& stack, int n_interface, cplx u,
                     double omega);

// composite reflection of the whole stack at the top surface: downward
// recursion from the terminating interface with round-trip factors
// exp(-2 j kz h) per finite layer
cplx rho_stack(int i, const layer_stack& stack, cplx u, double omega);

} // namespace gsml
