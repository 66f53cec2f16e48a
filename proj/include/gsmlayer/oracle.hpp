#pragma once

// Brute-force validators that anchor the convention choices: the spectral
// transform identity for regular spherical waves, the PEC boundary-condition
// residual of the assembled interaction matrix, and point-sampled reflected
// fields against direct contour integration.  These are deliberately slow and
// independent of the fast assembly path.

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "gsmlayer/fresnel.hpp"
#include "gsmlayer/waves.hpp"
#include "gsmlayer/wmatrix.hpp"

namespace gsml {

// deterministic random points on a spherical shell k|r| in [kr_lo, kr_hi]
std::vector<Eigen::Vector3d> shell_points(int count, double kr_lo, double kr_hi,
                                          double k, std::uint64_t seed);

// rings of sample points on the plane z = z_interface; ring radii are
// radii_frac * |z_interface| with n_azimuth points each, successive rings
// staggered in azimuth; the scale keeps probes inside the convergence sphere
// |r| < 2 |z_interface| of the regular reflected-field expansion
std::vector<Eigen::Vector3d> plane_grid(double z_interface,
                                        const std::vector<double>& radii_frac,
                                        int n_azimuth);

// regular wave vs its propagating-spectrum double quadrature (full polar
// range, trapezoid in azimuth); returns the max relative field error over
// the points
double check_transform_identity(const svwf_index& n, double k,
                                const std::vector<Eigen::Vector3d>& points,
                                int n_alpha, int n_beta);

struct pec_boundary_result {
    double max_residual = 0.0;
    // per source: max over points of |tangential total| normalized by the
    // outgoing wave's own tangential magnitude
    std::vector<std::pair<svwf_index, double>> per_source;
};

// tangential-field cancellation of outgoing + expanded reflected waves on a
// perfectly conducting plane; sources are basis positions within w.basis
pec_boundary_result check_pec_boundary(const std::vector<int>& sources,
                                       double z_interface, double k,
                                       const wmatrix& w,
                                       const std::vector<Eigen::Vector3d>& points);

// expanded reflected field of one outgoing source vs direct numerical
// integration of the reflected spectrum over the same truncated contour
// (independent quadrature, per-point plane-wave evaluation)
double check_reflected_field(const svwf_index& n, const layer_stack& stack,
                             double omega,
                             const std::vector<Eigen::Vector3d>& points,
                             const wmatrix& w, const contour_spec& quad_contour,
                             int n_beta);

} // namespace gsml
