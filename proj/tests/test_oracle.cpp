#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "gsmlayer/oracle.hpp"

using namespace gsml;

namespace {

constexpr double f_hz = 3.5e9;
constexpr double omega = 2.0 * pi * f_hz;
const double k1 = omega / speed_of_light;

} // namespace

TEST_CASE("shell points are deterministic and stay inside their shell") {
    const auto pts = shell_points(40, 1.0, 2.0, k1, 77u);
    REQUIRE(pts.size() == 40);
    for (const auto& r : pts) {
        const double kr = k1 * r.norm();
        CHECK(kr >= 1.0 - 1e-12);
        CHECK(kr <= 2.0 + 1e-12);
    }
    const auto again = shell_points(40, 1.0, 2.0, k1, 77u);
    for (std::size_t q = 0; q < pts.size(); ++q)
        CHECK((pts[q] - again[q]).norm() == 0.0);
    const auto other = shell_points(40, 1.0, 2.0, k1, 78u);
    CHECK((pts[0] - other[0]).norm() > 0.0);
}

TEST_CASE("plane grid lies on the interface with staggered rings") {
    const double z_i = -0.12;
    const auto pts = plane_grid(z_i, {0.1, 0.3}, 4);
    REQUIRE(pts.size() == 8);
    for (const auto& r : pts) CHECK(r.z() == z_i);

    // ring radii scale with |z_interface| so probes stay well inside the
    // reflected expansion's convergence sphere |r| < 2 |z_interface|
    for (int a = 0; a < 4; ++a) {
        CHECK(std::hypot(pts[a].x(), pts[a].y()) ==
              doctest::Approx(0.1 * std::abs(z_i)).epsilon(1e-12));
        CHECK(std::hypot(pts[4 + a].x(), pts[4 + a].y()) ==
              doctest::Approx(0.3 * std::abs(z_i)).epsilon(1e-12));
    }
    // successive rings never share an azimuth
    const double beta0 = std::atan2(pts[0].y(), pts[0].x());
    const double beta1 = std::atan2(pts[4].y(), pts[4].x());
    CHECK(std::abs(beta1 - beta0) > 1e-3);
}

TEST_CASE("transform identity holds for the lowest modes") {
    const auto pts = shell_points(6, 0.8, 1.6, k1, 5u);
    for (const svwf_index& n :
         {svwf_index{1, 0, 0, 1}, svwf_index{2, 0, 0, 1}, svwf_index{2, 1, 1, 1}}) {
        const double err = check_transform_identity(n, k1, pts, 32, 32);
        CHECK(err <= 1e-5);
    }
    CHECK_THROWS_AS(check_transform_identity(svwf_index{1, 0, 0, 1}, k1, {}, 8, 8),
                    std::invalid_argument);
}

TEST_CASE("boundary residual vanishes on a conducting plane") {
    // interface deep enough that the image scale 2k|z_i| ~ 29 beats the
    // growth rate of the highest expansion orders along the evanescent tail
    // (~(l_exp + l_src)/kappa_m ~ 20), so the truncated contour converges
    const double z_i = -0.2;
    layer_stack pec;
    pec.z_interface = z_i;
    pec.bottom = termination::pec;

    // clears the Bessel turnover k*max|r| ~ 16.5 of the probe grid with
    // enough margin for the image-source expansion to decay
    const int l_exp = 29;
    const svwf_basis basis = make_svwf_basis(l_exp);
    contour_spec contour;
    contour.kappa_m = kappa_rule(8, 4.0);
    const wmatrix w = assemble_w(basis, pec, k1, omega, contour);

    std::vector<int> sources;
    for (int q = 0; q < basis.size(); ++q)
        if (basis.modes[q].l <= 2) sources.push_back(q);
    const auto pts = plane_grid(z_i, {0.05, 0.15, 0.28, 0.40, 0.52}, 5);

    const auto res = check_pec_boundary(sources, z_i, k1, w, pts);
    MESSAGE("pec tangential residual: " << res.max_residual);
    CHECK(res.max_residual <= 1e-3);
    CHECK(res.per_source.size() == sources.size());
    for (const auto& [n, resid] : res.per_source) CHECK(resid <= 1e-3);

    // negative control: flipping the evanescent segment's orientation breaks
    // the spectral completeness and the cancellation with it
    contour_spec flipped = contour;
    flipped.flip_evanescent = true;
    const wmatrix wf = assemble_w(basis, pec, k1, omega, flipped);
    const auto bad = check_pec_boundary(sources, z_i, k1, wf, pts);
    CHECK(bad.max_residual >= 0.1);

    CHECK_THROWS_AS(check_pec_boundary({}, z_i, k1, w, pts), std::invalid_argument);
    CHECK_THROWS_AS(check_pec_boundary({basis.size()}, z_i, k1, w, pts),
                    std::invalid_argument);
}

TEST_CASE("reflected-field check degenerates gracefully without contrast") {
    layer_stack vac;
    vac.z_interface = -0.1;
    vac.bottom = termination::half_space;  // identical media: nothing reflects

    const svwf_basis basis = make_svwf_basis(3);
    contour_spec contour;
    contour.kappa_m = 1.3;
    const wmatrix w = assemble_w(basis, vac, k1, omega, contour);

    const auto pts = shell_points(5, 1.0, 2.0, k1, 9u);
    const double err = check_reflected_field(svwf_index{2, 0, 0, 1}, vac, omega,
                                             pts, w, contour, 32);
    CHECK(err == 0.0);  // both sides are exactly zero

    CHECK_THROWS_AS(check_reflected_field(svwf_index{2, 0, 0, 1}, vac, omega, {},
                                          w, contour, 32),
                    std::invalid_argument);
}
