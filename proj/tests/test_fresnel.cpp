#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "gsmlayer/fresnel.hpp"
#include "support/oracles.hpp"

using namespace gsml;

namespace {

layer_stack vacuum_over(layer bottom) {
    layer_stack s;
    s.z_interface = -0.1;
    s.bottom = termination::half_space;
    s.bottom_medium = bottom;
    return s;
}

constexpr double f_hz = 3.5e9;
constexpr double omega = 2.0 * pi * f_hz;

} // namespace

TEST_CASE("longitudinal wavenumber branch") {
    layer vac;  // top medium itself
    const double k1 = omega / speed_of_light;
    // evanescent spectral point u = j in the top medium: kz = -j k1 (decaying)
    const cplx kz_ev = kz_in_layer(vac, cplx(0.0, 1.0), omega, k1);
    CHECK(std::abs(kz_ev - cplx(0.0, -k1)) <= 1e-9 * k1);
    // grazing point u = 0 in an eps_r = 4 medium: kz = sqrt(3) k1, purely real
    layer eps4;
    eps4.eps_r = 4.0;
    const cplx kz0 = kz_in_layer(eps4, cplx(0.0, 0.0), omega, k1);
    CHECK(std::abs(kz0 - cplx(std::sqrt(3.0) * k1, 0.0)) <= 1e-9 * k1);
    // normal incidence |u| = 1: kz = k_n
    const cplx kzn = kz_in_layer(eps4, cplx(-1.0, 0.0), omega, k1);
    CHECK(std::abs(kzn - cplx(2.0 * k1, 0.0)) <= 1e-9 * k1);
    // lossy medium decays: Im(kz) < 0
    layer lossy;
    lossy.eps_r = 81.0;
    lossy.sigma = 4.0;
    CHECK(kz_in_layer(lossy, cplx(-0.3, 0.0), omega, k1).imag() < 0.0);
    CHECK(kz_in_layer(lossy, cplx(0.0, 0.7), omega, k1).imag() < 0.0);
}

TEST_CASE("normal-incidence reflection from an eps_r = 4 half-space") {
    layer eps4;
    eps4.eps_r = 4.0;
    const layer_stack s = vacuum_over(eps4);
    // impedance halves, so the TE coefficient is (1/2-1)/(1/2+1) = -1/3; the
    // TM convention flips the sign at normal incidence
    const cplx te = rho_stack(1, s, cplx(-1.0, 0.0), omega);
    const cplx tm = rho_stack(2, s, cplx(-1.0, 0.0), omega);
    CHECK(std::abs(te - cplx(-1.0 / 3.0, 0.0)) <= 1e-14);
    CHECK(std::abs(tm - cplx(1.0 / 3.0, 0.0)) <= 1e-14);
}

TEST_CASE("terminations: perfect electric / magnetic walls") {
    layer_stack pec;
    pec.z_interface = -0.1;
    pec.bottom = termination::pec;
    layer_stack pmc = pec;
    pmc.bottom = termination::pmc;
    for (const cplx u : {cplx(-0.3, 0.0), cplx(-0.95, 0.0), cplx(0.0, 1.2)}) {
        CHECK(rho_stack(1, pec, u, omega) == cplx(-1.0, 0.0));
        CHECK(rho_stack(2, pec, u, omega) == cplx(1.0, 0.0));
        CHECK(rho_stack(1, pmc, u, omega) == cplx(1.0, 0.0));
        CHECK(rho_stack(2, pmc, u, omega) == cplx(-1.0, 0.0));
    }
}

TEST_CASE("identical media reflect nothing, exactly") {
    layer_stack s;
    s.z_interface = -0.2;
    s.bottom = termination::half_space;
    // above defaults to vacuum; make the backing identical vacuum
    for (const cplx u : {cplx(-0.5, 0.0), cplx(0.0, 0.8), cplx(-0.999, 0.0)}) {
        CHECK(rho_stack(1, s, u, omega) == cplx(0.0, 0.0));
        CHECK(rho_stack(2, s, u, omega) == cplx(0.0, 0.0));
    }
    // ... including through an interposed layer of the same material
    layer_stack with_layer = s;
    layer vac_layer;
    vac_layer.thickness = 0.03;
    with_layer.layers.push_back(vac_layer);
    CHECK(rho_stack(1, with_layer, cplx(-0.5, 0.0), omega) == cplx(0.0, 0.0));
}

TEST_CASE("passivity: |rho| <= 1 on the propagating spectrum") {
    std::mt19937_64 eng(2024u);
    for (int trial = 0; trial < 40; ++trial) {
        const layer_stack s = testsupport::random_stack(eng);
        for (int q = 1; q <= 20; ++q) {
            const cplx u(-q / 20.5, 0.0);
            for (int i = 1; i <= 2; ++i) {
                CAPTURE(trial);
                CAPTURE(q);
                CHECK(std::abs(rho_stack(i, s, u, omega)) <= 1.0 + 1e-12);
            }
        }
    }
}

TEST_CASE("extreme conductivity approaches the electric wall") {
    layer metal;
    metal.eps_r = 1.0;
    metal.sigma = 1e9;
    const layer_stack s = vacuum_over(metal);
    const cplx u(-0.5, 0.0);
    CHECK(std::abs(rho_stack(1, s, u, omega) - cplx(-1.0, 0.0)) <= 1e-4);
    CHECK(std::abs(rho_stack(2, s, u, omega) - cplx(1.0, 0.0)) <= 1e-4);
}

TEST_CASE("half-wave layer is transparent at normal incidence") {
    const double k1 = omega / speed_of_light;
    layer slab;
    slab.eps_r = 9.0;
    slab.thickness = pi / (3.0 * k1);  // kz h = pi inside the layer
    layer back;
    back.eps_r = 4.0;
    layer_stack s = vacuum_over(back);
    s.layers.push_back(slab);
    const layer_stack bare = vacuum_over(back);
    for (int i = 1; i <= 2; ++i) {
        const cplx with = rho_stack(i, s, cplx(-1.0, 0.0), omega);
        const cplx without = rho_stack(i, bare, cplx(-1.0, 0.0), omega);
        CHECK(std::abs(with - without) <= 1e-12);
    }
}

TEST_CASE("recursion agrees with the transfer-matrix oracle") {
    std::mt19937_64 eng(77u);
    double worst = 0.0;
    for (int trial = 0; trial < 30; ++trial) {
        const layer_stack s = testsupport::random_stack(eng);
        for (int q = 0; q < 20; ++q) {
            const cplx u = testsupport::random_contour_u(eng, 1.5);
            for (int i = 1; i <= 2; ++i) {
                const cplx mine = rho_stack(i, s, u, omega);
                const cplx ref = testsupport::transfer_matrix_rho(i, s, u, omega);
                const double rel =
                    std::abs(mine - ref) / std::max(std::abs(ref), 1e-6);
                worst = std::max(worst, rel);
                CAPTURE(trial);
                CAPTURE(i);
                CAPTURE(u.real());
                CAPTURE(u.imag());
                CHECK(rel <= 1e-12);
            }
        }
    }
    MESSAGE("worst relative deviation vs transfer matrix: ", worst);
}

TEST_CASE("seawater half-space anchor against the oracle") {
    layer sea;
    sea.eps_r = 81.0;
    sea.sigma = 4.0;
    const layer_stack s = vacuum_over(sea);
    for (const cplx u : {cplx(-0.6, 0.0), cplx(0.0, 1.3)}) {
        for (int i = 1; i <= 2; ++i) {
            const cplx mine = rho_stack(i, s, u, omega);
            const cplx ref = testsupport::transfer_matrix_rho(i, s, u, omega);
            CHECK(std::abs(mine - ref) <= 1e-13 * std::max(1.0, std::abs(ref)));
            // passivity bound applies on the propagating (real-u) spectrum
            if (u.imag() == 0.0) CHECK(std::abs(mine) <= 1.0);
        }
    }
}

TEST_CASE("stack validation rejects unphysical inputs") {
    layer_stack s;
    s.z_interface = 0.1;  // interface must sit below the antenna
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.z_interface = -0.1;
    s.above.sigma = 2.0;  // lossy top medium unsupported
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.above.sigma = 0.0;
    layer bad;
    bad.thickness = 0.0;
    s.layers.push_back(bad);
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.layers.clear();
    s.bottom_medium.eps_r = 0.5;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.bottom_medium.eps_r = 4.0;
    CHECK_NOTHROW(s.validate());
}

TEST_CASE("stack fingerprints distinguish geometry and materials") {
    layer_stack a;
    a.z_interface = -0.1;
    a.bottom_medium.eps_r = 4.0;
    layer_stack b = a;
    CHECK(a.fingerprint() == b.fingerprint());
    b.bottom_medium.eps_r = 4.0000001;
    CHECK(a.fingerprint() != b.fingerprint());
    layer_stack c = a;
    c.z_interface = -0.11;
    CHECK(a.fingerprint() != c.fingerprint());
    layer_stack d = a;
    d.bottom = termination::pec;
    CHECK(a.fingerprint() != d.fingerprint());
}
