#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

#include "gsmlayer/wcache.hpp"
#include "gsmlayer/wmatrix.hpp"

using namespace gsml;

namespace {

constexpr double f_hz = 3.5e9;
constexpr double omega = 2.0 * pi * f_hz;
const double k1 = omega / speed_of_light;

layer_stack pec_stack(double z_i = -0.1) {
    layer_stack s;
    s.z_interface = z_i;
    s.bottom = termination::pec;
    return s;
}

layer_stack eps4_stack(double z_i = -0.1) {
    layer_stack s;
    s.z_interface = z_i;
    s.bottom = termination::half_space;
    s.bottom_medium.eps_r = 4.0;
    return s;
}

} // namespace

TEST_CASE("truncation-degree rule") {
    CHECK(lmax_rule(1.0) == 6);
    CHECK(lmax_rule(9.785) == 18);
    CHECK(lmax_rule(0.001) == 4);  // floor of the rule as kR -> 0 is ceil(3+)
    CHECK_THROWS_AS(lmax_rule(0.0), std::invalid_argument);
    CHECK_THROWS_AS(lmax_rule(-1.0), std::invalid_argument);
}

TEST_CASE("contour-truncation rule") {
    CHECK(kappa_rule(1, 1.0, 0.0) == doctest::Approx(1.03));
    CHECK(kappa_rule(17, 9.785) == doctest::Approx(1.35126).epsilon(1e-4));
    CHECK(kappa_rule(20, 20.0) == doctest::Approx(1.2));
    // the rule can dip below 1 at intermediate kR; it is floored just above
    CHECK(kappa_rule(1, 7.19) == doctest::Approx(1.000001));
    CHECK_THROWS_AS(kappa_rule(0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(kappa_rule(5, 0.0), std::invalid_argument);
}

TEST_CASE("contour validation") {
    contour_spec c;
    CHECK_NOTHROW(c.validate());
    c.kappa_m = 1.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.kappa_m = 1.3;
    c.quad_order_evanescent = 1;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.quad_order_evanescent = 33;
    c.panel_ratio = 1.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.panel_ratio = 0.25;
    c.panels_per_segment = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("contour nodes: segments, orientation, weight sums") {
    contour_spec c;
    c.kappa_m = 1.4;
    c.quad_order_evanescent = 12;
    c.quad_order_propagating = 10;
    const contour_nodes nodes = make_contour_nodes(c);
    CHECK(nodes.n_evanescent == 12 * c.panels_per_segment);
    CHECK(static_cast<int>(nodes.u.size()) ==
          (12 + 10) * c.panels_per_segment);

    cplx ev_sum = 0.0, pr_sum = 0.0;
    for (std::size_t q = 0; q < nodes.u.size(); ++q) {
        if (static_cast<int>(q) < nodes.n_evanescent) {
            // evanescent segment: u on the positive imaginary axis, capped
            CHECK(nodes.u[q].real() == 0.0);
            CHECK(nodes.u[q].imag() > 0.0);
            CHECK(nodes.u[q].imag() < c.kappa_m);
            CHECK(nodes.w[q].real() == 0.0);
            ev_sum += nodes.w[q];
        } else {
            // propagating segment: real u in (-1, 0), positive real weights
            CHECK(nodes.u[q].imag() == 0.0);
            CHECK(nodes.u[q].real() > -1.0);
            CHECK(nodes.u[q].real() < 0.0);
            CHECK(nodes.w[q].imag() == 0.0);
            CHECK(nodes.w[q].real() > 0.0);
            pr_sum += nodes.w[q];
        }
    }
    // weights integrate du over each segment: j kappa_m and 1 respectively
    CHECK(std::abs(ev_sum - cplx(0.0, c.kappa_m)) <= 1e-13);
    CHECK(std::abs(pr_sum - cplx(1.0, 0.0)) <= 1e-13);

    contour_spec flipped = c;
    flipped.flip_evanescent = true;
    const contour_nodes fn = make_contour_nodes(flipped);
    for (int q = 0; q < fn.n_evanescent; ++q)
        CHECK(std::abs(fn.w[q] + nodes.w[q]) <= 1e-16);
}

TEST_CASE("interaction matrix: symmetry and azimuthal block structure") {
    const svwf_basis basis = make_svwf_basis(3);
    contour_spec c;
    c.kappa_m = 1.3;
    const wmatrix w = assemble_w(basis, pec_stack(), k1, omega, c);
    CHECK(w.max_abs() > 1e-3);  // a conducting plane couples strongly
    for (int r = 0; r < basis.size(); ++r)
        for (int col = 0; col < basis.size(); ++col) {
            // exact transpose symmetry (enforced by construction) and exact
            // zeros across different azimuthal orders
            CHECK(w.entry(r, col) == w.entry(col, r));
            if (basis.modes[r].m != basis.modes[col].m)
                CHECK(w.entry(r, col) == cplx(0.0, 0.0));
        }
}

TEST_CASE("interaction matrix vanishes for an identical-media stack") {
    layer_stack vac;
    vac.z_interface = -0.1;  // vacuum over vacuum
    const svwf_basis basis = make_svwf_basis(2);
    contour_spec c;
    c.kappa_m = 1.3;
    const wmatrix w = assemble_w(basis, vac, k1, omega, c);
    CHECK(w.max_abs() == 0.0);
}

TEST_CASE("lower-degree matrix embeds as a prefix of a higher-degree one") {
    contour_spec c;
    c.kappa_m = 1.25;
    const svwf_basis b2 = make_svwf_basis(2);
    const svwf_basis b4 = make_svwf_basis(4);
    const wmatrix w2 = assemble_w(b2, eps4_stack(), k1, omega, c);
    const wmatrix w4 = assemble_w(b4, eps4_stack(), k1, omega, c);
    const Eigen::MatrixXcd d2 = w2.dense();
    const Eigen::MatrixXcd d4 = w4.dense();
    const double scale = w4.max_abs();
    for (int r = 0; r < b2.size(); ++r)
        for (int col = 0; col < b2.size(); ++col)
            CHECK(std::abs(d2(r, col) - d4(r, col)) <= 1e-13 * scale);
}

TEST_CASE("block products match the dense product") {
    const svwf_basis basis = make_svwf_basis(3);
    contour_spec c;
    c.kappa_m = 1.3;
    const wmatrix w = assemble_w(basis, eps4_stack(), k1, omega, c);
    const Eigen::MatrixXcd dense = w.dense();
    std::mt19937_64 eng(31u);
    std::normal_distribution<double> gauss;
    Eigen::MatrixXcd x(basis.size(), 4);
    for (int r = 0; r < x.rows(); ++r)
        for (int col = 0; col < x.cols(); ++col)
            x(r, col) = cplx(gauss(eng), gauss(eng));
    const Eigen::MatrixXcd right = w.times_dense_right(x.transpose());
    const Eigen::MatrixXcd ref_r = x.transpose() * dense;
    CHECK((right - ref_r).cwiseAbs().maxCoeff() <=
          1e-13 * ref_r.cwiseAbs().maxCoeff());
    const Eigen::MatrixXcd left = w.times_dense_left(x);
    const Eigen::MatrixXcd ref_l = dense * x;
    CHECK((left - ref_l).cwiseAbs().maxCoeff() <=
          1e-13 * ref_l.cwiseAbs().maxCoeff());
}

TEST_CASE("assembly validates its inputs") {
    const svwf_basis basis = make_svwf_basis(2);
    contour_spec c;
    c.kappa_m = 1.3;
    // wavenumber inconsistent with the top medium
    CHECK_THROWS_AS(assemble_w(basis, eps4_stack(), 0.5 * k1, omega, c),
                    std::invalid_argument);
    // non-canonical mode ordering
    svwf_basis shuffled = basis;
    std::swap(shuffled.modes[0], shuffled.modes[1]);
    CHECK_THROWS_AS(assemble_w(shuffled, eps4_stack(), k1, omega, c),
                    std::invalid_argument);
}

TEST_CASE("disk cache round-trips bit for bit and rejects corruption") {
    const svwf_basis basis = make_svwf_basis(3);
    contour_spec c;
    c.kappa_m = 1.3;
    const layer_stack stack = eps4_stack();
    const wmatrix w = assemble_w(basis, stack, k1, omega, c);
    const std::uint64_t key =
        w_cache_key(3, stack.fingerprint(), f_hz, c.fingerprint());

    const std::string dir = "wcache_test_dir";
    std::filesystem::remove_all(dir);

    wmatrix loaded;
    CHECK_FALSE(load_wmatrix(dir, key, loaded));  // cold miss
    store_wmatrix(dir, key, w);
    REQUIRE(load_wmatrix(dir, key, loaded));
    REQUIRE(loaded.size() == w.size());
    const Eigen::MatrixXcd a = w.dense(), b = loaded.dense();
    for (int r = 0; r < a.rows(); ++r)
        for (int col = 0; col < a.cols(); ++col) {
            // bit-identical reload: cached runs must reproduce cold runs
            CHECK(a(r, col).real() == b(r, col).real());
            CHECK(a(r, col).imag() == b(r, col).imag());
        }
    CHECK(loaded.frequency_hz == w.frequency_hz);

    // a different key misses rather than aliasing
    wmatrix other;
    CHECK_FALSE(load_wmatrix(dir, key + 1, other));

    // flip one payload byte: the load must fail loudly, not return garbage
    std::string file;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        file = entry.path().string();
    REQUIRE_FALSE(file.empty());
    {
        std::fstream f(file, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(-9, std::ios::end);
        char byte = 0;
        f.read(&byte, 1);
        f.seekp(-9, std::ios::end);
        byte = static_cast<char>(byte ^ 0x40);
        f.write(&byte, 1);
    }
    wmatrix corrupt;
    CHECK_THROWS_AS(load_wmatrix(dir, key, corrupt), std::runtime_error);
    std::filesystem::remove_all(dir);
}

TEST_CASE("cache keys separate every fingerprint component") {
    const layer_stack s = eps4_stack();
    const contour_spec c;
    const std::uint64_t base = w_cache_key(3, s.fingerprint(), f_hz, c.fingerprint());
    CHECK(base != w_cache_key(4, s.fingerprint(), f_hz, c.fingerprint()));
    CHECK(base != w_cache_key(3, s.fingerprint() + 1, f_hz, c.fingerprint()));
    CHECK(base != w_cache_key(3, s.fingerprint(), f_hz * 1.001, c.fingerprint()));
    CHECK(base != w_cache_key(3, s.fingerprint(), f_hz, c.fingerprint() + 1));
}
