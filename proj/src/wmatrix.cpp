#include "gsmlayer/wmatrix.hpp"

#include <cmath>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace gsml {

void contour_spec::validate() const {
    if (!(kappa_m > 1.0))
        throw std::invalid_argument("contour_spec: kappa_m must exceed 1");
    if (quad_order_evanescent < 2 || quad_order_propagating < 2)
        throw std::invalid_argument("contour_spec: quadrature orders must be >= 2");
    if (panels_per_segment < 1)
        throw std::invalid_argument("contour_spec: need at least one panel per segment");
    if (!(panel_ratio > 0.0 && panel_ratio < 1.0))
        throw std::invalid_argument("contour_spec: panel_ratio must lie in (0,1)");
}

std::uint64_t contour_spec::fingerprint() const {
    fnv1a64 h;
    h.feed_double(kappa_m);
    h.feed_double(iota);
    h.feed_i32(quad_order_evanescent);
    h.feed_i32(quad_order_propagating);
    h.feed_i32(panels_per_segment);
    h.feed_double(panel_ratio);
    h.feed_i32(flip_evanescent ? 1 : 0);
    return h.digest();
}

int lmax_rule(double kr_min) {
    if (!(kr_min > 0.0))
        throw std::invalid_argument("lmax_rule: kR_min must be positive");
    return static_cast<int>(std::ceil(kr_min + 2.0 * std::cbrt(kr_min) + 3.0));
}

double kappa_rule(int l_max, double kr_min, double iota) {
    if (l_max < 1)
        throw std::invalid_argument("kappa_rule: l_max must be >= 1");
    if (!(kr_min > 0.0))
        throw std::invalid_argument("kappa_rule: kR_min must be positive");
    if (l_max > 20)
        std::cerr << "kappa_rule: l_max=" << l_max
                  << " exceeds the stated validity range (<= 20)\n";
    double kappa = (iota * l_max + 1.0) / kr_min + 0.03 * kr_min;
    return std::max(kappa, 1.0 + 1e-6);
}

namespace {

// geometric panel breakpoints on [0, len], shortest panel against 0
std::vector<double> panel_edges(double len, int panels, double ratio) {
    std::vector<double> e(panels + 1);
    e[0] = 0.0;
    for (int p = 1; p <= panels; ++p)
        e[p] = len * std::pow(ratio, panels - p);
    e[panels] = len;
    return e;
}

} // namespace

contour_nodes make_contour_nodes(const contour_spec& c) {
    c.validate();
    contour_nodes out;

    // evanescent segment u = j t, t in [0, kappa_m]; the round-trip phase
    // e^{-2jk z_I u} turns into real decay there, so weights pick up j from du
    {
        const quad_rule gl = gauss_legendre(c.quad_order_evanescent);
        const std::vector<double> edges =
            panel_edges(c.kappa_m, c.panels_per_segment, c.panel_ratio);
        const double sign = c.flip_evanescent ? -1.0 : 1.0;
        for (int p = 0; p < c.panels_per_segment; ++p) {
            const double a = edges[p], b = edges[p + 1];
            for (int q = 0; q < c.quad_order_evanescent; ++q) {
                const double t = 0.5 * (b - a) * gl.nodes[q] + 0.5 * (a + b);
                out.u.emplace_back(0.0, t);
                out.w.emplace_back(0.0, sign * 0.5 * (b - a) * gl.weights[q]);
            }
        }
        out.n_evanescent = static_cast<int>(out.u.size());
    }

    // propagating segment: real u in [-1, 0], panels graded toward u = 0
    {
        const quad_rule gl = gauss_legendre(c.quad_order_propagating);
        const std::vector<double> edges =
            panel_edges(1.0, c.panels_per_segment, c.panel_ratio);
        for (int p = 0; p < c.panels_per_segment; ++p) {
            const double a = -edges[p + 1], b = -edges[p];  // [-edge_hi, -edge_lo]
            for (int q = 0; q < c.quad_order_propagating; ++q) {
                const double t = 0.5 * (b - a) * gl.nodes[q] + 0.5 * (a + b);
                out.u.emplace_back(t, 0.0);
                out.w.emplace_back(0.5 * (b - a) * gl.weights[q], 0.0);
            }
        }
    }
    return out;
}

cplx wmatrix::entry(int row, int col) const {
    const svwf_index& a = basis.modes[row];
    const svwf_index& b = basis.modes[col];
    if (a.m != b.m) return cplx{};
    return blocks[a.m](pos_in_block[row], pos_in_block[col]);
}

Eigen::MatrixXcd wmatrix::dense() const {
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(size(), size());
    for (std::size_t m = 0; m < rows_by_m.size(); ++m) {
        const auto& idx = rows_by_m[m];
        for (std::size_t r = 0; r < idx.size(); ++r)
            for (std::size_t c = 0; c < idx.size(); ++c)
                d(idx[r], idx[c]) = blocks[m](r, c);
    }
    return d;
}

double wmatrix::max_abs() const {
    double v = 0.0;
    for (const auto& b : blocks)
        if (b.size() > 0) v = std::max(v, b.cwiseAbs().maxCoeff());
    return v;
}

Eigen::MatrixXcd wmatrix::times_dense_right(const Eigen::MatrixXcd& a) const {
    if (a.cols() != size())
        throw std::invalid_argument("wmatrix::times_dense_right: column count mismatch");
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(a.rows(), size());
    for (std::size_t m = 0; m < rows_by_m.size(); ++m) {
        const auto& idx = rows_by_m[m];
        if (idx.empty()) continue;
        Eigen::MatrixXcd am(a.rows(), idx.size());
        for (std::size_t r = 0; r < idx.size(); ++r) am.col(r) = a.col(idx[r]);
        Eigen::MatrixXcd ym = am * blocks[m];
        for (std::size_t r = 0; r < idx.size(); ++r) y.col(idx[r]) = ym.col(r);
    }
    return y;
}

Eigen::MatrixXcd wmatrix::times_dense_left(const Eigen::MatrixXcd& x) const {
    if (x.rows() != size())
        throw std::invalid_argument("wmatrix::times_dense_left: row count mismatch");
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(size(), x.cols());
    for (std::size_t m = 0; m < rows_by_m.size(); ++m) {
        const auto& idx = rows_by_m[m];
        if (idx.empty()) continue;
        Eigen::MatrixXcd xm(idx.size(), x.cols());
        for (std::size_t r = 0; r < idx.size(); ++r) xm.row(r) = x.row(idx[r]);
        Eigen::MatrixXcd ym = blocks[m] * xm;
        for (std::size_t r = 0; r < idx.size(); ++r) y.row(idx[r]) = ym.row(r);
    }
    return y;
}

wmatrix assemble_w(const svwf_basis& basis, const layer_stack& stack, double k,
                   double omega, const contour_spec& contour) {
    stack.validate();
    contour.validate();
    if (basis.l_max < 1 || basis.size() != svwf_basis_size(basis.l_max))
        throw std::invalid_argument("assemble_w: basis is not a canonical full basis");
    for (int q = 0; q < basis.size(); ++q)  // m-block bookkeeping assumes canonical order
        if (basis.position(basis.modes[q]) != q)
            throw std::invalid_argument("assemble_w: basis modes are not in canonical order");
    {
        const double k_stack = k_top(stack, omega);
        if (std::abs(k - k_stack) > 1e-9 * k_stack) {
            std::ostringstream os;
            os << "assemble_w: wavenumber " << k
               << " is inconsistent with the top medium at this frequency ("
               << k_stack << ")";
            throw std::invalid_argument(os.str());
        }
    }

    const int l_max = basis.l_max;
    const contour_nodes nodes = make_contour_nodes(contour);
    const int nq = static_cast<int>(nodes.u.size());

    // per-node angular tables (shared across every tau/sigma/i combination)
    // and polarization-resolved spectral weights w * rho_i * e^{-2jk z_I u}
    std::vector<angular_table> ang(nq);
    Eigen::VectorXcd core1(nq), core2(nq);
    for (int q = 0; q < nq; ++q) {
        ang[q] = make_angular_table(make_legendre_table(nodes.u[q], l_max));
        const cplx phase =
            std::exp(cplx(0.0, -2.0) * k * stack.z_interface * nodes.u[q]);
        core1(q) = nodes.w[q] * rho_stack(1, stack, nodes.u[q], omega) * phase;
        core2(q) = nodes.w[q] * rho_stack(2, stack, nodes.u[q], omega) * phase;
    }

    wmatrix w;
    w.basis = basis;
    w.frequency_hz = omega / (2.0 * pi);
    w.stack_hash = stack.fingerprint();
    w.contour_hash = contour.fingerprint();
    w.rows_by_m = basis.indices_by_m();
    w.pos_in_block.assign(basis.size(), -1);
    for (const auto& group : w.rows_by_m)
        for (std::size_t r = 0; r < group.size(); ++r)
            w.pos_in_block[group[r]] = static_cast<int>(r);
    w.blocks.resize(l_max + 1);

    for (int m = 0; m <= l_max; ++m) {
        const auto& idx = w.rows_by_m[m];
        const int nm = static_cast<int>(idx.size());
        Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(nm, nm);

        for (int i = 1; i <= 2; ++i) {
            // sampled coupling coefficients over the contour
            Eigen::MatrixXcd b(nm, nq), bd(nm, nq);
            for (int r = 0; r < nm; ++r) {
                const svwf_index& n = basis.modes[idx[r]];
                for (int q = 0; q < nq; ++q) {
                    b(r, q) = b_coefficient(n, i, ang[q], false);
                    bd(r, q) = b_coefficient(n, i, ang[q], true);
                }
            }
            const Eigen::VectorXcd& core = (i == 1) ? core1 : core2;
            // g(r,c) = sum_q B_{n_r}(u_q) core(q) Bdag_{n_c}(u_q)
            Eigen::MatrixXcd g = (b * core.asDiagonal()) * bd.transpose();

            for (int r = 0; r < nm; ++r) {
                const svwf_index& nr = basis.modes[idx[r]];
                for (int c = 0; c < nm; ++c) {
                    const svwf_index& nc = basis.modes[idx[c]];
                    const double ii = azimuthal_integral(nr, nc, i) /
                                      (pi * (m == 0 ? 2.0 : 1.0));
                    if (ii == 0.0) continue;
                    // column-mode sign (-1)^(l'+m'+tau'+i+1)
                    const double sgn =
                        ((nc.l + nc.m + nc.tau + i + 1) % 2 == 0) ? 1.0 : -1.0;
                    block(r, c) += 2.0 * sgn * ii * g(r, c);
                }
            }
        }

        // enforce the analytic symmetry exactly: mirror the upper triangle
        for (int r = 0; r < nm; ++r)
            for (int c = 0; c < r; ++c) block(r, c) = block(c, r);
        w.blocks[m] = std::move(block);
    }
    return w;
}

} // namespace gsml
