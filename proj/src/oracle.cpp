#include "gsmlayer/oracle.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace gsml {

std::vector<Eigen::Vector3d> shell_points(int count, double kr_lo, double kr_hi,
                                          double k, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    auto uniform = [&] { return double(eng() >> 11) * 0x1p-53; };
    std::vector<Eigen::Vector3d> pts;
    pts.reserve(count);
    for (int q = 0; q < count; ++q) {
        const double u = 2.0 * uniform() - 1.0;       // cos(polar), uniform on sphere
        const double beta = 2.0 * pi * uniform();
        const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
        const double r = (kr_lo + (kr_hi - kr_lo) * uniform()) / k;
        pts.emplace_back(r * s * std::cos(beta), r * s * std::sin(beta), r * u);
    }
    return pts;
}

std::vector<Eigen::Vector3d> plane_grid(double z_interface,
                                        const std::vector<double>& radii_frac,
                                        int n_azimuth) {
    // lateral scale |z_interface| keeps every probe well inside |r| < 2|z_interface|,
    // the convergence sphere of the regular reflected-field expansion (the image
    // source sits at 2 z_interface); larger rings would hit its truncation plateau
    const double lateral = std::abs(z_interface);
    std::vector<Eigen::Vector3d> pts;
    pts.reserve(radii_frac.size() * n_azimuth);
    for (std::size_t ring = 0; ring < radii_frac.size(); ++ring) {
        const double rho = radii_frac[ring] * lateral;
        for (int a = 0; a < n_azimuth; ++a) {
            // stagger successive rings so points never share an azimuth
            const double beta =
                2.0 * pi * (a + 0.5 * double(ring) / radii_frac.size()) / n_azimuth;
            pts.emplace_back(rho * std::cos(beta), rho * std::sin(beta), z_interface);
        }
    }
    return pts;
}

double check_transform_identity(const svwf_index& n, double k,
                                const std::vector<Eigen::Vector3d>& points,
                                int n_alpha, int n_beta) {
    if (points.empty())
        throw std::invalid_argument("check_transform_identity: no sample points");
    const quad_rule gl = gauss_legendre(n_alpha);

    std::vector<Eigen::Vector3cd> direct(points.size()), integral(points.size());
    for (std::size_t p = 0; p < points.size(); ++p) {
        direct[p] = eval_svwf(1, n, k, points[p]);
        integral[p].setZero();
    }

    // propagating spectrum: u over [-1, 1], trapezoid in the periodic azimuth
    const double dbeta = 2.0 * pi / n_beta;
    for (int q = 0; q < n_alpha; ++q) {
        const double u = gl.nodes[q];
        const angular_table ang =
            make_angular_table(make_legendre_table(cplx(u, 0.0), n.l));
        const cplx b1 = b_coefficient(n, 1, ang);
        const cplx b2 = b_coefficient(n, 2, ang);
        const auto [c1, s1] = azimuthal_cs(n.tau, n.sigma, 1);
        const auto [c2, s2] = azimuthal_cs(n.tau, n.sigma, 2);
        for (int b = 0; b < n_beta; ++b) {
            const double beta = dbeta * b;
            const double a1 = c1 * std::cos(n.m * beta) + s1 * std::sin(n.m * beta);
            const double a2 = c2 * std::cos(n.m * beta) + s2 * std::sin(n.m * beta);
            const pvwf_direction dir{cplx(u, 0.0), beta, false};
            for (std::size_t p = 0; p < points.size(); ++p) {
                const Eigen::Vector3cd f1 = eval_pvwf(1, dir, k, points[p]);
                const Eigen::Vector3cd f2 = eval_pvwf(2, dir, k, points[p]);
                integral[p] +=
                    gl.weights[q] * dbeta * (b1 * a1 * f1 + b2 * a2 * f2);
            }
        }
    }

    double worst = 0.0;
    for (std::size_t p = 0; p < points.size(); ++p) {
        const double denom = std::max(direct[p].norm(), 1e-300);
        worst = std::max(worst, (integral[p] - direct[p]).norm() / denom);
    }
    return worst;
}

pec_boundary_result check_pec_boundary(const std::vector<int>& sources,
                                       double z_interface, double k,
                                       const wmatrix& w,
                                       const std::vector<Eigen::Vector3d>& points) {
    if (sources.empty() || points.empty())
        throw std::invalid_argument("check_pec_boundary: empty sources or points");
    for (int s : sources)
        if (s < 0 || s >= w.size())
            throw std::invalid_argument("check_pec_boundary: source index out of range");

    const std::size_t np = points.size();
    const std::size_t ns = sources.size();
    std::vector<double> out_tan(ns, 0.0), tot_tan(ns, 0.0);

    for (std::size_t p = 0; p < np; ++p) {
        const auto reg = eval_svwf_all(1, w.basis, k, points[p]);
        const auto out = eval_svwf_all(4, w.basis, k, points[p]);
        for (std::size_t s = 0; s < ns; ++s) {
            const int src = sources[s];
            const int m = w.basis.modes[src].m;
            const int row = w.pos_in_block[src];
            Eigen::Vector3cd refl = Eigen::Vector3cd::Zero();
            const auto& idx = w.rows_by_m[m];  // W couples only within the m-block
            for (std::size_t c = 0; c < idx.size(); ++c)
                refl += w.blocks[m](row, c) * reg[idx[c]];
            const Eigen::Vector3cd tot = out[src] + refl;
            const double tan_out = std::hypot(std::abs(out[src](0)), std::abs(out[src](1)));
            const double tan_tot = std::hypot(std::abs(tot(0)), std::abs(tot(1)));
            out_tan[s] = std::max(out_tan[s], tan_out);
            tot_tan[s] = std::max(tot_tan[s], tan_tot);
        }
    }

    pec_boundary_result res;
    for (std::size_t s = 0; s < ns; ++s) {
        const double resid = tot_tan[s] / std::max(out_tan[s], 1e-300);
        res.per_source.emplace_back(w.basis.modes[sources[s]], resid);
        res.max_residual = std::max(res.max_residual, resid);
    }
    return res;
}

double check_reflected_field(const svwf_index& n, const layer_stack& stack,
                             double omega,
                             const std::vector<Eigen::Vector3d>& points,
                             const wmatrix& w, const contour_spec& quad_contour,
                             int n_beta) {
    if (points.empty())
        throw std::invalid_argument("check_reflected_field: no sample points");
    const double k = k_top(stack, omega);
    const int src = w.basis.position(n);

    // expanded side: one row of W against regular waves
    std::vector<Eigen::Vector3cd> expanded(points.size(), Eigen::Vector3cd::Zero());
    {
        const int m = n.m;
        const int row = w.pos_in_block[src];
        const auto& idx = w.rows_by_m[m];
        for (std::size_t p = 0; p < points.size(); ++p) {
            const auto reg = eval_svwf_all(1, w.basis, k, points[p]);
            for (std::size_t c = 0; c < idx.size(); ++c)
                expanded[p] += w.blocks[m](row, c) * reg[idx[c]];
        }
    }

    // direct side: reflected spectrum of the outgoing source integrated over
    // the truncated contour, reflected plane waves evaluated pointwise
    std::vector<Eigen::Vector3cd> direct(points.size(), Eigen::Vector3cd::Zero());
    const contour_nodes nodes = make_contour_nodes(quad_contour);
    const double dbeta = 2.0 * pi / n_beta;
    const auto [c1, s1] = azimuthal_cs(n.tau, n.sigma, 1);
    const auto [c2, s2] = azimuthal_cs(n.tau, n.sigma, 2);

    for (std::size_t q = 0; q < nodes.u.size(); ++q) {
        const cplx u = nodes.u[q];
        const angular_table ang = make_angular_table(make_legendre_table(u, n.l));
        const cplx phase = std::exp(cplx(0.0, -2.0) * k * stack.z_interface * u);
        const cplx g1 = nodes.w[q] * b_coefficient(n, 1, ang) *
                        rho_stack(1, stack, u, omega) * phase;
        const cplx g2 = nodes.w[q] * b_coefficient(n, 2, ang) *
                        rho_stack(2, stack, u, omega) * phase;
        for (int b = 0; b < n_beta; ++b) {
            const double beta = dbeta * b;
            const double a1 = c1 * std::cos(n.m * beta) + s1 * std::sin(n.m * beta);
            const double a2 = c2 * std::cos(n.m * beta) + s2 * std::sin(n.m * beta);
            const pvwf_direction dir{u, beta, true};
            for (std::size_t p = 0; p < points.size(); ++p) {
                const Eigen::Vector3cd f1 = eval_pvwf(1, dir, k, points[p]);
                const Eigen::Vector3cd f2 = eval_pvwf(2, dir, k, points[p]);
                direct[p] += 2.0 * dbeta * (g1 * a1 * f1 + g2 * a2 * f2);
            }
        }
    }

    double worst = 0.0;
    double scale = 0.0;
    for (const auto& d : direct) scale = std::max(scale, d.norm());
    for (std::size_t p = 0; p < points.size(); ++p) {
        // vacuum-like stacks make both sides zero; treat that as exact
        const double denom = std::max(direct[p].norm(), std::max(1e-6 * scale, 1e-300));
        worst = std::max(worst, (expanded[p] - direct[p]).norm() / denom);
    }
    return worst;
}

} // namespace gsml
