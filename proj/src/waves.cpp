#include "gsmlayer/waves.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gsml {

std::string svwf_index::to_string() const {
    std::ostringstream os;
    os << "(tau=" << tau << ", " << (sigma == 0 ? "even" : "odd")
       << ", m=" << m << ", l=" << l << ")";
    return os.str();
}

int svwf_basis_size(int l_max) { return 2 * l_max * (l_max + 2); }

svwf_basis make_svwf_basis(int l_max) {
    if (l_max < 1)
        throw std::invalid_argument("make_svwf_basis: l_max must be at least 1");
    svwf_basis b;
    b.l_max = l_max;
    b.modes.reserve(svwf_basis_size(l_max));
    for (int l = 1; l <= l_max; ++l)
        for (int m = 0; m <= l; ++m)
            for (int sigma = 0; sigma <= (m == 0 ? 0 : 1); ++sigma)
                for (int tau = 1; tau <= 2; ++tau)
                    b.modes.push_back({tau, sigma, m, l});
    return b;
}

int svwf_basis::position(const svwf_index& n) const {
    if (n.l < 1 || n.l > l_max || n.m < 0 || n.m > n.l ||
        (n.m == 0 && n.sigma != 0) || n.tau < 1 || n.tau > 2 ||
        n.sigma < 0 || n.sigma > 1)
        throw std::invalid_argument("svwf_basis::position: invalid mode " + n.to_string());
    // modes below degree l occupy 2(l^2 - 1) slots; within a degree, the m = 0
    // pair comes first and each m >= 1 contributes a (sigma, tau) quartet
    int base = 2 * (n.l * n.l - 1);
    int within = (n.m == 0) ? (n.tau - 1)
                            : 2 + 4 * (n.m - 1) + 2 * n.sigma + (n.tau - 1);
    return base + within;
}

std::vector<std::vector<int>> svwf_basis::indices_by_m() const {
    std::vector<std::vector<int>> groups(l_max + 1);
    for (int idx = 0; idx < size(); ++idx)
        groups[modes[idx].m].push_back(idx);
    return groups;
}

Eigen::Vector3cd eval_pvwf(int i, const pvwf_direction& dir, double k,
                           const Eigen::Vector3d& r) {
    if (i != 1 && i != 2)
        throw std::invalid_argument("eval_pvwf: polarization must be 1 (TE) or 2 (TM)");
    const cplx j(0.0, 1.0);
    const cplx s = std::sqrt(1.0 - dir.u * dir.u);  // principal: unchanged on reflection
    const cplx uu = dir.reflected ? -dir.u : dir.u;
    const double cb = std::cos(dir.beta), sb = std::sin(dir.beta);

    Eigen::Vector3cd alpha_hat(uu * cb, uu * sb, -s);   // polar unit vector
    Eigen::Vector3cd beta_hat(-sb, cb, 0.0);            // azimuth unit vector
    Eigen::Vector3cd gamma_hat(s * cb, s * sb, uu);     // propagation direction

    // plain bilinear gamma_hat . r (Eigen's complex dot would conjugate)
    const cplx gr = gamma_hat(0) * r(0) + gamma_hat(1) * r(1) + gamma_hat(2) * r(2);
    const cplx phase = std::exp(-j * k * gr);
    if (i == 1) return (j / (4.0 * pi)) * phase * beta_hat;
    return (-1.0 / (4.0 * pi)) * phase * alpha_hat;
}

namespace {

// shared geometry for spherical evaluation at one point
struct point_frame {
    double rr;       // |r|
    double u, s;     // cos/sin of polar angle, s >= 0
    double beta;
    Eigen::Vector3d theta_hat, phi_hat, r_hat;
};

point_frame make_frame(const Eigen::Vector3d& r) {
    point_frame f;
    f.rr = r.norm();
    f.u = r.z() / f.rr;
    if (f.u > 1.0) f.u = 1.0;
    if (f.u < -1.0) f.u = -1.0;
    double s2 = 1.0 - f.u * f.u;
    f.s = s2 > 0.0 ? std::sqrt(s2) : 0.0;
    if (f.s < 1e-14) {  // snap to the pole so the angular tables take their limit branch
        f.u = f.u > 0.0 ? 1.0 : -1.0;
        f.s = 0.0;
    }
    f.beta = std::atan2(r.y(), r.x());
    const double cb = std::cos(f.beta), sb = std::sin(f.beta);
    f.theta_hat = Eigen::Vector3d(f.u * cb, f.u * sb, -f.s);
    f.phi_hat = Eigen::Vector3d(-sb, cb, 0.0);
    f.r_hat = r / f.rr;
    return f;
}

Eigen::Vector3cd assemble_mode(const svwf_index& n, const point_frame& f,
                               const legendre_table& leg, const angular_table& ang,
                               const std::vector<cplx>& z, double x,
                               double cm, double sm) {
    const cplx dl = ang.delta_lm(n.l, n.m);
    const cplx pl = ang.pi_lm(n.l, n.m);
    const cplx pv = leg.value(n.l, n.m);
    const Eigen::Vector3cd th = f.theta_hat.cast<cplx>();
    const Eigen::Vector3cd ph = f.phi_hat.cast<cplx>();

    Eigen::Vector3cd c1, c2;
    cplx y;
    if (n.sigma == 0) {
        c1 = th * (pl * sm) - ph * (dl * cm);
        c2 = th * (dl * cm) + ph * (pl * sm);
        y = pv * cm;
    } else {
        c1 = -th * (pl * cm) - ph * (dl * sm);
        c2 = th * (dl * sm) - ph * (pl * cm);
        y = pv * sm;
    }

    if (n.tau == 1) return z[n.l] * c1;
    // radial derivative combination (x z_l)'/x = z_{l-1} - (l/x) z_l
    const cplx dz = z[n.l - 1] - (double(n.l) / x) * z[n.l];
    const double norm = std::sqrt(double(n.l) * (n.l + 1.0));
    return dz * c2 + norm * (z[n.l] / x) * y * f.r_hat.cast<cplx>();
}

} // namespace

Eigen::Vector3cd eval_svwf(int p, const svwf_index& n, double k,
                           const Eigen::Vector3d& r) {
    if (p != 1 && p != 4)
        throw std::invalid_argument("eval_svwf: radial kind must be 1 (regular) or 4 (outgoing)");
    Eigen::Vector3d rp = r;
    if (rp.norm() == 0.0) {
        if (p == 4)
            throw std::domain_error("eval_svwf: outgoing wave is singular at the origin");
        rp = Eigen::Vector3d(0.0, 0.0, 1e-30);  // regular waves have a finite limit
    }
    const point_frame f = make_frame(rp);
    const legendre_table leg = make_legendre_table(cplx(f.u, 0.0), n.l);
    const angular_table ang = make_angular_table(leg);
    const double x = k * f.rr;
    const std::vector<cplx> z = spherical_bessel(p, n.l, x);
    return assemble_mode(n, f, leg, ang, z, x,
                         std::cos(n.m * f.beta), std::sin(n.m * f.beta));
}

std::vector<Eigen::Vector3cd> eval_svwf_all(int p, const svwf_basis& basis,
                                            double k, const Eigen::Vector3d& r) {
    if (p != 1 && p != 4)
        throw std::invalid_argument("eval_svwf_all: radial kind must be 1 (regular) or 4 (outgoing)");
    Eigen::Vector3d rp = r;
    if (rp.norm() == 0.0) {
        if (p == 4)
            throw std::domain_error("eval_svwf_all: outgoing wave is singular at the origin");
        rp = Eigen::Vector3d(0.0, 0.0, 1e-30);
    }
    const point_frame f = make_frame(rp);
    const legendre_table leg = make_legendre_table(cplx(f.u, 0.0), basis.l_max);
    const angular_table ang = make_angular_table(leg);
    const double x = k * f.rr;
    const std::vector<cplx> z = spherical_bessel(p, basis.l_max, x);

    std::vector<double> cm(basis.l_max + 1), sm(basis.l_max + 1);
    for (int m = 0; m <= basis.l_max; ++m) {
        cm[m] = std::cos(m * f.beta);
        sm[m] = std::sin(m * f.beta);
    }

    std::vector<Eigen::Vector3cd> out(basis.size());
    for (int idx = 0; idx < basis.size(); ++idx) {
        const svwf_index& n = basis.modes[idx];
        out[idx] = assemble_mode(n, f, leg, ang, z, x, cm[n.m], sm[n.m]);
    }
    return out;
}

cplx b_coefficient(const svwf_index& n, int i, const angular_table& ang,
                   bool dagger) {
    if (i != 1 && i != 2)
        throw std::invalid_argument("b_coefficient: polarization must be 1 or 2");
    cplx phase, val;
    if (n.tau == i) {
        phase = ipow(n.l + 1);                  // j^(l+1)
        val = ang.delta_lm(n.l, n.m);
    } else {
        phase = ipow(n.l);                      // j^l
        val = ang.pi_lm(n.l, n.m);
    }
    if (dagger) phase = std::conj(phase);       // conjugate explicit j's only
    return phase * val;
}

std::pair<double, double> azimuthal_cs(int tau, int sigma, int i) {
    // A = c cos(m beta) + s sin(m beta); the cross-polarized pairing picks up
    // the quarter-period shift
    if (tau == i) return sigma == 0 ? std::make_pair(1.0, 0.0) : std::make_pair(0.0, 1.0);
    return sigma == 0 ? std::make_pair(0.0, -1.0) : std::make_pair(1.0, 0.0);
}

double azimuthal_integral(const svwf_index& n, const svwf_index& n2, int i) {
    if (n.m != n2.m) return 0.0;  // orthogonal azimuthal harmonics
    auto [c1, s1] = azimuthal_cs(n.tau, n.sigma, i);
    auto [c2, s2] = azimuthal_cs(n2.tau, n2.sigma, i);
    const double dm0 = n.m == 0 ? 1.0 : 0.0;
    return pi * ((1.0 + dm0) * c1 * c2 + (1.0 - dm0) * s1 * s2);
}

} // namespace gsml
