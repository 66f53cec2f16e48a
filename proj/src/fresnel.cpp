#include "gsmlayer/fresnel.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gsml {

namespace {

void check_medium(const layer& lay, const char* what, bool needs_thickness) {
    std::ostringstream os;
    if (lay.eps_r < 1.0)
        os << what << ": eps_r must be >= 1, got " << lay.eps_r;
    else if (lay.sigma < 0.0)
        os << what << ": sigma must be >= 0, got " << lay.sigma;
    else if (lay.mu_r <= 0.0)
        os << what << ": mu_r must be > 0, got " << lay.mu_r;
    else if (needs_thickness && lay.thickness <= 0.0)
        os << what << ": thickness must be > 0, got " << lay.thickness;
    else
        return;
    throw std::invalid_argument("layer_stack: " + os.str());
}

[[noreturn]] void singular_at(const char* where, cplx u) {
    std::ostringstream os;
    os << where << ": singular reflection at u=(" << u.real() << "," << u.imag() << ")";
    throw std::runtime_error(os.str());
}

} // namespace

void layer_stack::validate() const {
    if (!(z_interface < 0.0))
        throw std::invalid_argument("layer_stack: z_interface must be negative "
                                    "(surface below the antenna origin)");
    check_medium(above, "top medium", false);
    if (above.sigma != 0.0)
        throw std::invalid_argument("layer_stack: top medium must be lossless");
    for (std::size_t t = 0; t < layers.size(); ++t)
        check_medium(layers[t], ("layer " + std::to_string(t + 1)).c_str(), true);
    if (bottom == termination::half_space)
        check_medium(bottom_medium, "terminating half-space", false);
}

std::uint64_t layer_stack::fingerprint() const {
    fnv1a64 h;
    auto feed_layer = [&](const layer& lay) {
        h.feed_double(lay.eps_r);
        h.feed_double(lay.sigma);
        h.feed_double(lay.mu_r);
        h.feed_double(lay.thickness);
    };
    h.feed_double(z_interface);
    feed_layer(above);
    h.feed_i32(static_cast<int>(layers.size()));
    for (const layer& lay : layers) feed_layer(lay);
    h.feed_i32(static_cast<int>(bottom));
    if (bottom == termination::half_space) feed_layer(bottom_medium);
    return h.digest();
}

cplx medium_eps(const layer& lay, double omega) {
    return cplx(lay.eps_r * vacuum_permittivity, -lay.sigma / omega);
}

double k_top(const layer_stack& stack, double omega) {
    return omega * std::sqrt(vacuum_permeability * stack.above.mu_r *
                             vacuum_permittivity * stack.above.eps_r);
}

cplx kz_in_layer(const layer& lay, cplx u, double omega, double k1) {
    const cplx kn2 = omega * omega * vacuum_permeability * lay.mu_r * medium_eps(lay, omega);
    cplx kz = std::sqrt(kn2 - k1 * k1 * (1.0 - u * u));
    // decaying branch for exp(+j omega t): Im(kz) <= 0, Re >= 0 on ties
    if (kz.imag() > 0.0) kz = -kz;
    else if (kz.imag() == 0.0 && kz.real() < 0.0) kz = -kz;
    return kz;
}

cplx wave_impedance(int i, const layer& lay, cplx u, double omega, double k1) {
    if (i != 1 && i != 2)
        throw std::invalid_argument("wave_impedance: polarization must be 1 or 2");
    const cplx kz = kz_in_layer(lay, u, omega, k1);
    if (i == 1) return omega * vacuum_permeability * lay.mu_r / kz;
    return kz / (omega * medium_eps(lay, omega));
}

namespace {

// impedance ratio Z_below / Z_above formed without the intermediate Z's,
// which stay bounded even for metal-like conductivities
cplx impedance_ratio(int i, const layer& upper, const layer& lower, cplx u,
                     double omega, double k1) {
    const cplx kzu = kz_in_layer(upper, u, omega, k1);
    const cplx kzl = kz_in_layer(lower, u, omega, k1);
    if (i == 1) return (lower.mu_r / upper.mu_r) * (kzu / kzl);
    return (kzl / kzu) * (medium_eps(upper, omega) / medium_eps(lower, omega));
}

cplx gamma_from_ratio(int i, cplx ratio, cplx u) {
    const cplx den = ratio + 1.0;
    if (std::abs(den) < 1e-300) singular_at("interface_gamma", u);
    const double sign = (i == 1) ? 1.0 : -1.0;  // (-1)^(i+1)
    return sign * (ratio - 1.0) / den;
}

} // namespace

cplx interface_gamma(int i, const layer_stack& stack, int n_interface, cplx u,
                     double omega) {
    if (i != 1 && i != 2)
        throw std::invalid_argument("interface_gamma: polarization must be 1 or 2");
    const int n_if = static_cast<int>(stack.interface_count());
    if (n_interface < 1 || n_interface > n_if)
        throw std::invalid_argument("interface_gamma: interface index out of range");
    const double k1 = k_top(stack, omega);
    const layer& upper = (n_interface == 1) ? stack.above : stack.layers[n_interface - 2];

    if (n_interface == n_if && stack.bottom != termination::half_space) {
        // perfect conductors: Z -> 0 (electric) or Z -> infinity (magnetic)
        const double sign = (i == 1) ? 1.0 : -1.0;
        return stack.bottom == termination::pec ? cplx(-sign) : cplx(sign);
    }
    const layer& lower = (n_interface == n_if) ? stack.bottom_medium
                                               : stack.layers[n_interface - 1];
    return gamma_from_ratio(i, impedance_ratio(i, upper, lower, u, omega, k1), u);
}

cplx rho_stack(int i, const layer_stack& stack, cplx u, double omega) {
    const int n_if = static_cast<int>(stack.interface_count());
    const double k1 = k_top(stack, omega);

    // seed at the deepest interface, then fold finite layers in from below
    cplx rho = interface_gamma(i, stack, n_if, u, omega);
    for (int n = n_if - 1; n >= 1; --n) {
        const layer& between = stack.layers[n - 1];  // layer separating interfaces n, n+1
        const cplx kz = kz_in_layer(between, u, omega, k1);
        const cplx phase2 = std::exp(cplx(0.0, -2.0) * kz * between.thickness);
        const cplx g = interface_gamma(i, stack, n, u, omega);
        const cplx den = 1.0 + g * rho * phase2;
        if (std::abs(den) < 1e-300) singular_at("rho_stack", u);
        rho = (g + rho * phase2) / den;
    }
    return rho;
}

} // namespace gsml
