#pragma once

// Composition of a free-space generalized scattering matrix with the layered
// -medium interaction matrix: the feedback solve producing the composite port
// reflection, its outgoing-field byproducts, and a reflection-order study
// comparing truncated series against the direct solve.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gsmlayer/common.hpp"
#include "gsmlayer/waves.hpp"
#include "gsmlayer/wmatrix.hpp"

namespace gsml {

// source-scattering blocks of an antenna in free space: port reflection
// gamma (e x e), receiving r_block (e x j), transmitting t_block (j x e),
// and spherical-mode scattering s_block (j x j), j = basis size
struct gsm_blocks {
    Eigen::MatrixXcd gamma;
    Eigen::MatrixXcd r_block;
    Eigen::MatrixXcd t_block;
    Eigen::MatrixXcd s_block;
    double frequency_hz = 0.0;
    svwf_basis basis;
    std::vector<std::string> port_labels;

    int ports() const { return static_cast<int>(gamma.rows()); }
    int modes() const { return basis.size(); }
    void validate() const;  // dimensional consistency, finiteness
};

enum class solve_mode { direct_inverse, neumann };

struct solve_options {
    solve_mode mode = solve_mode::direct_inverse;
    int neumann_order = 5;      // series length N >= 1; N = 1 is feedback-free
    double rcond_floor = 1e-13; // direct solve refuses brackets this singular
};

struct solve_report {
    double rcond = 1.0;        // 1-norm reciprocal condition estimate (direct mode)
    double assembly_ms = 0.0;  // forming the feedback operator
    double solve_ms = 0.0;     // factorization + right-hand sides
};

// composite port reflection gamma + (1/2) R W [1 - (1/2)(S-1) W]^{-1} T;
// the bracket is solved against T, never inverted explicitly
Eigen::MatrixXcd gamma_composite(const gsm_blocks& gsm, const wmatrix& w,
                                 const solve_options& opts = {},
                                 solve_report* report = nullptr);

struct outgoing_solution {
    Eigen::VectorXcd f;      // total outgoing mode amplitudes
    Eigen::VectorXcd a;      // incoming (reflected) amplitudes, a = W f
    Eigen::VectorXcd w_out;  // port output wave
};

// field solve for one excitation vector v
outgoing_solution solve_outgoing(const gsm_blocks& gsm, const wmatrix& w,
                                 const Eigen::VectorXcd& v,
                                 const solve_options& opts = {});

struct order_study_row {
    int order = 0;
    Eigen::MatrixXcd gamma_c;
    double deviation_vs_direct = 0.0;  // max |entry difference|
};

struct order_study {
    Eigen::MatrixXcd direct;
    std::vector<order_study_row> rows;
};

// composite reflection at a set of series truncation orders plus the direct
// solve, for convergence studies over multiple interaction strengths
order_study reflection_order_study(const gsm_blocks& gsm, const wmatrix& w,
                                   const std::vector<int>& orders,
                                   double rcond_floor = 1e-13);

} // namespace gsml
