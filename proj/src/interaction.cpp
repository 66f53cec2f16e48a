#include "gsmlayer/interaction.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gsml {

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
}

void check_pair(const gsm_blocks& gsm, const wmatrix& w) {
    gsm.validate();
    if (gsm.basis.l_max != w.basis.l_max || gsm.modes() != w.size())
        throw std::invalid_argument(
            "interaction: GSM and interaction matrix use different mode bases");
    if (std::abs(gsm.frequency_hz - w.frequency_hz) >
        1e-6 * std::max(1.0, std::abs(gsm.frequency_hz))) {
        std::ostringstream os;
        os << "interaction: frequency mismatch (GSM at " << gsm.frequency_hz
           << " Hz, interaction matrix at " << w.frequency_hz << " Hz)";
        throw std::invalid_argument(os.str());
    }
}

// one feedback application X -> (1/2)(S - 1) W X without forming S - 1
Eigen::MatrixXcd apply_feedback(const gsm_blocks& gsm, const wmatrix& w,
                                const Eigen::MatrixXcd& x) {
    Eigen::MatrixXcd y = w.times_dense_left(x);
    return 0.5 * (gsm.s_block * y - y);
}

// truncated series sum_{p=0}^{N-1} M^p applied to T, by Horner recursion
Eigen::MatrixXcd neumann_apply(const gsm_blocks& gsm, const wmatrix& w,
                               const Eigen::MatrixXcd& t, int order) {
    Eigen::MatrixXcd x = t;
    for (int p = 1; p < order; ++p) x = t + apply_feedback(gsm, w, x);
    return x;
}

} // namespace

void gsm_blocks::validate() const {
    const int e = ports();
    const int j = modes();
    if (e < 1) throw std::invalid_argument("gsm_blocks: need at least one port");
    if (basis.l_max < 1 || j != svwf_basis_size(basis.l_max))
        throw std::invalid_argument("gsm_blocks: basis is not a canonical full basis");
    if (gamma.rows() != e || gamma.cols() != e || r_block.rows() != e ||
        r_block.cols() != j || t_block.rows() != j || t_block.cols() != e ||
        s_block.rows() != j || s_block.cols() != j) {
        std::ostringstream os;
        os << "gsm_blocks: inconsistent block dimensions for " << e
           << " ports and " << j << " modes";
        throw std::invalid_argument(os.str());
    }
    if (!gamma.allFinite() || !r_block.allFinite() || !t_block.allFinite() ||
        !s_block.allFinite())
        throw std::invalid_argument("gsm_blocks: blocks contain non-finite entries");
    if (!port_labels.empty() && static_cast<int>(port_labels.size()) != e)
        throw std::invalid_argument("gsm_blocks: port label count mismatch");
}

Eigen::MatrixXcd gamma_composite(const gsm_blocks& gsm, const wmatrix& w,
                                 const solve_options& opts,
                                 solve_report* report) {
    check_pair(gsm, w);
    if (opts.mode == solve_mode::neumann && opts.neumann_order < 1)
        throw std::invalid_argument("gamma_composite: series order must be >= 1");

    const int j = gsm.modes();
    solve_report rep;
    Eigen::MatrixXcd x;  // bracket^{-1} T (or its series approximation)

    if (opts.mode == solve_mode::direct_inverse) {
        auto t0 = std::chrono::steady_clock::now();
        // feedback operator M = (1/2)(S - 1) W through the m-block structure;
        // a naive dense product at high truncation would dominate the budget
        Eigen::MatrixXcd m =
            w.times_dense_right(0.5 * (gsm.s_block -
                                       Eigen::MatrixXcd::Identity(j, j)));
        Eigen::MatrixXcd bracket = Eigen::MatrixXcd::Identity(j, j) - m;
        rep.assembly_ms = ms_since(t0);

        t0 = std::chrono::steady_clock::now();
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(bracket);
        rep.rcond = lu.rcond();
        if (!(rep.rcond >= opts.rcond_floor)) {
            std::ostringstream os;
            os << "gamma_composite: feedback bracket is ill-conditioned "
                  "(reciprocal condition estimate "
               << rep.rcond << " below floor " << opts.rcond_floor << ")";
            throw std::runtime_error(os.str());
        }
        x = lu.solve(gsm.t_block);
        rep.solve_ms = ms_since(t0);
    } else {
        rep.rcond = std::numeric_limits<double>::quiet_NaN();
        auto t0 = std::chrono::steady_clock::now();
        x = neumann_apply(gsm, w, gsm.t_block, opts.neumann_order);
        rep.solve_ms = ms_since(t0);
    }

    Eigen::MatrixXcd gc =
        gsm.gamma + 0.5 * gsm.r_block * w.times_dense_left(x);
    if (report) *report = rep;
    return gc;
}

outgoing_solution solve_outgoing(const gsm_blocks& gsm, const wmatrix& w,
                                 const Eigen::VectorXcd& v,
                                 const solve_options& opts) {
    check_pair(gsm, w);
    if (v.size() != gsm.ports())
        throw std::invalid_argument("solve_outgoing: excitation size mismatch");
    if (!v.allFinite())
        throw std::invalid_argument("solve_outgoing: excitation has non-finite entries");

    const int j = gsm.modes();
    const Eigen::MatrixXcd tv = gsm.t_block * v;
    outgoing_solution sol;

    if (opts.mode == solve_mode::direct_inverse) {
        Eigen::MatrixXcd m =
            w.times_dense_right(0.5 * (gsm.s_block -
                                       Eigen::MatrixXcd::Identity(j, j)));
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(
            Eigen::MatrixXcd::Identity(j, j) - m);
        const double rcond = lu.rcond();
        if (!(rcond >= opts.rcond_floor)) {
            std::ostringstream os;
            os << "solve_outgoing: feedback bracket is ill-conditioned "
                  "(reciprocal condition estimate "
               << rcond << " below floor " << opts.rcond_floor << ")";
            throw std::runtime_error(os.str());
        }
        sol.f = lu.solve(tv);
    } else {
        if (opts.neumann_order < 1)
            throw std::invalid_argument("solve_outgoing: series order must be >= 1");
        sol.f = neumann_apply(gsm, w, tv, opts.neumann_order);
    }

    sol.a = w.times_dense_left(sol.f);  // W is symmetric: W^t f = W f
    sol.w_out = gsm.gamma * v + 0.5 * gsm.r_block * sol.a;
    return sol;
}

order_study reflection_order_study(const gsm_blocks& gsm, const wmatrix& w,
                                   const std::vector<int>& orders,
                                   double rcond_floor) {
    check_pair(gsm, w);
    if (orders.empty())
        throw std::invalid_argument("reflection_order_study: no orders requested");
    int max_order = 1;
    for (int n : orders) {
        if (n < 1)
            throw std::invalid_argument("reflection_order_study: orders must be >= 1");
        max_order = std::max(max_order, n);
    }

    order_study study;
    solve_options direct;
    direct.rcond_floor = rcond_floor;
    study.direct = gamma_composite(gsm, w, direct);

    // march the series once, snapshotting at each requested order
    std::vector<int> sorted = orders;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    Eigen::MatrixXcd x = gsm.t_block;      // order-1 partial sum applied to T
    std::size_t next = 0;
    for (int order = 1; order <= max_order; ++order) {
        if (order > 1) x = gsm.t_block + apply_feedback(gsm, w, x);
        if (next < sorted.size() && sorted[next] == order) {
            order_study_row row;
            row.order = order;
            row.gamma_c = gsm.gamma + 0.5 * gsm.r_block * w.times_dense_left(x);
            row.deviation_vs_direct =
                (row.gamma_c - study.direct).cwiseAbs().maxCoeff();
            study.rows.push_back(std::move(row));
            ++next;
        }
    }
    return study;
}

} // namespace gsml
