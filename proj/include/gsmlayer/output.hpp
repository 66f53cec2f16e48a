#pragma once

// Plot-ready result writers (CSV and a Touchstone-style emitter for port
// matrices over frequency) plus the CSV reader used by the fitting loop.

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "gsmlayer/common.hpp"

namespace gsml {

struct sweep_record {
    double frequency_hz = 0.0;
    // additional sweep-axis values, name -> SI value
    std::vector<std::pair<std::string, double>> params;
    Eigen::MatrixXcd gamma_c;   // composite port reflection at this point
    double w_ms = 0.0;          // interaction-matrix time (0 when reused)
    double solve_ms = 0.0;
    double rcond = 1.0;
    bool w_reused = false;
};

// columns: frequency_hz, <param names...>, port_i, port_j, re, im,
// mag_db (20 log10), phase_deg — one row per matrix entry
void write_csv(std::ostream& out, const std::vector<sweep_record>& records);

// Touchstone .sNp body ("# Hz S RI R 50"); requires exactly one record per
// frequency and a pure frequency sweep
void write_touchstone(std::ostream& out, const std::vector<sweep_record>& records);

struct observed_point {
    double frequency_hz = 0.0;
    int port_i = 1, port_j = 1;  // 1-based
    cplx value;
};

// reads observations back from the CSV schema above (extra columns ignored)
std::vector<observed_point> read_observed_csv(const std::string& path);

} // namespace gsml
