#pragma once

// Orchestration behind the CLI subcommands: parameter/frequency sweeps with
// interaction-matrix reuse and timing, the inverse-fitting loop, the oracle
// validation suite, and the (truncation degree, contour truncation) error-map
// methodology.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gsmlayer/config.hpp"
#include "gsmlayer/fit.hpp"
#include "gsmlayer/output.hpp"

namespace gsml {

struct run_options {
    int threads = 1;
    std::string cache_dir;  // empty: in-memory reuse only
};

struct sweep_result {
    std::vector<sweep_record> records;  // ordered by sweep index
    double total_w_ms = 0.0;
    double total_solve_ms = 0.0;
    int w_assemblies = 0;  // cold assemblies actually performed
};

sweep_result run_sweep(const job_config& cfg, const run_options& opt);

struct fit_run_result {
    std::vector<std::string> names;  // free-parameter paths
    fit_result result;
    double elapsed_s = 0.0;
};

fit_run_result run_fit(const job_config& cfg, const run_options& opt,
                       std::ostream& log);

struct validate_entry {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    // informational rows report a measurement without a pass criterion
    bool informational = false;
    bool pass = true;
    std::string note;
};

struct validate_report {
    std::vector<validate_entry> entries;
    bool all_pass() const;
};

// selection: "oracles" (default), "error-map", or "all"
validate_report run_validate(const std::string& selection, std::uint64_t seed,
                             std::ostream& log);

struct error_map_point {
    int l_max = 0;
    double kappa = 0.0;
    double max_dgamma = 0.0;  // max |entry difference| vs the reference solve
};

// composite-reflection error over a grid of truncation degrees and contour
// truncation points, against a high-resolution reference (degree + 4,
// doubled quadrature); far_regime picks |z_interface| = 3 R_min vs 2 R_min
std::vector<error_map_point> gamma_error_map(bool far_regime,
                                             const std::vector<int>& l_list,
                                             const std::vector<double>& kappa_list,
                                             std::uint64_t seed);

} // namespace gsml
