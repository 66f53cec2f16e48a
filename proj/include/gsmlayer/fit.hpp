#pragma once

// Box-bounded derivative-free minimizers for the inverse-fitting loop:
// Nelder-Mead with clamped proposals, and a coarse-grid scan followed by a
// Nelder-Mead refinement.

#include <functional>
#include <vector>

namespace gsml {

using objective_fn = std::function<double(const std::vector<double>&)>;

struct fit_result {
    std::vector<double> best;
    double misfit = 0.0;
    int evaluations = 0;
    bool converged = true;        // false: budget exhausted, best-so-far returned
    std::vector<double> history;  // best misfit after each evaluation
};

fit_result nelder_mead(const objective_fn& f, std::vector<double> start,
                       const std::vector<double>& lo, const std::vector<double>& hi,
                       int max_evaluations, double tolerance);

fit_result grid_then_refine(const objective_fn& f, const std::vector<double>& lo,
                            const std::vector<double>& hi, int grid_per_dim,
                            int max_evaluations, double tolerance);

} // namespace gsml
