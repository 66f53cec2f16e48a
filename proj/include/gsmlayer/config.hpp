#pragma once

// Declarative job configuration: one JSON document describing the GSM source,
// the layer stack, contour / solve overrides, sweep axes, fit setup, and
// output destination.  Quantities may carry unit suffixes; everything is
// stored in SI after parsing.

#include <string>
#include <vector>

#include "gsmlayer/fresnel.hpp"
#include "gsmlayer/gsmio.hpp"
#include "gsmlayer/interaction.hpp"

namespace gsml {

struct job_config {
    // GSM source: exactly one of a file path or a synthetic description
    std::string gsm_path;
    bool gsm_synthetic = false;
    synthetic_gsm_spec synth;
    int synth_l_max = 3;
    double synth_r_min_m = 0.05;

    layer_stack stack;

    // contour / truncation overrides; zero means "use the built-in rule"
    int l_max_override = 0;
    double kappa_override = 0.0;
    double iota = 0.55;
    int quad_order_evanescent = 33;
    int quad_order_propagating = 33;

    solve_options solve;

    // sweep axes: frequency list plus an optional stack-parameter axis
    std::vector<double> frequencies_hz;
    std::string sweep_parameter;      // e.g. "layer:1:eps_r", "z_interface"
    std::vector<double> sweep_values; // SI

    // fit setup
    struct free_param {
        std::string path;  // stack-parameter path
        double lo = 0.0, hi = 0.0, start = 0.0;  // SI
    };
    std::string observed_path;
    std::vector<free_param> free_params;
    std::string fit_method = "nelder_mead";  // or "grid_then_refine"
    int max_evaluations = 400;
    double fit_tolerance = 1e-10;

    std::string output_path;           // empty -> stdout
    std::string output_format = "csv"; // or "touchstone"
};

// parse from text / file; errors carry the offending field path
job_config parse_job_config(const std::string& text, const std::string& origin);
job_config load_job_config(const std::string& path);

// stack parameters addressable by sweeps and fits: "z_interface",
// "above:<field>", "layer:<i>:<field>" (1-based), "bottom:<field>" with
// field one of eps_r, sigma, mu_r, thickness
void set_stack_parameter(layer_stack& stack, const std::string& path, double value_si);
double get_stack_parameter(const layer_stack& stack, const std::string& path);

// dimension string ("length", "conductivity", "dimensionless") for a
// stack-parameter path, for unit-aware parsing of sweep/fit values
std::string stack_parameter_dimension(const std::string& path);

} // namespace gsml
