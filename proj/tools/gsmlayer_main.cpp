// command-line driver: interaction-matrix assembly, single-point solves,
// sweeps with plot-ready output, inverse fitting, the validation suite, and
// synthetic GSM generation

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "gsmlayer/config.hpp"
#include "gsmlayer/gsmio.hpp"
#include "gsmlayer/interaction.hpp"
#include "gsmlayer/output.hpp"
#include "gsmlayer/runner.hpp"
#include "gsmlayer/wcache.hpp"
#include "gsmlayer/wmatrix.hpp"

namespace {

using namespace gsml;

// truncation degree and sphere radius implied by the configured GSM source
void source_geometry(const job_config& cfg, int& l_max, double& r_min_m) {
    if (cfg.gsm_synthetic) {
        l_max = cfg.synth_l_max;
        r_min_m = cfg.synth_r_min_m;
    } else {
        const gsm_file f = read_gsm(cfg.gsm_path);
        l_max = f.l_max;
        r_min_m = f.r_min_m;
    }
    if (cfg.l_max_override > 0) {
        if (cfg.l_max_override > l_max)
            throw std::runtime_error("l_max override exceeds the GSM source degree");
        l_max = cfg.l_max_override;
    }
}

int cmd_wmatrix(const std::string& config_path, const run_options& opt) {
    const job_config cfg = load_job_config(config_path);
    if (cfg.frequencies_hz.empty())
        throw std::runtime_error("wmatrix: no frequencies configured");

    int l_max = 0;
    double r_min_m = 0.0;
    source_geometry(cfg, l_max, r_min_m);
    const svwf_basis basis = make_svwf_basis(l_max);

    std::cout << "l_max " << l_max << ", " << basis.size() << " modes, r_min "
              << r_min_m << " m\n";
    for (double fq : cfg.frequencies_hz) {
        const double omega = 2.0 * pi * fq;
        const double k = k_top(cfg.stack, omega);
        contour_spec contour;
        contour.kappa_m = cfg.kappa_override > 0.0
                              ? cfg.kappa_override
                              : kappa_rule(l_max, k * r_min_m, cfg.iota);
        contour.iota = cfg.iota;
        contour.quad_order_evanescent = cfg.quad_order_evanescent;
        contour.quad_order_propagating = cfg.quad_order_propagating;

        const std::uint64_t key = w_cache_key(l_max, cfg.stack.fingerprint(), fq,
                                              contour.fingerprint());
        const auto t0 = std::chrono::steady_clock::now();
        wmatrix w;
        bool cached = false;
        if (!opt.cache_dir.empty()) cached = load_wmatrix(opt.cache_dir, key, w);
        if (!cached) {
            w = assemble_w(basis, cfg.stack, k, omega, contour);
            if (!opt.cache_dir.empty()) store_wmatrix(opt.cache_dir, key, w);
        }
        const double ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
        std::cout << "f = " << fq << " Hz: kappa_m = " << contour.kappa_m
                  << ", max |W| = " << w.max_abs() << ", " << std::fixed
                  << std::setprecision(2) << ms << " ms"
                  << (cached ? " (cache hit)" : "") << "\n";
        std::cout.unsetf(std::ios::fixed);
        std::cout << std::setprecision(6);
    }
    return 0;
}

void print_gamma_table(const sweep_record& rec) {
    std::cout << std::setw(8) << "port_i" << std::setw(8) << "port_j"
              << std::setw(24) << "re" << std::setw(24) << "im" << std::setw(12)
              << "mag_db" << std::setw(12) << "phase_deg" << "\n";
    for (int r = 0; r < rec.gamma_c.rows(); ++r)
        for (int c = 0; c < rec.gamma_c.cols(); ++c) {
            const cplx v = rec.gamma_c(r, c);
            std::cout << std::setw(8) << r + 1 << std::setw(8) << c + 1
                      << std::setw(24) << std::setprecision(15) << v.real()
                      << std::setw(24) << v.imag() << std::setw(12)
                      << std::setprecision(4) << 20.0 * std::log10(std::abs(v))
                      << std::setw(12) << std::arg(v) * 180.0 / pi << "\n";
        }
    std::cout << std::setprecision(6);
}

int cmd_solve(const std::string& config_path, const run_options& opt) {
    job_config cfg = load_job_config(config_path);
    if (cfg.frequencies_hz.size() != 1 || !cfg.sweep_parameter.empty())
        throw std::runtime_error(
            "solve expects a single frequency and no sweep axis; use `sweep`");
    const sweep_result res = run_sweep(cfg, opt);
    const sweep_record& rec = res.records.front();
    std::cout << "composite reflection at " << rec.frequency_hz << " Hz\n";
    print_gamma_table(rec);
    std::cout << "interaction matrix " << rec.w_ms << " ms"
              << (rec.w_reused ? " (reused)" : "") << ", solve " << rec.solve_ms
              << " ms, rcond " << rec.rcond << "\n";
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& output_override,
              const run_options& opt) {
    job_config cfg = load_job_config(config_path);
    if (!output_override.empty()) cfg.output_path = output_override;
    const sweep_result res = run_sweep(cfg, opt);

    std::ostringstream body;
    if (cfg.output_format == "touchstone")
        write_touchstone(body, res.records);
    else
        write_csv(body, res.records);
    if (cfg.output_path.empty()) {
        std::cout << body.str();
    } else {
        std::ofstream out(cfg.output_path, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot open output file '" + cfg.output_path + "'");
        out << body.str();
    }

    // timing report on stderr so table output can be piped cleanly
    std::cerr << res.records.size() << " sweep points, " << res.w_assemblies
              << " interaction-matrix assemblies\n"
              << "interaction-matrix time " << res.total_w_ms << " ms, solve time "
              << res.total_solve_ms << " ms\n";
    if (!res.records.empty())
        std::cerr << "per point: "
                  << (res.total_w_ms + res.total_solve_ms) / res.records.size()
                  << " ms mean\n";
    return 0;
}

int cmd_fit(const std::string& config_path, const run_options& opt) {
    const job_config cfg = load_job_config(config_path);
    const fit_run_result fit = run_fit(cfg, opt, std::cerr);
    for (std::size_t d = 0; d < fit.names.size(); ++d)
        std::cout << fit.names[d] << " = " << std::setprecision(12)
                  << fit.result.best[d] << "\n";
    std::cout << std::setprecision(6) << "misfit " << fit.result.misfit << " after "
              << fit.result.evaluations << " evaluations ("
              << std::setprecision(3) << fit.elapsed_s << " s)\n";
    if (!fit.result.converged)
        std::cout << "warning: not converged (budget exhausted); best-so-far shown\n";
    return 0;
}

int cmd_validate(const std::string& selection, std::uint64_t seed) {
    std::cout << "validation suite: " << selection << " (seed " << seed << ")\n";
    const validate_report report = run_validate(selection, seed, std::cout);
    int failed = 0, checks = 0;
    for (const validate_entry& e : report.entries)
        if (!e.informational) {
            ++checks;
            if (!e.pass) ++failed;
        }
    std::cout << checks << " checks, " << failed << " failed, "
              << report.entries.size() - checks << " informational\n";
    return report.all_pass() ? 0 : 1;
}

int cmd_synth_gsm(const std::string& config_path, const std::string& out_path) {
    const job_config cfg = load_job_config(config_path);
    if (!cfg.gsm_synthetic)
        throw std::runtime_error("synth-gsm needs a synthetic GSM source in the config");
    if (cfg.frequencies_hz.empty())
        throw std::runtime_error("synth-gsm: no frequencies configured");

    std::vector<double> freqs = cfg.frequencies_hz;
    std::sort(freqs.begin(), freqs.end());
    freqs.erase(std::unique(freqs.begin(), freqs.end()), freqs.end());

    gsm_file f;
    f.antenna = "synthetic";
    f.l_max = cfg.synth_l_max;
    f.r_min_m = cfg.synth_r_min_m;
    f.frequencies_hz = freqs;
    const svwf_basis basis = make_svwf_basis(cfg.synth_l_max);
    for (double fq : freqs) f.blocks.push_back(synthesize_gsm(cfg.synth, basis, fq));
    f.ports = f.blocks.front().ports();
    f.port_labels = f.blocks.front().port_labels;
    f.validate();
    write_gsm(f, out_path);
    std::cout << "wrote " << out_path << ": l_max " << f.l_max << ", "
              << f.blocks.front().modes() << " modes, " << f.ports << " port(s), "
              << freqs.size() << " frequencies\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"antenna reflection above planar stratified media"};
    app.require_subcommand(1);

    run_options opt;
    app.add_option("--threads", opt.threads, "worker threads for sweep points")
        ->check(CLI::PositiveNumber);
    app.add_option("--cache-dir", opt.cache_dir,
                   "directory for interaction-matrix cache files");

    std::string config_path, output_override;
    auto* sc_wmatrix = app.add_subcommand(
        "wmatrix", "assemble the interaction matrix for each configured frequency");
    sc_wmatrix->add_option("config", config_path, "job configuration (JSON)")
        ->required();

    auto* sc_solve =
        app.add_subcommand("solve", "composite reflection at a single point");
    sc_solve->add_option("config", config_path, "job configuration (JSON)")
        ->required();

    auto* sc_sweep = app.add_subcommand(
        "sweep", "frequency / parameter sweep with CSV or Touchstone output");
    sc_sweep->add_option("config", config_path, "job configuration (JSON)")
        ->required();
    sc_sweep->add_option("-o,--output", output_override,
                         "output path (overrides the config)");

    auto* sc_fit = app.add_subcommand(
        "fit", "recover stack parameters from observed reflection data");
    sc_fit->add_option("config", config_path, "job configuration (JSON)")
        ->required();

    std::string selection = "oracles";
    std::uint64_t seed = 12345;
    auto* sc_validate =
        app.add_subcommand("validate", "oracle checks and error-map methodology");
    sc_validate->add_option("--selection", selection, "oracles | error-map | all")
        ->check(CLI::IsMember({"oracles", "error-map", "all"}));
    sc_validate->add_option("--seed", seed, "seed for the deterministic point sets");

    std::string synth_out = "synthetic.gsmb";
    auto* sc_synth = app.add_subcommand(
        "synth-gsm", "write a synthetic GSM file from a configuration");
    sc_synth->add_option("config", config_path, "job configuration (JSON)")
        ->required();
    sc_synth->add_option("-o,--output", synth_out, "output GSM path")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sc_wmatrix->parsed()) return cmd_wmatrix(config_path, opt);
        if (sc_solve->parsed()) return cmd_solve(config_path, opt);
        if (sc_sweep->parsed()) return cmd_sweep(config_path, output_override, opt);
        if (sc_fit->parsed()) return cmd_fit(config_path, opt);
        if (sc_validate->parsed()) return cmd_validate(selection, seed);
        if (sc_synth->parsed()) return cmd_synth_gsm(config_path, synth_out);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
