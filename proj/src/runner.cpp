#include "gsmlayer/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "gsmlayer/gsmio.hpp"
#include "gsmlayer/interaction.hpp"
#include "gsmlayer/oracle.hpp"
#include "gsmlayer/wcache.hpp"

namespace gsml {

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
}

// GSM source for a job: file, or synthetic blocks generated per frequency
gsm_file load_gsm_source(const job_config& cfg, const std::vector<double>& freqs) {
    if (!cfg.gsm_synthetic) {
        gsm_file f = read_gsm(cfg.gsm_path);
        return f;
    }
    std::vector<double> sorted = freqs;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (sorted.empty())
        throw std::runtime_error("synthetic GSM source needs at least one frequency");

    gsm_file f;
    f.antenna = "synthetic";
    f.l_max = cfg.synth_l_max;
    f.r_min_m = cfg.synth_r_min_m;
    f.frequencies_hz = sorted;
    const svwf_basis basis = make_svwf_basis(cfg.synth_l_max);
    for (double fq : sorted) f.blocks.push_back(synthesize_gsm(cfg.synth, basis, fq));
    f.ports = f.blocks.front().ports();
    f.port_labels = f.blocks.front().port_labels;
    f.validate();
    return f;
}

// exact-match lookup; failure lists what the file offers
const gsm_blocks& blocks_at(const gsm_file& file, double frequency_hz) {
    for (std::size_t q = 0; q < file.frequencies_hz.size(); ++q) {
        const double fq = file.frequencies_hz[q];
        if (fq == frequency_hz ||
            std::abs(fq - frequency_hz) <= 1e-12 * std::abs(frequency_hz))
            return file.blocks[q];
    }
    std::ostringstream os;
    os << "frequency " << frequency_hz << " Hz not present in GSM source; available:";
    for (double fq : file.frequencies_hz) os << " " << fq;
    throw std::runtime_error(os.str());
}

contour_spec contour_for(const job_config& cfg, int l_max, double k_r_min) {
    contour_spec c;
    c.kappa_m = cfg.kappa_override > 0.0 ? cfg.kappa_override
                                         : kappa_rule(l_max, k_r_min, cfg.iota);
    c.iota = cfg.iota;
    c.quad_order_evanescent = cfg.quad_order_evanescent;
    c.quad_order_propagating = cfg.quad_order_propagating;
    return c;
}

// once-per-key provider so concurrent sweep points never assemble the same
// interaction matrix twice; results are scheduling-independent
class w_provider {
public:
    explicit w_provider(std::string cache_dir) : cache_dir_(std::move(cache_dir)) {}

    std::shared_ptr<const wmatrix> get(std::uint64_t key, const svwf_basis& basis,
                                       const layer_stack& stack, double k,
                                       double omega, const contour_spec& contour,
                                       bool& cold, double& ms) {
        std::shared_future<std::shared_ptr<const wmatrix>> fut;
        std::promise<std::shared_ptr<const wmatrix>> prom;
        bool claimed = false;
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = futures_.find(key);
            if (it == futures_.end()) {
                futures_.emplace(key, prom.get_future().share());
                claimed = true;
            } else {
                fut = it->second;
            }
        }
        if (!claimed) {
            cold = false;
            ms = 0.0;
            return fut.get();  // rethrows the producer's failure if any
        }
        try {
            auto t0 = std::chrono::steady_clock::now();
            auto w = std::make_shared<wmatrix>();
            bool from_disk = false;
            if (!cache_dir_.empty()) from_disk = load_wmatrix(cache_dir_, key, *w);
            if (!from_disk) {
                *w = assemble_w(basis, stack, k, omega, contour);
                if (!cache_dir_.empty()) store_wmatrix(cache_dir_, key, *w);
            }
            ms = ms_since(t0);
            cold = !from_disk;
            std::shared_ptr<const wmatrix> out = w;
            prom.set_value(out);
            return out;
        } catch (...) {
            prom.set_exception(std::current_exception());
            throw;
        }
    }

private:
    std::string cache_dir_;
    std::mutex mu_;
    std::map<std::uint64_t, std::shared_future<std::shared_ptr<const wmatrix>>> futures_;
};

} // namespace

sweep_result run_sweep(const job_config& cfg, const run_options& opt) {
    if (cfg.frequencies_hz.empty())
        throw std::runtime_error("run_sweep: no frequencies configured");
    const gsm_file source = load_gsm_source(cfg, cfg.frequencies_hz);

    int l_max = source.l_max;
    if (cfg.l_max_override > 0) {
        if (cfg.l_max_override > source.l_max)
            throw std::runtime_error(
                "run_sweep: l_max override exceeds the GSM source degree");
        l_max = cfg.l_max_override;
    }
    const svwf_basis basis = make_svwf_basis(l_max);

    struct point {
        double frequency_hz;
        double param_value = 0.0;
        bool has_param = false;
    };
    std::vector<point> points;
    for (double fq : cfg.frequencies_hz) {
        if (cfg.sweep_parameter.empty()) {
            points.push_back({fq, 0.0, false});
        } else {
            for (double v : cfg.sweep_values) points.push_back({fq, v, true});
        }
    }

    w_provider provider(opt.cache_dir);
    std::vector<sweep_record> records(points.size());
    std::vector<std::exception_ptr> errors(points.size());

    auto run_point = [&](std::size_t pidx) {
        const point& pt = points[pidx];
        layer_stack stack = cfg.stack;
        if (pt.has_param) set_stack_parameter(stack, cfg.sweep_parameter, pt.param_value);
        stack.validate();

        const double omega = 2.0 * pi * pt.frequency_hz;
        const double k = k_top(stack, omega);
        const contour_spec contour = contour_for(cfg, l_max, k * source.r_min_m);
        const std::uint64_t key =
            w_cache_key(l_max, stack.fingerprint(), pt.frequency_hz,
                        contour.fingerprint());

        bool cold = false;
        double w_ms = 0.0;
        std::shared_ptr<const wmatrix> w =
            provider.get(key, basis, stack, k, omega, contour, cold, w_ms);

        gsm_blocks gsm = blocks_at(source, pt.frequency_hz);
        if (l_max < source.l_max) gsm = truncate_gsm(gsm, l_max);

        solve_report rep;
        auto t0 = std::chrono::steady_clock::now();
        Eigen::MatrixXcd gc = gamma_composite(gsm, *w, cfg.solve, &rep);
        const double solve_ms = ms_since(t0);

        sweep_record& rec = records[pidx];
        rec.frequency_hz = pt.frequency_hz;
        if (pt.has_param) rec.params.emplace_back(cfg.sweep_parameter, pt.param_value);
        rec.gamma_c = std::move(gc);
        rec.w_ms = w_ms;
        rec.w_reused = !cold;  // reused from another point or from the disk cache
        rec.solve_ms = solve_ms;
        rec.rcond = rep.rcond;
    };

    const int threads = std::max(1, opt.threads);
    if (threads == 1 || points.size() <= 1) {
        for (std::size_t pidx = 0; pidx < points.size(); ++pidx) run_point(pidx);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (;;) {
                const std::size_t pidx = next.fetch_add(1);
                if (pidx >= points.size()) return;
                try {
                    run_point(pidx);
                } catch (...) {
                    errors[pidx] = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < std::min<std::size_t>(threads, points.size()); ++t)
            pool.emplace_back(worker);
        for (auto& th : pool) th.join();
        for (std::size_t pidx = 0; pidx < points.size(); ++pidx)
            if (errors[pidx]) std::rethrow_exception(errors[pidx]);
    }

    sweep_result result;
    result.records = std::move(records);
    for (const sweep_record& rec : result.records) {
        result.total_w_ms += rec.w_ms;
        result.total_solve_ms += rec.solve_ms;
        if (rec.w_ms > 0.0 && !rec.w_reused) ++result.w_assemblies;
    }
    return result;
}

fit_run_result run_fit(const job_config& cfg, const run_options& opt,
                       std::ostream& log) {
    if (cfg.observed_path.empty())
        throw std::runtime_error("run_fit: no observed data configured");
    const std::vector<observed_point> observed = read_observed_csv(cfg.observed_path);

    std::vector<double> freqs;
    for (const observed_point& p : observed) freqs.push_back(p.frequency_hz);
    std::sort(freqs.begin(), freqs.end());
    freqs.erase(std::unique(freqs.begin(), freqs.end()), freqs.end());

    const gsm_file source = load_gsm_source(cfg, freqs);
    const int l_max = cfg.l_max_override > 0 ? cfg.l_max_override : source.l_max;
    if (l_max > source.l_max)
        throw std::runtime_error("run_fit: l_max override exceeds the GSM source degree");
    const svwf_basis basis = make_svwf_basis(l_max);

    auto misfit_for = [&](const layer_stack& stack) {
        double total = 0.0;
        std::map<double, Eigen::MatrixXcd> gamma_by_freq;
        for (double fq : freqs) {
            const double omega = 2.0 * pi * fq;
            const double k = k_top(stack, omega);
            const contour_spec contour = contour_for(cfg, l_max, k * source.r_min_m);
            const wmatrix w = assemble_w(basis, stack, k, omega, contour);
            gsm_blocks gsm = blocks_at(source, fq);
            if (l_max < source.l_max) gsm = truncate_gsm(gsm, l_max);
            gamma_by_freq[fq] = gamma_composite(gsm, w, cfg.solve);
        }
        for (const observed_point& p : observed) {
            const Eigen::MatrixXcd& gc = gamma_by_freq[p.frequency_hz];
            if (p.port_i < 1 || p.port_i > gc.rows() || p.port_j < 1 ||
                p.port_j > gc.cols())
                throw std::runtime_error("run_fit: observed port index out of range");
            total += std::norm(gc(p.port_i - 1, p.port_j - 1) - p.value);
        }
        return total;
    };

    const auto t0 = std::chrono::steady_clock::now();
    fit_run_result out;
    for (const auto& fp : cfg.free_params) out.names.push_back(fp.path);

    if (cfg.free_params.empty()) {
        // nothing to optimize: report the misfit of the configured stack
        out.result.best = {};
        out.result.misfit = misfit_for(cfg.stack);
        out.result.evaluations = 1;
        out.result.converged = true;
        out.result.history = {out.result.misfit};
        out.elapsed_s = ms_since(t0) / 1e3;
        log << "no free parameters; misfit of the configured stack: "
            << out.result.misfit << "\n";
        return out;
    }

    objective_fn objective = [&](const std::vector<double>& x) {
        layer_stack stack = cfg.stack;
        for (std::size_t d = 0; d < x.size(); ++d)
            set_stack_parameter(stack, cfg.free_params[d].path, x[d]);
        stack.validate();
        return misfit_for(stack);
    };

    std::vector<double> lo, hi, start;
    for (const auto& fp : cfg.free_params) {
        lo.push_back(fp.lo);
        hi.push_back(fp.hi);
        start.push_back(fp.start);
    }

    if (cfg.fit_method == "grid_then_refine")
        out.result = grid_then_refine(objective, lo, hi, /*grid_per_dim=*/5,
                                      cfg.max_evaluations, cfg.fit_tolerance);
    else
        out.result = nelder_mead(objective, start, lo, hi, cfg.max_evaluations,
                                 cfg.fit_tolerance);
    out.elapsed_s = ms_since(t0) / 1e3;

    if (!out.result.converged)
        log << "warning: optimizer stopped at the evaluation budget; "
               "best-so-far parameters returned\n";
    (void)opt;
    return out;
}

bool validate_report::all_pass() const {
    for (const validate_entry& e : entries)
        if (!e.informational && !e.pass) return false;
    return true;
}

namespace {

validate_entry check(std::string name, double value, double threshold,
                     std::string note = {}) {
    validate_entry e;
    e.name = std::move(name);
    e.value = value;
    e.threshold = threshold;
    e.pass = value <= threshold;
    e.note = std::move(note);
    return e;
}

validate_entry info(std::string name, double value, std::string note = {}) {
    validate_entry e;
    e.name = std::move(name);
    e.value = value;
    e.informational = true;
    e.note = std::move(note);
    return e;
}

void log_entry(std::ostream& log, const validate_entry& e) {
    if (e.informational)
        log << "  [info] " << e.name << " = " << e.value
            << (e.note.empty() ? "" : "  (" + e.note + ")") << "\n";
    else
        log << "  [" << (e.pass ? "pass" : "FAIL") << "] " << e.name << " = "
            << e.value << " (threshold " << e.threshold << ")"
            << (e.note.empty() ? "" : "  (" + e.note + ")") << "\n";
}

void run_oracle_checks(validate_report& report, std::uint64_t seed,
                       std::ostream& log) {
    const double f_hz = 3.5e9;
    const double omega = 2.0 * pi * f_hz;
    const double k = omega / speed_of_light;

    // spectral transform identity for a handful of low-degree modes
    {
        const auto points = shell_points(20, 1.0, 2.0, k, seed);
        const std::vector<svwf_index> modes = {
            {1, 0, 0, 1}, {2, 0, 0, 1}, {1, 1, 1, 1}, {2, 1, 1, 1}, {2, 0, 1, 2}};
        for (const svwf_index& n : modes) {
            const double err = check_transform_identity(n, k, points, 64, 64);
            report.entries.push_back(
                check("transform_identity " + n.to_string(), err, 1e-6));
            log_entry(log, report.entries.back());
        }
    }

    // boundary cancellation on a PEC plane, two truncation settings
    const double z_i = -0.2;
    layer_stack pec;
    pec.z_interface = z_i;
    pec.bottom = termination::pec;

    struct scenario {
        int l_src;
        double k_r_min;
        // expansion order for the reflected field: must clear the Bessel
        // turnover k*max|r| of the probe grid (~16.5 here) with enough
        // margin for the image-source expansion to decay
        int l_exp;
    };
    for (const scenario& sc : {scenario{8, 4.0, 29}, scenario{17, 10.7098, 37}}) {
        const int l_exp = sc.l_exp;
        const svwf_basis basis = make_svwf_basis(l_exp);
        contour_spec contour;
        contour.kappa_m = kappa_rule(sc.l_src, sc.k_r_min);
        const wmatrix w = assemble_w(basis, pec, k, omega, contour);

        std::vector<int> sources;
        for (int idx = 0; idx < basis.size(); ++idx)
            if (basis.modes[idx].l <= 3) sources.push_back(idx);
        const auto points = plane_grid(z_i, {0.05, 0.15, 0.28, 0.40, 0.52}, 5);
        const auto res = check_pec_boundary(sources, z_i, k, w, points);
        report.entries.push_back(check(
            "pec_boundary l_src<=" + std::to_string(std::min(3, sc.l_src)) +
                " expansion L=" + std::to_string(l_exp),
            res.max_residual, 1e-3, "kappa=" + std::to_string(contour.kappa_m)));
        log_entry(log, report.entries.back());

        if (sc.l_src == 17) {
            // negative control: flipping the evanescent orientation must
            // destroy the cancellation
            contour_spec flipped = contour;
            flipped.flip_evanescent = true;
            const wmatrix wf = assemble_w(basis, pec, k, omega, flipped);
            const auto bad = check_pec_boundary(sources, z_i, k, wf, points);
            validate_entry e;
            e.name = "pec_boundary_flip_control";
            e.value = bad.max_residual;
            e.threshold = 0.1;
            e.pass = bad.max_residual >= 0.1;  // must be LARGE
            e.note = "flipped evanescent weights; residual must blow up";
            report.entries.push_back(e);
            log_entry(log, report.entries.back());
        }
    }

    // reflected-field expansion vs direct contour integration, dielectric
    {
        layer_stack diel;
        diel.z_interface = z_i;
        diel.bottom = termination::half_space;
        diel.bottom_medium.eps_r = 4.0;

        const int l_exp = 19;
        const svwf_basis basis = make_svwf_basis(l_exp);
        contour_spec contour;
        contour.kappa_m = kappa_rule(8, 4.0);
        const wmatrix w = assemble_w(basis, diel, k, omega, contour);

        contour_spec fine = contour;
        fine.quad_order_evanescent *= 2;
        fine.quad_order_propagating *= 2;

        const double kr_hi = std::min(2.0, 0.5 * k * std::abs(z_i));
        const auto points = shell_points(20, 1.0, kr_hi, k, seed + 1);
        for (const svwf_index n :
             {svwf_index{2, 0, 0, 1}, svwf_index{1, 1, 1, 2}}) {
            const double err = check_reflected_field(n, diel, omega, points, w, fine, 64);
            report.entries.push_back(
                check("reflected_field eps4 " + n.to_string(), err, 1e-4));
            log_entry(log, report.entries.back());
        }
    }
}

void run_error_map(validate_report& report, std::uint64_t seed, std::ostream& log) {
    const std::vector<int> l_list = {6, 8, 10, 12};
    const std::vector<double> kappa_list = {1.02, 1.2, 1.5, 2.0, 2.6};
    for (bool far : {true, false}) {
        log << (far ? "far" : "near") << "-regime error map (rows L, cols kappa):\n";
        const auto map = gamma_error_map(far, l_list, kappa_list, seed);
        std::size_t q = 0;
        for (int l : l_list) {
            std::ostringstream row;
            row << "  L=" << l << ":";
            for (double kp : kappa_list) {
                const error_map_point& pt = map[q++];
                row << "  " << pt.max_dgamma;
                report.entries.push_back(info(
                    std::string(far ? "far" : "near") + " error L=" +
                        std::to_string(pt.l_max) + " kappa=" + std::to_string(pt.kappa),
                    pt.max_dgamma));
            }
            log << row.str() << "\n";
        }
    }
}

} // namespace

validate_report run_validate(const std::string& selection, std::uint64_t seed,
                             std::ostream& log) {
    validate_report report;
    const bool oracles = selection.empty() || selection == "oracles" || selection == "all";
    const bool error_map = selection == "error-map" || selection == "all";
    if (!oracles && !error_map)
        throw std::runtime_error("run_validate: unknown selection '" + selection + "'");
    if (oracles) run_oracle_checks(report, seed, log);
    if (error_map) run_error_map(report, seed, log);
    return report;
}

std::vector<error_map_point> gamma_error_map(bool far_regime,
                                             const std::vector<int>& l_list,
                                             const std::vector<double>& kappa_list,
                                             std::uint64_t seed) {
    if (l_list.empty() || kappa_list.empty())
        throw std::invalid_argument("gamma_error_map: empty grid");

    const double f_hz = 3.5e9;
    const double omega = 2.0 * pi * f_hz;
    const double k = omega / speed_of_light;
    const double r_min = 0.05;

    layer_stack stack;
    // near stays above the validity edge |z| = r_min: right at the sphere the
    // high-degree image couplings leave the contraction regime entirely and
    // neither candidate nor reference solve means anything
    stack.z_interface = far_regime ? -3.0 * r_min : -2.0 * r_min;
    stack.bottom = termination::half_space;
    stack.bottom_medium.eps_r = 4.0;

    const int l_ref = *std::max_element(l_list.begin(), l_list.end()) + 4;
    const svwf_basis basis_ref = make_svwf_basis(l_ref);

    contour_spec contour_ref;
    contour_ref.kappa_m = kappa_rule(l_ref, k * r_min);
    contour_ref.quad_order_evanescent = 66;
    contour_ref.quad_order_propagating = 66;
    const wmatrix w_ref = assemble_w(basis_ref, stack, k, omega, contour_ref);

    synthetic_gsm_spec spec;
    spec.kind = synthetic_kind::random_passive;
    spec.seed = seed;
    spec.radius_bound = 0.35;
    const gsm_blocks gsm_ref = synthesize_gsm(spec, basis_ref, f_hz, &w_ref);
    const Eigen::MatrixXcd gamma_ref = gamma_composite(gsm_ref, w_ref);

    std::vector<error_map_point> map;
    for (int l : l_list) {
        const gsm_blocks gsm_l = truncate_gsm(gsm_ref, l);
        const svwf_basis basis_l = make_svwf_basis(l);
        for (double kp : kappa_list) {
            contour_spec contour;
            contour.kappa_m = kp;
            const wmatrix w = assemble_w(basis_l, stack, k, omega, contour);
            const Eigen::MatrixXcd gamma_l = gamma_composite(gsm_l, w);
            map.push_back({l, kp, (gamma_l - gamma_ref).cwiseAbs().maxCoeff()});
        }
    }
    return map;
}

} // namespace gsml
