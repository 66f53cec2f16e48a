#include "gsmlayer/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "gsmlayer/units.hpp"

namespace gsml {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& origin, const std::string& what) {
    throw std::runtime_error("config '" + origin + "': " + what);
}

// quantity fields accept a bare number (SI) or a suffixed string
double quantity(const json& v, const char* dimension, const std::string& origin,
                const std::string& field) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        try {
            return parse_quantity(v.get<std::string>(), dimension);
        } catch (const std::exception& e) {
            config_error(origin, field + ": " + e.what());
        }
    }
    config_error(origin, field + " must be a number or a quantity string");
}

layer parse_layer(const json& v, const std::string& origin, const std::string& field,
                  bool with_thickness) {
    if (!v.is_object()) config_error(origin, field + " must be an object");
    layer lay;
    if (v.contains("eps_r"))
        lay.eps_r = quantity(v["eps_r"], "dimensionless", origin, field + ".eps_r");
    if (v.contains("sigma"))
        lay.sigma = quantity(v["sigma"], "conductivity", origin, field + ".sigma");
    if (v.contains("mu_r"))
        lay.mu_r = quantity(v["mu_r"], "dimensionless", origin, field + ".mu_r");
    if (v.contains("thickness"))
        lay.thickness = quantity(v["thickness"], "length", origin, field + ".thickness");
    else if (with_thickness)
        config_error(origin, field + ".thickness missing");
    return lay;
}

svwf_index parse_mode(const json& v, const std::string& origin,
                      const std::string& field) {
    if (!v.is_object()) config_error(origin, field + " must be an object");
    svwf_index n;
    if (v.contains("tau")) n.tau = v["tau"].get<int>();
    if (v.contains("sigma")) {
        if (v["sigma"].is_string())
            n.sigma = (v["sigma"].get<std::string>() == "odd") ? 1 : 0;
        else
            n.sigma = v["sigma"].get<int>();
    }
    if (v.contains("m")) n.m = v["m"].get<int>();
    if (v.contains("l")) n.l = v["l"].get<int>();
    return n;
}

} // namespace

job_config parse_job_config(const std::string& text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        config_error(origin, std::string("not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) config_error(origin, "top level must be an object");

    job_config cfg;

    // --- GSM source ---
    if (!doc.contains("gsm")) config_error(origin, "gsm section missing");
    const json& g = doc["gsm"];
    const bool has_path = g.contains("path");
    const bool has_synth = g.contains("synthetic");
    if (has_path == has_synth)
        config_error(origin, "gsm must contain exactly one of path / synthetic");
    if (has_path) {
        cfg.gsm_path = g["path"].get<std::string>();
    } else {
        cfg.gsm_synthetic = true;
        const json& s = g["synthetic"];
        const std::string kind = s.value("kind", "single_mode_radiator");
        if (kind == "single_mode_radiator")
            cfg.synth.kind = synthetic_kind::single_mode_radiator;
        else if (kind == "diagonal_scatterer")
            cfg.synth.kind = synthetic_kind::diagonal_scatterer;
        else if (kind == "random_passive")
            cfg.synth.kind = synthetic_kind::random_passive;
        else
            config_error(origin, "gsm.synthetic.kind '" + kind + "' unknown");
        if (s.contains("excited"))
            cfg.synth.excited = parse_mode(s["excited"], origin, "gsm.synthetic.excited");
        if (s.contains("gamma0")) {
            const json& q = s["gamma0"];
            if (q.is_array() && q.size() == 2)
                cfg.synth.gamma0 = cplx(q[0].get<double>(), q[1].get<double>());
            else if (q.is_number())
                cfg.synth.gamma0 = cplx(q.get<double>(), 0.0);
            else
                config_error(origin, "gsm.synthetic.gamma0 must be a number or [re, im]");
        }
        if (s.contains("seed")) cfg.synth.seed = s["seed"].get<std::uint64_t>();
        if (s.contains("radius_bound"))
            cfg.synth.radius_bound = s["radius_bound"].get<double>();
        if (s.contains("ports")) cfg.synth.ports = s["ports"].get<int>();
        if (s.contains("l_max")) cfg.synth_l_max = s["l_max"].get<int>();
        if (s.contains("r_min"))
            cfg.synth_r_min_m = quantity(s["r_min"], "length", origin, "gsm.synthetic.r_min");
        cfg.synth.r_min_m = cfg.synth_r_min_m;  // same sphere feeds the draw's roll-off
    }

    // --- layer stack ---
    if (!doc.contains("stack")) config_error(origin, "stack section missing");
    const json& st = doc["stack"];
    if (!st.contains("z_interface")) config_error(origin, "stack.z_interface missing");
    cfg.stack.z_interface =
        quantity(st["z_interface"], "length", origin, "stack.z_interface");
    if (st.contains("above"))
        cfg.stack.above = parse_layer(st["above"], origin, "stack.above", false);
    if (st.contains("layers")) {
        if (!st["layers"].is_array())
            config_error(origin, "stack.layers must be an array");
        int t = 1;
        for (const json& lv : st["layers"])
            cfg.stack.layers.push_back(parse_layer(
                lv, origin, "stack.layers[" + std::to_string(t++) + "]", true));
    }
    const std::string term = st.value("termination", "half_space");
    if (term == "half_space") {
        cfg.stack.bottom = termination::half_space;
        if (!st.contains("bottom"))
            config_error(origin, "stack.bottom required for half_space termination");
        cfg.stack.bottom_medium = parse_layer(st["bottom"], origin, "stack.bottom", false);
    } else if (term == "pec") {
        cfg.stack.bottom = termination::pec;
    } else if (term == "pmc") {
        cfg.stack.bottom = termination::pmc;
    } else {
        config_error(origin, "stack.termination '" + term + "' unknown");
    }
    try {
        cfg.stack.validate();
    } catch (const std::exception& e) {
        config_error(origin, std::string("stack invalid: ") + e.what());
    }

    // --- contour overrides ---
    if (doc.contains("contour")) {
        const json& c = doc["contour"];
        if (c.contains("l_max")) cfg.l_max_override = c["l_max"].get<int>();
        if (c.contains("kappa_m")) cfg.kappa_override = c["kappa_m"].get<double>();
        if (c.contains("iota")) cfg.iota = c["iota"].get<double>();
        if (c.contains("quad_order_evanescent"))
            cfg.quad_order_evanescent = c["quad_order_evanescent"].get<int>();
        if (c.contains("quad_order_propagating"))
            cfg.quad_order_propagating = c["quad_order_propagating"].get<int>();
    }

    // --- solve options ---
    if (doc.contains("solve")) {
        const json& s = doc["solve"];
        const std::string mode = s.value("mode", "direct");
        if (mode == "direct" || mode == "direct_inverse")
            cfg.solve.mode = solve_mode::direct_inverse;
        else if (mode == "neumann")
            cfg.solve.mode = solve_mode::neumann;
        else
            config_error(origin, "solve.mode '" + mode + "' unknown");
        if (s.contains("neumann_order"))
            cfg.solve.neumann_order = s["neumann_order"].get<int>();
        if (s.contains("rcond_floor"))
            cfg.solve.rcond_floor = s["rcond_floor"].get<double>();
    }

    // --- sweep axes ---
    if (doc.contains("sweep")) {
        const json& s = doc["sweep"];
        if (!s.contains("frequencies") || !s["frequencies"].is_array() ||
            s["frequencies"].empty())
            config_error(origin, "sweep.frequencies must be a non-empty array");
        for (const json& f : s["frequencies"])
            cfg.frequencies_hz.push_back(
                quantity(f, "frequency", origin, "sweep.frequencies[]"));
        if (s.contains("parameter")) {
            const json& p = s["parameter"];
            if (!p.contains("path") || !p.contains("values"))
                config_error(origin, "sweep.parameter needs path and values");
            cfg.sweep_parameter = p["path"].get<std::string>();
            const std::string dim = stack_parameter_dimension(cfg.sweep_parameter);
            for (const json& v : p["values"])
                cfg.sweep_values.push_back(
                    quantity(v, dim.c_str(), origin, "sweep.parameter.values[]"));
            if (cfg.sweep_values.empty())
                config_error(origin, "sweep.parameter.values is empty");
        }
    }

    // --- fit setup ---
    if (doc.contains("fit")) {
        const json& f = doc["fit"];
        if (f.contains("observed"))
            cfg.observed_path = f["observed"].get<std::string>();
        if (f.contains("free")) {
            for (const json& p : f["free"]) {
                job_config::free_param fp;
                fp.path = p.at("path").get<std::string>();
                const std::string dim = stack_parameter_dimension(fp.path);
                fp.lo = quantity(p.at("lo"), dim.c_str(), origin, "fit.free[].lo");
                fp.hi = quantity(p.at("hi"), dim.c_str(), origin, "fit.free[].hi");
                fp.start = p.contains("start")
                               ? quantity(p["start"], dim.c_str(), origin, "fit.free[].start")
                               : 0.5 * (fp.lo + fp.hi);
                if (!(fp.lo < fp.hi))
                    config_error(origin, "fit.free[].lo must be below hi for " + fp.path);
                cfg.free_params.push_back(fp);
            }
        }
        cfg.fit_method = f.value("method", cfg.fit_method);
        if (cfg.fit_method != "nelder_mead" && cfg.fit_method != "grid_then_refine")
            config_error(origin, "fit.method '" + cfg.fit_method + "' unknown");
        if (f.contains("max_evaluations"))
            cfg.max_evaluations = f["max_evaluations"].get<int>();
        if (f.contains("tolerance")) cfg.fit_tolerance = f["tolerance"].get<double>();
    }

    // --- output ---
    if (doc.contains("output")) {
        const json& o = doc["output"];
        if (o.contains("path")) cfg.output_path = o["path"].get<std::string>();
        cfg.output_format = o.value("format", cfg.output_format);
        if (cfg.output_format != "csv" && cfg.output_format != "touchstone")
            config_error(origin, "output.format '" + cfg.output_format + "' unknown");
    }

    return cfg;
}

job_config load_job_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config '" + path + "': cannot open");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_job_config(buf.str(), path);
}

namespace {

double* field_of(layer& lay, const std::string& field) {
    if (field == "eps_r") return &lay.eps_r;
    if (field == "sigma") return &lay.sigma;
    if (field == "mu_r") return &lay.mu_r;
    if (field == "thickness") return &lay.thickness;
    return nullptr;
}

double* locate(layer_stack& stack, const std::string& path) {
    if (path == "z_interface") return &stack.z_interface;
    const std::size_t c1 = path.find(':');
    if (c1 == std::string::npos) return nullptr;
    const std::string head = path.substr(0, c1);
    std::string rest = path.substr(c1 + 1);
    if (head == "above") return field_of(stack.above, rest);
    if (head == "bottom") return field_of(stack.bottom_medium, rest);
    if (head == "layer") {
        const std::size_t c2 = rest.find(':');
        if (c2 == std::string::npos) return nullptr;
        const int idx = std::stoi(rest.substr(0, c2));
        if (idx < 1 || idx > static_cast<int>(stack.layers.size())) return nullptr;
        return field_of(stack.layers[idx - 1], rest.substr(c2 + 1));
    }
    return nullptr;
}

} // namespace

void set_stack_parameter(layer_stack& stack, const std::string& path, double value_si) {
    double* slot = locate(stack, path);
    if (!slot)
        throw std::invalid_argument("set_stack_parameter: no parameter at '" + path + "'");
    *slot = value_si;
}

double get_stack_parameter(const layer_stack& stack, const std::string& path) {
    layer_stack& mut = const_cast<layer_stack&>(stack);
    double* slot = locate(mut, path);
    if (!slot)
        throw std::invalid_argument("get_stack_parameter: no parameter at '" + path + "'");
    return *slot;
}

std::string stack_parameter_dimension(const std::string& path) {
    if (path == "z_interface") return "length";
    const std::size_t tail = path.rfind(':');
    const std::string field = tail == std::string::npos ? path : path.substr(tail + 1);
    if (field == "thickness") return "length";
    if (field == "sigma") return "conductivity";
    return "dimensionless";
}

} // namespace gsml
