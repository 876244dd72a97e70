#include "fnlslab/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fnls {

namespace {

using nlohmann::json;

int line_of_offset(const std::string& text, std::size_t byte) {
    const std::size_t end = std::min(byte, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + end, '\n'));
}

[[noreturn]] void fail(const std::string& label, const std::string& message) {
    throw ConfigError(label + ": " + message);
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed, const std::string& label) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        const bool known =
            std::any_of(allowed.begin(), allowed.end(),
                        [&](const char* key) { return it.key() == key; });
        if (!known)
            fail(label, "unknown key '" + (path.empty() ? it.key() : path + "." + it.key()) +
                            "'");
    }
}

const json* child(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

template <typename T>
T get_or(const json& obj, const std::string& path, const char* key, T fallback,
         const std::string& label) {
    const json* node = child(obj, key);
    if (!node) return fallback;
    try {
        return node->get<T>();
    } catch (const json::exception&) {
        fail(label, "key '" + path + key + "' has the wrong type");
    }
}

const json& section(const json& obj, const char* key, const std::string& label) {
    const json* node = child(obj, key);
    if (!node) {
        static const json empty = json::object();
        return empty;
    }
    if (!node->is_object()) fail(label, std::string("key '") + key + "' must be an object");
    return *node;
}

Sign sign_from(const std::string& word, const std::string& label) {
    if (word == "defocusing") return Sign::defocusing;
    if (word == "focusing") return Sign::focusing;
    fail(label, "equation.sign must be 'defocusing' or 'focusing', got '" + word + "'");
}

EquationForm form_from(const std::string& word, const std::string& label) {
    if (word == "original") return EquationForm::original;
    if (word == "renormalized") return EquationForm::renormalized;
    if (word == "gauged") return EquationForm::gauged;
    fail(label, "equation.form must be 'original', 'renormalized' or 'gauged', got '" + word +
                    "'");
}

InitialDataSpec::Kind data_kind_from(const std::string& word, const std::string& label) {
    if (word == "smooth") return InitialDataSpec::Kind::smooth;
    if (word == "rough") return InitialDataSpec::Kind::rough;
    if (word == "coefficients") return InitialDataSpec::Kind::coefficients;
    fail(label, "initial_data.kind must be 'smooth', 'rough' or 'coefficients', got '" + word +
                    "'");
}

Scheme scheme_from(const std::string& word, const std::string& label) {
    if (word == "rk4_interaction") return Scheme::rk4_interaction;
    if (word == "split_step") return Scheme::split_step;
    fail(label, "integrator.scheme must be 'rk4_interaction' or 'split_step', got '" + word +
                    "'");
}

SweepVariant variant_from(const std::string& word, const std::string& label) {
    if (word == "line") return SweepVariant::line;
    if (word == "torus") return SweepVariant::torus;
    fail(label, "sweep.variant must be 'line' or 'torus', got '" + word + "'");
}

TaperKind taper_from(const std::string& word, const std::string& label) {
    if (word == "none") return TaperKind::none;
    if (word == "cosine") return TaperKind::cosine;
    fail(label, "ensemble.taper_kind must be 'none' or 'cosine', got '" + word + "'");
}

InitialDataSpec read_initial_data(const json& obj, std::uint64_t default_seed,
                                  const std::string& label) {
    check_keys(obj, "equation.initial_data",
               {"kind", "amplitude", "n0", "phi0", "gamma", "seed", "coefficients"}, label);
    const std::string prefix = "equation.initial_data.";
    InitialDataSpec data;
    data.kind = data_kind_from(get_or<std::string>(obj, prefix, "kind", "smooth", label), label);
    data.amplitude = get_or(obj, prefix, "amplitude", data.amplitude, label);
    data.n0 = get_or(obj, prefix, "n0", data.n0, label);
    data.phi0 = get_or(obj, prefix, "phi0", data.phi0, label);
    data.gamma = get_or(obj, prefix, "gamma", data.gamma, label);
    data.seed = get_or(obj, prefix, "seed", default_seed, label);
    if (const json* coeffs = child(obj, "coefficients")) {
        if (!coeffs->is_array()) fail(label, prefix + "coefficients must be an array");
        for (const json& pair : *coeffs) {
            if (!pair.is_array() || pair.size() != 2)
                fail(label, prefix + "coefficients entries must be [re, im] pairs");
            try {
                data.coefficients.emplace_back(pair[0].get<double>(), pair[1].get<double>());
            } catch (const json::exception&) {
                fail(label, prefix + "coefficients entries must be numeric");
            }
        }
    }
    return data;
}

ExperimentConfig materialize(const json& doc, const std::string& label) {
    if (!doc.is_object()) fail(label, "config root must be a JSON object");
    check_keys(doc, "",
               {"name", "grid", "equation", "integrator", "i_operator", "diagnostics", "seed",
                "output_dir", "sweep", "probe"},
               label);

    ExperimentConfig cfg;
    cfg.name = get_or<std::string>(doc, "", "name", cfg.name, label);
    cfg.seed = get_or<std::uint64_t>(doc, "", "seed", cfg.seed, label);
    cfg.output_dir = get_or<std::string>(doc, "", "output_dir", cfg.output_dir, label);

    {
        const json& g = section(doc, "grid", label);
        check_keys(g, "grid", {"modes", "period", "dealias_fraction"}, label);
        const int modes = get_or(g, "grid.", "modes", 128, label);
        const double period = get_or(g, "grid.", "period", two_pi, label);
        const double frac = get_or(g, "grid.", "dealias_fraction", 2.0 / 3.0, label);
        try {
            cfg.grid = GridSpec(modes, period, frac);
        } catch (const std::exception& e) {
            fail(label, std::string("grid: ") + e.what());
        }
    }

    {
        const json& e = section(doc, "equation", label);
        check_keys(e, "equation", {"alpha", "sign", "form", "linearized", "initial_data"},
                   label);
        cfg.equation.alpha = get_or(e, "equation.", "alpha", 3.0, label);
        cfg.equation.sign =
            sign_from(get_or<std::string>(e, "equation.", "sign", "defocusing", label), label);
        cfg.equation.form = form_from(
            get_or<std::string>(e, "equation.", "form", "renormalized", label), label);
        cfg.equation.linearized = get_or(e, "equation.", "linearized", false, label);
        const json* data = child(e, "initial_data");
        cfg.equation.initial_data =
            data ? read_initial_data(*data, cfg.seed, label)
                 : [&] {
                       InitialDataSpec d;
                       d.seed = cfg.seed;
                       return d;
                   }();
    }

    {
        const json& i = section(doc, "integrator", label);
        check_keys(i, "integrator", {"scheme", "dt", "t_end", "store_every"}, label);
        cfg.integrator.scheme = scheme_from(
            get_or<std::string>(i, "integrator.", "scheme", "rk4_interaction", label), label);
        cfg.integrator.dt = get_or(i, "integrator.", "dt", cfg.integrator.dt, label);
        cfg.integrator.t_end = get_or(i, "integrator.", "t_end", cfg.integrator.t_end, label);
        cfg.integrator.store_every =
            get_or(i, "integrator.", "store_every", cfg.integrator.store_every, label);
    }

    if (const json* i = child(doc, "i_operator")) {
        if (!i->is_object()) fail(label, "i_operator must be an object");
        check_keys(*i, "i_operator", {"s", "N", "M"}, label);
        IOperatorSpec iop{get_or(*i, "i_operator.", "s", -0.5, label),
                          get_or(*i, "i_operator.", "N", 16.0, label), std::nullopt};
        if (child(*i, "M")) iop.M = get_or(*i, "i_operator.", "M", 1.0, label);
        cfg.i_operator = iop;
    }

    if (const json* d = child(doc, "diagnostics")) {
        if (!d->is_array()) fail(label, "diagnostics must be an array of ids");
        cfg.diagnostics.clear();
        for (const json& id : *d) {
            if (!id.is_string()) fail(label, "diagnostics entries must be strings");
            cfg.diagnostics.push_back(id.get<std::string>());
        }
    }

    {
        const json& s = section(doc, "sweep", label);
        check_keys(s, "sweep", {"variant", "thresholds", "s", "slack"}, label);
        cfg.sweep.variant = variant_from(
            get_or<std::string>(s, "sweep.", "variant", "torus", label), label);
        cfg.sweep.thresholds =
            get_or(s, "sweep.", "thresholds", cfg.sweep.thresholds, label);
        cfg.sweep.s = get_or(s, "sweep.", "s", cfg.sweep.s, label);
        cfg.sweep.slack = get_or(s, "sweep.", "slack", cfg.sweep.slack, label);
    }

    {
        const json& p = section(doc, "probe", label);
        check_keys(p, "probe", {"kind", "b", "s", "ensemble"}, label);
        cfg.probe.kind = get_or<std::string>(p, "probe.", "kind", cfg.probe.kind, label);
        cfg.probe.b = get_or(p, "probe.", "b", cfg.probe.b, label);
        cfg.probe.s = get_or(p, "probe.", "s", cfg.probe.s, label);
        const json& e = section(p, "ensemble", label);
        check_keys(e, "probe.ensemble",
                   {"size", "t_end", "time_samples", "amplitude", "gamma", "taper_fraction",
                    "taper_kind", "seed"},
                   label);
        EnsembleSpec& ens = cfg.probe.ensemble;
        ens.grid = cfg.grid;
        ens.size = get_or(e, "probe.ensemble.", "size", ens.size, label);
        ens.t_end = get_or(e, "probe.ensemble.", "t_end", ens.t_end, label);
        ens.time_samples =
            get_or(e, "probe.ensemble.", "time_samples", ens.time_samples, label);
        ens.amplitude = get_or(e, "probe.ensemble.", "amplitude", ens.amplitude, label);
        ens.gamma = get_or(e, "probe.ensemble.", "gamma", ens.gamma, label);
        ens.window.fraction =
            get_or(e, "probe.ensemble.", "taper_fraction", ens.window.fraction, label);
        ens.window.kind = taper_from(
            get_or<std::string>(e, "probe.ensemble.", "taper_kind", "cosine", label), label);
        ens.seed = get_or(e, "probe.ensemble.", "seed", cfg.seed, label);
    }

    // The gauged form freezes the initial spectrum as its reference data.
    if (cfg.equation.form == EquationForm::gauged)
        cfg.equation.reference_data = make_initial_data(cfg.grid, cfg.equation.initial_data);

    return cfg;
}

json parse_document(const std::string& text, const std::string& label) {
    try {
        return json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        fail(label + ":" + std::to_string(line_of_offset(text, e.byte)),
             "config parse error: " + std::string(e.what()));
    }
}

void apply_override(json& doc, const std::string& setting, const std::string& label) {
    const std::size_t eq = setting.find('=');
    if (eq == std::string::npos || eq == 0)
        fail(label, "--set expects key.path=value, got '" + setting + "'");
    const std::string path = setting.substr(0, eq);
    const std::string value = setting.substr(eq + 1);

    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = path.find('.', start);
        const std::string key = path.substr(start, dot - start);
        if (key.empty()) fail(label, "--set path has an empty segment: '" + path + "'");
        if (!node->is_object()) fail(label, "--set path '" + path + "' descends into a scalar");
        if (dot == std::string::npos) {
            json parsed;
            try {
                parsed = json::parse(value);
            } catch (const json::parse_error&) {
                parsed = value; // bare words are strings
            }
            (*node)[key] = parsed;
            return;
        }
        node = &(*node)[key];
        if (node->is_null()) *node = json::object();
        start = dot + 1;
    }
}

} // namespace

void ExperimentConfig::validate() const {
    if (name.empty() || name.find('/') != std::string::npos)
        throw ConfigError(source_path + ": name must be nonempty and slash-free");
    if (output_dir.empty()) throw ConfigError(source_path + ": output_dir must be nonempty");
    try {
        integrator.validate();
        equation.validate(grid);
        if (i_operator) i_operator->validate();
    } catch (const std::exception& e) {
        throw ConfigError(source_path + ": " + e.what());
    }

    static const std::vector<std::string> known_diagnostics = {
        "mass", "h_s_norm", "modified_mass", "corrected_mass", "lambda4_residual_imag"};
    for (const std::string& id : diagnostics) {
        if (std::find(known_diagnostics.begin(), known_diagnostics.end(), id) ==
            known_diagnostics.end())
            throw ConfigError(source_path + ": unknown diagnostic id '" + id + "'");
        const bool needs_iop =
            id == "modified_mass" || id == "corrected_mass" || id == "lambda4_residual_imag";
        if (needs_iop && !i_operator)
            throw ConfigError(source_path + ": diagnostic '" + id +
                              "' requires the i_operator section");
    }

    static const std::vector<std::string> known_probes = {"strichartz_l4", "strichartz_l6",
                                                          "trilinear_line", "trilinear_circle"};
    if (std::find(known_probes.begin(), known_probes.end(), probe.kind) == known_probes.end())
        throw ConfigError(source_path + ": unknown probe kind '" + probe.kind + "'");
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& label,
                                   const std::vector<std::string>& overrides) {
    json doc = parse_document(text, label);
    for (const std::string& setting : overrides) apply_override(doc, setting, label);
    ExperimentConfig cfg = materialize(doc, label);
    cfg.source_path = label;
    cfg.source_text = doc.dump(2);
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), path, overrides);
}

} // namespace fnls
