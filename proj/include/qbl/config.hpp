// config.hpp — run configuration: nested key = value tables, defaults matching
// the reference scenario, strict parsing with line context

#pragma once

#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "qbl/evolve.hpp"
#include "qbl/io.hpp"

namespace qbl {

struct ProtocolConfig {
    double region1_duration = 0.5;     // internal units
    double region2_cap = 50.0;         // cap while waiting for the steady state
    double region2_residual_rel = 1e-10;  // x ||H||_F
    double region3_cap = 500.0;
    double region3_n_threshold = 1e-4;
    double sample_interval = 0.05;
    double rtol = 1e-8;
    double atol = 1e-10;
};

struct OutputConfig {
    std::string directory = "qbl_out";
    bool emit_plot_script = true;
};

struct RunConfig {
    ModelParams model;              // eps, hopping, chi, gamma_sink, probe_kind
    std::string probe_matrix_path;  // required when probe_kind = custom
    BathSpec bath1;
    BathSpec bath4;
    BathSpec probe_bath;  // lambda defaults to 10
    int sink_site = 4;
    ProtocolConfig protocol;
    OutputConfig output;
    GeneratorOptions toggles;

    RunConfig() { probe_bath.lambda = 10.0; }

    SystemSetup setup() const {
        SystemSetup s;
        s.model = model;
        if (model.probe_kind == ProbeKind::custom) {
            require(!probe_matrix_path.empty(),
                    "system.probe_matrix is required for probe_kind = custom");
            s.model.custom_probe = read_hermitian_matrix(probe_matrix_path, full_dim);
        }
        s.bath1 = bath1;
        s.bath4 = bath4;
        s.probe_bath = probe_bath;
        s.toggles = toggles;
        return s;
    }

    RegionSchedule schedule() const {
        RegionSchedule s;
        s.sample_interval = protocol.sample_interval;
        s.integ.rtol = protocol.rtol;
        s.integ.atol = protocol.atol;
        s.regions.push_back({"I", 0.0, false, RegionSpec::Stop::fixed_duration,
                             protocol.region1_duration, protocol.region2_residual_rel,
                             protocol.region3_n_threshold});
        s.regions.push_back({"II", model.chi, false, RegionSpec::Stop::residual,
                             protocol.region2_cap, protocol.region2_residual_rel,
                             protocol.region3_n_threshold});
        s.regions.push_back({"III", model.chi, true, RegionSpec::Stop::n_threshold,
                             protocol.region3_cap, protocol.region2_residual_rel,
                             protocol.region3_n_threshold});
        return s;
    }

    void validate() const {
        try {
            model.validate();
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error(std::string("system: ") + e.what());
        }
        const auto check_bath = [](const BathSpec& b, const std::string& name) {
            try {
                b.validate();
            } catch (const std::exception& e) {
                throw std::runtime_error(name + ": " + e.what());
            }
        };
        check_bath(bath1, "bath1");
        check_bath(bath4, "bath4");
        check_bath(probe_bath, "probe");
        require(sink_site >= 1 && sink_site <= n_sites, "sink.site must be in 1..6");
        require(protocol.region1_duration > 0.0, "protocol.region1_duration must be > 0");
        require(protocol.region2_cap > 0.0, "protocol.region2_cap must be > 0");
        require(protocol.region3_cap > 0.0, "protocol.region3_cap must be > 0");
        require(protocol.region2_residual_rel > 0.0,
                "protocol.region2_residual_rel must be > 0");
        require(protocol.region3_n_threshold > 0.0,
                "protocol.region3_n_threshold must be > 0");
        require(protocol.sample_interval > 0.0, "protocol.sample_interval must be > 0");
        require(protocol.rtol > 0.0 && protocol.atol > 0.0,
                "protocol.rtol and protocol.atol must be > 0");
        require(toggles.secular_tol > 0.0, "toggles.secular_tol must be > 0");
    }
};

namespace detail {

struct ConfigValue {
    std::string raw;
    int line = 0;
};

struct ConfigTable {
    std::map<std::string, ConfigValue> values;  // "section.key" -> raw text
};

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline ConfigTable tokenize_config(std::istream& in, const std::string& name) {
    ConfigTable table;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = name + ":" + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error(where + ": malformed table header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw std::runtime_error(where + ": empty table name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(where + ": expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw std::runtime_error(where + ": missing key");
        if (val.empty()) throw std::runtime_error(where + ": missing value for '" + key + "'");
        const std::string full = section.empty() ? key : section + "." + key;
        if (table.values.count(full))
            throw std::runtime_error(where + ": duplicate key '" + full + "'");
        table.values[full] = {val, lineno};
    }
    return table;
}

class ConfigReader {
  public:
    ConfigReader(ConfigTable table, std::string name)
        : table_(std::move(table)), name_(std::move(name)) {}

    double number(const std::string& key, double fallback) {
        const ConfigValue* v = take(key);
        if (!v) return fallback;
        try {
            std::size_t used = 0;
            const double x = std::stod(v->raw, &used);
            if (used != v->raw.size()) throw std::invalid_argument("trail");
            return x;
        } catch (const std::logic_error&) {
            throw std::runtime_error(where(key, v) + ": '" + v->raw + "' is not a number");
        }
    }

    int integer(const std::string& key, int fallback) {
        const double x = number(key, fallback);
        if (x != std::floor(x))
            throw std::runtime_error(name_ + ": " + key + " must be an integer");
        return static_cast<int>(x);
    }

    bool boolean(const std::string& key, bool fallback) {
        const ConfigValue* v = take(key);
        if (!v) return fallback;
        if (v->raw == "true") return true;
        if (v->raw == "false") return false;
        throw std::runtime_error(where(key, v) + ": expected true or false, got '" + v->raw +
                                 "'");
    }

    std::string text(const std::string& key, const std::string& fallback) {
        const ConfigValue* v = take(key);
        if (!v) return fallback;
        std::string s = v->raw;
        if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
            s = s.substr(1, s.size() - 2);
        return s;
    }

    std::array<double, 6> array6(const std::string& key, std::array<double, 6> fallback) {
        const ConfigValue* v = take(key);
        if (!v) return fallback;
        std::string s = v->raw;
        if (s.size() < 2 || s.front() != '[' || s.back() != ']')
            throw std::runtime_error(where(key, v) + ": expected [a, b, c, d, e, f]");
        s = s.substr(1, s.size() - 2);
        std::array<double, 6> out{};
        std::istringstream ss(s);
        std::string cell;
        int count = 0;
        while (std::getline(ss, cell, ',')) {
            cell = trim(cell);
            if (count >= 6) ++count;  // overflow detected below
            else {
                try {
                    std::size_t used = 0;
                    out[count] = std::stod(cell, &used);
                    if (used != cell.size()) throw std::invalid_argument("trail");
                } catch (const std::logic_error&) {
                    throw std::runtime_error(where(key, v) + ": '" + cell +
                                             "' is not a number");
                }
                ++count;
            }
        }
        if (count != 6)
            throw std::runtime_error(where(key, v) + ": expected exactly 6 entries, got " +
                                     std::to_string(count));
        return out;
    }

    void finish() const {
        for (const auto& [key, val] : table_.values)
            if (!used_.count(key))
                throw std::runtime_error(name_ + ":" + std::to_string(val.line) +
                                         ": unknown key '" + key + "'");
    }

  private:
    const ConfigValue* take(const std::string& key) {
        used_.insert(key);
        const auto it = table_.values.find(key);
        return it == table_.values.end() ? nullptr : &it->second;
    }

    std::string where(const std::string& key, const ConfigValue* v) const {
        return name_ + ":" + std::to_string(v->line) + ": " + key;
    }

    ConfigTable table_;
    std::string name_;
    std::set<std::string> used_;
};

inline void read_bath(ConfigReader& r, const std::string& section, BathSpec& b) {
    b.lambda = r.number(section + ".lambda", b.lambda);
    b.cutoff = r.number(section + ".cutoff", b.cutoff);
    b.temperature = r.number(section + ".temperature", b.temperature);
    b.matsubara_terms = r.integer(section + ".matsubara_terms", b.matsubara_terms);
    b.tail_tol = r.number(section + ".tail_tol", b.tail_tol);
    const std::string tail = r.text(section + ".tail", "analytic");
    if (tail == "analytic") b.tail = TailMode::analytic;
    else if (tail == "truncated") b.tail = TailMode::truncated;
    else
        throw std::runtime_error(section + ".tail must be 'analytic' or 'truncated', got '" +
                                 tail + "'");
}

}  // namespace detail

inline RunConfig parse_config_text(const std::string& text, const std::string& name) {
    std::istringstream in(text);
    detail::ConfigReader r(detail::tokenize_config(in, name), name);
    RunConfig cfg;
    cfg.model.eps = r.array6("system.eps", cfg.model.eps);
    cfg.model.hopping = r.number("system.hopping", cfg.model.hopping);
    cfg.model.chi = r.number("system.chi", cfg.model.chi);
    const std::string kind = r.text("system.probe_kind", "number_conserving");
    if (kind == "number_conserving") cfg.model.probe_kind = ProbeKind::number_conserving;
    else if (kind == "dephasing") cfg.model.probe_kind = ProbeKind::dephasing;
    else if (kind == "custom") cfg.model.probe_kind = ProbeKind::custom;
    else
        throw std::runtime_error(
            name + ": system.probe_kind must be number_conserving, dephasing or custom");
    cfg.probe_matrix_path = r.text("system.probe_matrix", "");
    detail::read_bath(r, "bath1", cfg.bath1);
    detail::read_bath(r, "bath4", cfg.bath4);
    detail::read_bath(r, "probe", cfg.probe_bath);
    cfg.model.gamma_sink = r.number("sink.gamma", cfg.model.gamma_sink);
    cfg.sink_site = r.integer("sink.site", cfg.sink_site);
    auto& p = cfg.protocol;
    p.region1_duration = r.number("protocol.region1_duration", p.region1_duration);
    p.region2_cap = r.number("protocol.region2_cap", p.region2_cap);
    p.region2_residual_rel = r.number("protocol.region2_residual_rel", p.region2_residual_rel);
    p.region3_cap = r.number("protocol.region3_cap", p.region3_cap);
    p.region3_n_threshold = r.number("protocol.region3_n_threshold", p.region3_n_threshold);
    p.sample_interval = r.number("protocol.sample_interval", p.sample_interval);
    p.rtol = r.number("protocol.rtol", p.rtol);
    p.atol = r.number("protocol.atol", p.atol);
    cfg.output.directory = r.text("output.directory", cfg.output.directory);
    cfg.output.emit_plot_script = r.boolean("output.emit_plot_script", true);
    cfg.toggles.include_lamb_shift = r.boolean("toggles.include_lamb_shift", true);
    cfg.toggles.secular = r.boolean("toggles.secular", false);
    cfg.toggles.secular_tol = r.number("toggles.secular_tol", cfg.toggles.secular_tol);
    r.finish();
    cfg.validate();
    return cfg;
}

inline RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str(), path);
}

inline std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream out;
    const auto g = [](double x) { return format_g12(x); };
    out << "[system]\n";
    out << "eps = [" << g(cfg.model.eps[0]);
    for (int i = 1; i < 6; ++i) out << ", " << g(cfg.model.eps[i]);
    out << "]\n";
    out << "hopping = " << g(cfg.model.hopping) << "\n";
    out << "chi = " << g(cfg.model.chi) << "\n";
    const char* kind = cfg.model.probe_kind == ProbeKind::number_conserving
                           ? "number_conserving"
                           : cfg.model.probe_kind == ProbeKind::dephasing ? "dephasing"
                                                                          : "custom";
    out << "probe_kind = \"" << kind << "\"\n";
    if (!cfg.probe_matrix_path.empty())
        out << "probe_matrix = \"" << cfg.probe_matrix_path << "\"\n";
    const auto bath = [&](const char* name, const BathSpec& b) {
        out << "\n[" << name << "]\n";
        out << "lambda = " << g(b.lambda) << "\n";
        out << "cutoff = " << g(b.cutoff) << "\n";
        out << "temperature = " << g(b.temperature) << "\n";
        out << "matsubara_terms = " << b.matsubara_terms << "\n";
        out << "tail_tol = " << g(b.tail_tol) << "\n";
        out << "tail = \"" << (b.tail == TailMode::analytic ? "analytic" : "truncated")
            << "\"\n";
    };
    bath("bath1", cfg.bath1);
    bath("bath4", cfg.bath4);
    bath("probe", cfg.probe_bath);
    out << "\n[sink]\n";
    out << "gamma = " << g(cfg.model.gamma_sink) << "\n";
    out << "site = " << cfg.sink_site << "\n";
    out << "\n[protocol]\n";
    out << "region1_duration = " << g(cfg.protocol.region1_duration) << "\n";
    out << "region2_cap = " << g(cfg.protocol.region2_cap) << "\n";
    out << "region2_residual_rel = " << g(cfg.protocol.region2_residual_rel) << "\n";
    out << "region3_cap = " << g(cfg.protocol.region3_cap) << "\n";
    out << "region3_n_threshold = " << g(cfg.protocol.region3_n_threshold) << "\n";
    out << "sample_interval = " << g(cfg.protocol.sample_interval) << "\n";
    out << "rtol = " << g(cfg.protocol.rtol) << "\n";
    out << "atol = " << g(cfg.protocol.atol) << "\n";
    out << "\n[output]\n";
    out << "directory = \"" << cfg.output.directory << "\"\n";
    out << "emit_plot_script = " << (cfg.output.emit_plot_script ? "true" : "false") << "\n";
    out << "\n[toggles]\n";
    out << "include_lamb_shift = " << (cfg.toggles.include_lamb_shift ? "true" : "false")
        << "\n";
    out << "secular = " << (cfg.toggles.secular ? "true" : "false") << "\n";
    out << "secular_tol = " << g(cfg.toggles.secular_tol) << "\n";
    return out.str();
}

// output directory precedence: --out flag, then QBL_OUT, then the config value
inline std::string resolve_output_dir(const std::string& cli_out, const RunConfig& cfg) {
    if (!cli_out.empty()) return cli_out;
    if (const char* env = std::getenv("QBL_OUT"); env && *env) return env;
    return cfg.output.directory;
}

}  // namespace qbl
