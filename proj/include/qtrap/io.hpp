#ifndef QTRAP_IO_HPP
#define QTRAP_IO_HPP

// Config ingestion and deterministic emission. All floats print as %.16e
// (17 significant digits, lowercase scientific) so identical runs produce
// byte-identical files; CSV is comma-separated with a header row and LF
// endings; JSON keeps insertion order and carries a schema version.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qtrap/errors.hpp"
#include "qtrap/mode.hpp"
#include "qtrap/trap.hpp"

namespace qtrap::io {

using ordered_json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1.0";

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

inline std::string fmt(bool v) { return v ? "true" : "false"; }

inline void write_lines(const std::string& path, const std::vector<std::string>& lines) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("cannot open output file: " + path);
    for (const auto& line : lines)
        out << line << '\n';
    if (!out)
        throw ConfigError("failed writing output file: " + path);
}

inline std::string join_csv(const std::vector<std::string>& cells) {
    std::string row;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i)
            row += ',';
        row += cells[i];
    }
    return row;
}

// ---------------------------------------------------------------------------
// Run configuration

struct IntegrationSection {
    bool present = false;
    double t_end = 0.0; // duration, measured from trap.t0
    double tol = 1e-10;
    int samples = 200;
};

struct StateSection {
    bool present = false;
    double z0 = 1.0;
    double p0 = 0.0;
    std::optional<cplx> alpha;
};

struct GridSection {
    bool present = false;
    double span_sigmas = 8.0; // half-span on each side of the center
    int points_per_sigma = 32;
};

struct OracleSection {
    bool present = false;
    int N = 60;
    double tolerance = 1e-7;
    std::uint64_t seed = 1;
    double gamma3_perturbation = 0.0;
};

struct SweepSection {
    bool present = false;
    double a_min = -2.0, a_max = 2.0;
    double q_min = 0.0, q_max = 2.0;
    int a_steps = 21, q_steps = 21;
    double tol = 1e-10;
};

struct OutputSection {
    std::string format; // "csv" or "json"; empty = command default
    std::string path;   // empty = stdout
};

struct RunConfig {
    bool trap_present = false;
    TrapConfig trap;
    IntegrationSection integration;
    StateSection state;
    GridSection grid;
    OracleSection oracle;
    SweepSection sweep;
    OutputSection output;
};

namespace detail {

inline void reject_unknown_keys(const ordered_json& j, const char* section,
                                std::initializer_list<const char*> known) {
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : known)
            if (item.key() == k) {
                ok = true;
                break;
            }
        if (!ok)
            throw ConfigError(std::string("unknown key '") + item.key() + "' in section '" +
                              section + "'");
    }
}

inline double require_number(const ordered_json& j, const char* section, const char* key) {
    if (!j.contains(key))
        throw ConfigError(std::string("section '") + section + "' is missing '" + key + "'");
    if (!j.at(key).is_number())
        throw ConfigError(std::string("'") + section + "." + key + "' must be a number");
    return j.at(key).get<double>();
}

inline double number_or(const ordered_json& j, const char* section, const char* key,
                        double fallback) {
    if (!j.contains(key))
        return fallback;
    if (!j.at(key).is_number())
        throw ConfigError(std::string("'") + section + "." + key + "' must be a number");
    return j.at(key).get<double>();
}

inline int int_or(const ordered_json& j, const char* section, const char* key, int fallback) {
    if (!j.contains(key))
        return fallback;
    if (!j.at(key).is_number_integer())
        throw ConfigError(std::string("'") + section + "." + key + "' must be an integer");
    return j.at(key).get<int>();
}

inline cplx parse_complex(const ordered_json& j, const std::string& where) {
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    if (j.is_number())
        return {j.get<double>(), 0.0};
    throw ConfigError("'" + where + "' must be [re, im] or a real number");
}

inline TrapConfig parse_trap(const ordered_json& j) {
    reject_unknown_keys(j, "trap", {"v_dc", "v_ac", "a", "q", "omega", "t0", "axis"});
    const bool by_voltage = j.contains("v_dc") || j.contains("v_ac");
    const bool by_mathieu = j.contains("a") || j.contains("q");
    if (by_voltage && by_mathieu)
        throw ConfigError("trap section: give either (v_dc, v_ac) or (a, q), not both");
    if (!by_voltage && !by_mathieu)
        throw ConfigError("trap section: need (v_dc, v_ac) or (a, q)");

    const double omega = number_or(j, "trap", "omega", 1.0);
    const double t0 = number_or(j, "trap", "t0", 0.0);
    Axis axis = Axis::Z;
    if (j.contains("axis")) {
        const std::string s = j.at("axis").get<std::string>();
        if (s == "x" || s == "X")
            axis = Axis::X;
        else if (s == "y" || s == "Y")
            axis = Axis::Y;
        else if (s == "z" || s == "Z")
            axis = Axis::Z;
        else
            throw ConfigError("trap.axis must be one of x, y, z");
    }

    TrapConfig cfg;
    if (by_voltage) {
        cfg.v_dc = require_number(j, "trap", "v_dc");
        cfg.v_ac = require_number(j, "trap", "v_ac");
        cfg.omega = omega;
        cfg.t0 = t0;
        cfg.axis = axis;
    } else {
        cfg = trap_from_mathieu(require_number(j, "trap", "a"), require_number(j, "trap", "q"),
                                omega, t0, axis);
    }
    cfg.validate();
    return cfg;
}

} // namespace detail

inline RunConfig parse_run_config(const ordered_json& root) {
    if (!root.is_object())
        throw ConfigError("config root must be a JSON object");
    detail::reject_unknown_keys(
        root, "<root>", {"trap", "integration", "state", "grid", "oracle", "sweep", "output"});

    RunConfig cfg;
    if (root.contains("trap")) {
        cfg.trap_present = true;
        cfg.trap = detail::parse_trap(root.at("trap"));
    }
    if (root.contains("integration")) {
        const auto& j = root.at("integration");
        detail::reject_unknown_keys(j, "integration", {"t_end", "tol", "samples"});
        cfg.integration.present = true;
        cfg.integration.t_end = detail::require_number(j, "integration", "t_end");
        cfg.integration.tol = detail::number_or(j, "integration", "tol", 1e-10);
        cfg.integration.samples = detail::int_or(j, "integration", "samples", 200);
        if (cfg.integration.t_end <= 0.0)
            throw ConfigError("integration.t_end must be positive");
        if (cfg.integration.tol <= 0.0)
            throw ConfigError("integration.tol must be positive");
        if (cfg.integration.samples < 2)
            throw ConfigError("integration.samples must be at least 2");
    }
    if (root.contains("state")) {
        const auto& j = root.at("state");
        detail::reject_unknown_keys(j, "state", {"z0", "p0", "alpha"});
        cfg.state.present = true;
        cfg.state.z0 = detail::number_or(j, "state", "z0", 1.0);
        cfg.state.p0 = detail::number_or(j, "state", "p0", 0.0);
        if (j.contains("alpha"))
            cfg.state.alpha = detail::parse_complex(j.at("alpha"), "state.alpha");
    }
    if (root.contains("grid")) {
        const auto& j = root.at("grid");
        detail::reject_unknown_keys(j, "grid", {"span_sigmas", "points_per_sigma"});
        cfg.grid.present = true;
        cfg.grid.span_sigmas = detail::number_or(j, "grid", "span_sigmas", 8.0);
        cfg.grid.points_per_sigma = detail::int_or(j, "grid", "points_per_sigma", 32);
        if (cfg.grid.span_sigmas < 4.0)
            throw ConfigError("grid.span_sigmas must be at least 4");
        if (cfg.grid.points_per_sigma < 16)
            throw ConfigError("grid.points_per_sigma must be at least 16");
    }
    if (root.contains("oracle")) {
        const auto& j = root.at("oracle");
        detail::reject_unknown_keys(j, "oracle",
                                    {"N", "tolerance", "seed", "gamma3_perturbation"});
        cfg.oracle.present = true;
        cfg.oracle.N = detail::int_or(j, "oracle", "N", 60);
        cfg.oracle.tolerance = detail::number_or(j, "oracle", "tolerance", 1e-7);
        if (j.contains("seed")) {
            if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer())
                throw ConfigError("'oracle.seed' must be an integer");
            cfg.oracle.seed = j.at("seed").get<std::uint64_t>();
        }
        cfg.oracle.gamma3_perturbation =
            detail::number_or(j, "oracle", "gamma3_perturbation", 0.0);
        if (cfg.oracle.N < 4)
            throw ConfigError("oracle.N must be at least 4");
        if (cfg.oracle.tolerance <= 0.0)
            throw ConfigError("oracle.tolerance must be positive");
    }
    if (root.contains("sweep")) {
        const auto& j = root.at("sweep");
        detail::reject_unknown_keys(j, "sweep", {"a_range", "q_range", "resolution", "tol"});
        cfg.sweep.present = true;
        auto parse_range = [&](const char* key, double& lo, double& hi) {
            if (!j.contains(key))
                throw ConfigError(std::string("sweep section is missing '") + key + "'");
            const auto& r = j.at(key);
            if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number())
                throw ConfigError(std::string("'sweep.") + key + "' must be [min, max]");
            lo = r[0].get<double>();
            hi = r[1].get<double>();
            if (!(lo <= hi))
                throw ConfigError(std::string("'sweep.") + key + "' must satisfy min <= max");
        };
        parse_range("a_range", cfg.sweep.a_min, cfg.sweep.a_max);
        parse_range("q_range", cfg.sweep.q_min, cfg.sweep.q_max);
        if (!j.contains("resolution"))
            throw ConfigError("sweep section is missing 'resolution'");
        const auto& res = j.at("resolution");
        if (res.is_number_integer()) {
            cfg.sweep.a_steps = cfg.sweep.q_steps = res.get<int>();
        } else if (res.is_array() && res.size() == 2 && res[0].is_number_integer() &&
                   res[1].is_number_integer()) {
            cfg.sweep.a_steps = res[0].get<int>();
            cfg.sweep.q_steps = res[1].get<int>();
        } else {
            throw ConfigError("'sweep.resolution' must be an integer or [a_steps, q_steps]");
        }
        if (cfg.sweep.a_steps < 2 || cfg.sweep.q_steps < 2)
            throw ConfigError("sweep resolution must be at least 2 in each direction");
        cfg.sweep.tol = detail::number_or(j, "sweep", "tol", 1e-10);
        if (cfg.sweep.tol <= 0.0)
            throw ConfigError("sweep.tol must be positive");
    }
    if (root.contains("output")) {
        const auto& j = root.at("output");
        detail::reject_unknown_keys(j, "output", {"format", "path"});
        if (j.contains("format")) {
            cfg.output.format = j.at("format").get<std::string>();
            if (cfg.output.format != "csv" && cfg.output.format != "json")
                throw ConfigError("output.format must be 'csv' or 'json'");
        }
        if (j.contains("path"))
            cfg.output.path = j.at("path").get<std::string>();
    }
    return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open config file: " + path);
    ordered_json root;
    try {
        root = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
    return parse_run_config(root);
}

// ---------------------------------------------------------------------------
// Report assembly

/// One verification entry in the shape shared by the duality and verify
/// reports.
inline ordered_json make_check_entry(const std::string& identity, ordered_json params, int N,
                                     double residual, double residual_at_N_plus_10, bool pass) {
    ordered_json e;
    e["identity"] = identity;
    e["params"] = std::move(params);
    e["N"] = N;
    e["residual"] = residual;
    e["residual_at_N_plus_10"] = residual_at_N_plus_10;
    e["pass"] = pass;
    return e;
}

inline ordered_json make_report(const std::string& command) {
    ordered_json r;
    r["schema_version"] = kSchemaVersion;
    r["command"] = command;
    return r;
}

inline void emit_json(const ordered_json& report, const std::string& path) {
    const std::string text = report.dump(2) + "\n";
    if (path.empty()) {
        std::fputs(text.c_str(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("cannot open output file: " + path);
    out << text;
    if (!out)
        throw ConfigError("failed writing output file: " + path);
}

} // namespace qtrap::io

#endif
