#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pfc/errors.hpp"
#include "pfc/ic.hpp"

namespace pfc {

enum class ExperimentKind { converge, energy_study, random2d, crystal_growth, pattern, random3d };

inline ExperimentKind experiment_kind_from_string(const std::string& s) {
    if (s == "converge") return ExperimentKind::converge;
    if (s == "energy_study") return ExperimentKind::energy_study;
    if (s == "random2d") return ExperimentKind::random2d;
    if (s == "crystal_growth") return ExperimentKind::crystal_growth;
    if (s == "pattern") return ExperimentKind::pattern;
    if (s == "random3d") return ExperimentKind::random3d;
    throw config_error("unknown experiment kind '" + s + "'");
}

inline std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::converge: return "converge";
        case ExperimentKind::energy_study: return "energy_study";
        case ExperimentKind::random2d: return "random2d";
        case ExperimentKind::crystal_growth: return "crystal_growth";
        case ExperimentKind::pattern: return "pattern";
        case ExperimentKind::random3d: return "random3d";
    }
    return "?";
}

struct StabilizerCombo {
    double alpha = 0.0, beta = 1.0, tau = 0.1;
};

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::random2d;
    std::uint64_t seed = 12345;
    // random2d / random3d
    double base = 0.06, amp = 0.01;
    // crystal growth
    double phibar = 0.285, capc = 0.446, lattice_p = 0.66;
    std::vector<CrystalPatch> patches;
    // pattern
    double psi0 = 0.1, hex_radius = 16.0;
    // converge
    std::vector<double> tau_list;
    // energy sweep
    std::vector<StabilizerCombo> combos;
};

struct RunConfig {
    std::vector<int> dims;
    std::vector<double> lengths;

    double epsilon = 0.025;
    double a = 0.001;
    double alpha = 0.0;
    double beta = 1.0;
    double r = 0.0;
    std::optional<double> m0; // nullopt = "auto" (resolved from the initial field)

    double tau = 0.0;
    double t_final = 0.0;

    std::string tableau_path;
    ExperimentSpec experiment;

    std::string output_dir = "out";
    long snapshot_every = 0;
    long diagnostics_every = 1;

    bool strict = false;
    bool dealias = false;
    int threads = 1;
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                                const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        bool ok = false;
        for (const char* k : allowed)
            if (key == k) ok = true;
        if (!ok) throw config_error(where + ": unknown key '" + key + "'");
    }
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("bad value for '") + key + "': " + e.what());
    }
}

inline void require_finite(double v, const std::string& key) {
    if (!std::isfinite(v)) throw config_error("'" + key + "' must be finite");
}

} // namespace detail

inline ExperimentSpec parse_experiment(const nlohmann::json& j) {
    detail::reject_unknown_keys(j,
                                {"kind", "seed", "base", "amp", "phibar", "C", "p", "patches", "psi0",
                                 "hex_radius", "tau_list", "combos"},
                                "experiment");
    ExperimentSpec e;
    e.kind = experiment_kind_from_string(detail::get_or<std::string>(j, "kind", "random2d"));
    e.seed = detail::get_or<std::uint64_t>(j, "seed", 12345);
    e.base = detail::get_or<double>(j, "base", e.kind == ExperimentKind::random3d ? 0.285 : 0.06);
    e.amp = detail::get_or<double>(j, "amp", e.kind == ExperimentKind::random3d ? 0.1 : 0.01);
    e.phibar = detail::get_or<double>(j, "phibar", 0.285);
    e.capc = detail::get_or<double>(j, "C", 0.446);
    e.lattice_p = detail::get_or<double>(j, "p", 0.66);
    e.psi0 = detail::get_or<double>(j, "psi0", 0.1);
    e.hex_radius = detail::get_or<double>(j, "hex_radius", 16.0);
    if (j.contains("patches")) {
        for (const auto& pj : j["patches"]) {
            detail::reject_unknown_keys(pj, {"center", "size", "theta"}, "experiment.patches");
            CrystalPatch patch;
            const auto c = pj.at("center").get<std::vector<double>>();
            if (c.size() != 2) throw config_error("patch center must be [x, y]");
            patch.cx = c[0];
            patch.cy = c[1];
            patch.size = detail::get_or<double>(pj, "size", 30.0);
            patch.theta = pj.at("theta").get<double>();
            e.patches.push_back(patch);
        }
    }
    if (j.contains("tau_list")) e.tau_list = j["tau_list"].get<std::vector<double>>();
    if (j.contains("combos")) {
        for (const auto& cj : j["combos"]) {
            detail::reject_unknown_keys(cj, {"alpha", "beta", "tau"}, "experiment.combos");
            StabilizerCombo combo;
            combo.alpha = cj.at("alpha").get<double>();
            combo.beta = cj.at("beta").get<double>();
            combo.tau = cj.at("tau").get<double>();
            e.combos.push_back(combo);
        }
    }
    return e;
}

inline RunConfig parse_config_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    detail::reject_unknown_keys(j, {"grid", "model", "time", "tableau", "experiment", "output", "flags"},
                                "config");
    RunConfig cfg;

    if (!j.contains("grid")) throw config_error("config requires a 'grid' section");
    detail::reject_unknown_keys(j["grid"], {"dims", "lengths"}, "grid");
    cfg.dims = j["grid"].at("dims").get<std::vector<int>>();
    cfg.lengths = j["grid"].at("lengths").get<std::vector<double>>();

    if (j.contains("model")) {
        const auto& m = j["model"];
        detail::reject_unknown_keys(m, {"epsilon", "a", "alpha", "beta", "r", "m0"}, "model");
        cfg.epsilon = detail::get_or<double>(m, "epsilon", cfg.epsilon);
        cfg.a = detail::get_or<double>(m, "a", cfg.a);
        cfg.alpha = detail::get_or<double>(m, "alpha", cfg.alpha);
        cfg.beta = detail::get_or<double>(m, "beta", cfg.beta);
        cfg.r = detail::get_or<double>(m, "r", cfg.r);
        if (m.contains("m0")) {
            if (m["m0"].is_string()) {
                if (m["m0"].get<std::string>() != "auto")
                    throw config_error("'m0' must be a positive number or \"auto\"");
            } else {
                const double v = m["m0"].get<double>();
                if (!(v > 0.0)) throw config_error("'m0' must be a positive number or \"auto\"");
                cfg.m0 = v;
            }
        }
        if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) throw config_error("'epsilon' must lie in (0,1)");
        if (!(cfg.a >= 0.0)) throw config_error("'a' must be >= 0");
        if (!(cfg.r >= 0.0)) throw config_error("'r' must be >= 0");
        detail::require_finite(cfg.alpha, "alpha");
        detail::require_finite(cfg.beta, "beta");
    }

    if (!j.contains("time")) throw config_error("config requires a 'time' section");
    detail::reject_unknown_keys(j["time"], {"tau", "t_final"}, "time");
    cfg.tau = j["time"].at("tau").get<double>();
    cfg.t_final = j["time"].at("t_final").get<double>();
    if (!(cfg.tau > 0.0)) throw config_error("'tau' must be positive");
    if (!(cfg.t_final >= 0.0)) throw config_error("'t_final' must be nonnegative");

    if (!j.contains("tableau")) throw config_error("config requires a 'tableau' path");
    std::filesystem::path tp = j.at("tableau").get<std::string>();
    if (tp.is_relative()) tp = base_dir / tp;
    cfg.tableau_path = tp.lexically_normal().string();

    if (j.contains("experiment")) cfg.experiment = parse_experiment(j["experiment"]);

    if (j.contains("output")) {
        const auto& o = j["output"];
        detail::reject_unknown_keys(o, {"directory", "snapshot_every", "diagnostics_every"}, "output");
        cfg.output_dir = detail::get_or<std::string>(o, "directory", cfg.output_dir);
        cfg.snapshot_every = detail::get_or<long>(o, "snapshot_every", cfg.snapshot_every);
        cfg.diagnostics_every = detail::get_or<long>(o, "diagnostics_every", cfg.diagnostics_every);
        if (cfg.snapshot_every < 0) throw config_error("'snapshot_every' must be >= 0");
        if (cfg.diagnostics_every < 1) throw config_error("'diagnostics_every' must be >= 1");
    }

    if (j.contains("flags")) {
        const auto& f = j["flags"];
        detail::reject_unknown_keys(f, {"strict", "dealias", "threads"}, "flags");
        cfg.strict = detail::get_or<bool>(f, "strict", false);
        cfg.dealias = detail::get_or<bool>(f, "dealias", false);
        cfg.threads = detail::get_or<int>(f, "threads", 1);
        if (cfg.threads < 1) throw config_error("'threads' must be >= 1");
    }
    return cfg;
}

inline RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw config_error(path + ": " + e.what());
    }
    return parse_config_json(j, std::filesystem::path(path).parent_path());
}

inline nlohmann::json config_to_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["grid"] = {{"dims", cfg.dims}, {"lengths", cfg.lengths}};
    j["model"] = {{"epsilon", cfg.epsilon}, {"a", cfg.a},   {"alpha", cfg.alpha},
                  {"beta", cfg.beta},       {"r", cfg.r}};
    j["model"]["m0"] = cfg.m0 ? nlohmann::json(*cfg.m0) : nlohmann::json("auto");
    j["time"] = {{"tau", cfg.tau}, {"t_final", cfg.t_final}};
    j["tableau"] = cfg.tableau_path;

    nlohmann::json e;
    e["kind"] = to_string(cfg.experiment.kind);
    e["seed"] = cfg.experiment.seed;
    e["base"] = cfg.experiment.base;
    e["amp"] = cfg.experiment.amp;
    e["phibar"] = cfg.experiment.phibar;
    e["C"] = cfg.experiment.capc;
    e["p"] = cfg.experiment.lattice_p;
    e["psi0"] = cfg.experiment.psi0;
    e["hex_radius"] = cfg.experiment.hex_radius;
    if (!cfg.experiment.patches.empty()) {
        e["patches"] = nlohmann::json::array();
        for (const auto& p : cfg.experiment.patches)
            e["patches"].push_back(
                {{"center", {p.cx, p.cy}}, {"size", p.size}, {"theta", p.theta}});
    }
    if (!cfg.experiment.tau_list.empty()) e["tau_list"] = cfg.experiment.tau_list;
    if (!cfg.experiment.combos.empty()) {
        e["combos"] = nlohmann::json::array();
        for (const auto& c : cfg.experiment.combos)
            e["combos"].push_back({{"alpha", c.alpha}, {"beta", c.beta}, {"tau", c.tau}});
    }
    j["experiment"] = e;

    j["output"] = {{"directory", cfg.output_dir},
                   {"snapshot_every", cfg.snapshot_every},
                   {"diagnostics_every", cfg.diagnostics_every}};
    j["flags"] = {{"strict", cfg.strict}, {"dealias", cfg.dealias}, {"threads", cfg.threads}};
    return j;
}

/// Worker cap: config value limited by the PFC_THREADS environment variable.
inline int effective_threads(const RunConfig& cfg) {
    int cap = cfg.threads;
    if (const char* env = std::getenv("PFC_THREADS")) {
        try {
            cap = std::min(cap, std::max(1, std::stoi(env)));
        } catch (...) {
            throw config_error("PFC_THREADS must be an integer");
        }
    }
    return cap;
}

} // namespace pfc
