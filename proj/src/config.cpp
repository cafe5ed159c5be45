#include "dqd/config.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include "dqd/csv.hpp"

namespace dqd {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

using KeyValues = std::map<std::string, std::string>;

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "hamiltonian.epsilon", "hamiltonian.h_tunnel", "hamiltonian.hbar",
        "detector.i1",         "detector.i2",          "detector.s_i",
        "detector.e",          "detector.transparency", "detector.gamma_d_extra",
        "initial.s11",         "initial.s12_re",       "initial.s12_im",
        "grid.dt",             "grid.t_final",         "grid.window",
        "grid.seed",           "run.mode",             "run.output",
        "run.record_model",
    };
    return keys;
}

KeyValues tokenize(const std::string& text) {
    KeyValues kv;
    std::istringstream is(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = section + "." + trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!known_keys().contains(key)) throw ConfigError("unknown key '" + key + "'");
        if (value.empty()) throw ConfigError("empty value for key '" + key + "'");
        if (kv.contains(key)) throw ConfigError("duplicate key '" + key + "'");
        kv[key] = value;
    }
    return kv;
}

double to_double(const std::string& key, const std::string& value) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw ConfigError("key '" + key + "': cannot parse number '" + value + "'");
    return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw ConfigError("key '" + key + "': cannot parse unsigned integer '" + value + "'");
    return v;
}

double required(const KeyValues& kv, const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw ConfigError("missing required key '" + key + "'");
    return to_double(key, it->second);
}

double optional_or(const KeyValues& kv, const std::string& key, double fallback) {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : to_double(key, it->second);
}

void parse_mode(const std::string& value, RunConfig& cfg) {
    const auto colon = value.find(':');
    const std::string head = value.substr(0, colon);
    const std::string arg = colon == std::string::npos ? std::string{} : trim(value.substr(colon + 1));
    if (head == "trajectory") {
        cfg.mode = RunMode::kTrajectory;
    } else if (head == "master") {
        cfg.mode = RunMode::kMaster;
    } else if (head == "steer") {
        cfg.mode = RunMode::kSteer;
    } else if (head == "ensemble") {
        cfg.mode = RunMode::kEnsemble;
        if (arg.empty()) throw ConfigError("key 'run.mode': ensemble needs a size, e.g. ensemble:1000");
        cfg.ensemble_size = static_cast<std::size_t>(to_u64("run.mode", arg));
        if (cfg.ensemble_size == 0) throw ConfigError("key 'run.mode': ensemble size must be >= 1");
        return;
    } else if (head == "reconstruct") {
        cfg.mode = RunMode::kReconstruct;
        if (arg.empty()) throw ConfigError("key 'run.mode': reconstruct needs a record file");
        cfg.record_file = arg;
        return;
    } else {
        throw ConfigError("key 'run.mode': unknown mode '" + value + "'");
    }
    if (!arg.empty()) throw ConfigError("key 'run.mode': mode '" + head + "' takes no argument");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    const KeyValues kv = tokenize(text);
    RunConfig cfg;

    cfg.hamiltonian.epsilon = required(kv, "hamiltonian.epsilon");
    cfg.hamiltonian.h_tunnel = required(kv, "hamiltonian.h_tunnel");
    cfg.hamiltonian.hbar = optional_or(kv, "hamiltonian.hbar", 1.0);

    cfg.detector.i1 = required(kv, "detector.i1");
    cfg.detector.i2 = required(kv, "detector.i2");
    cfg.detector.e_charge = optional_or(kv, "detector.e", 1.0);
    cfg.detector.gamma_d_extra = optional_or(kv, "detector.gamma_d_extra", 0.0);
    const bool has_s_i = kv.contains("detector.s_i");
    const bool has_t = kv.contains("detector.transparency");
    if (has_s_i && has_t) throw ConfigError("keys 'detector.s_i' and 'detector.transparency' are exclusive");
    if (has_s_i) {
        cfg.detector.s_i = required(kv, "detector.s_i");
    } else if (has_t) {
        cfg.transparency = required(kv, "detector.transparency");
        try {
            cfg.detector.s_i = schottky_s_i(cfg.detector.i0(), cfg.detector.e_charge, *cfg.transparency);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("key 'detector.transparency': ") + e.what());
        }
    } else {
        throw ConfigError("missing required key 'detector.s_i' (or 'detector.transparency')");
    }

    cfg.initial.s11 = required(kv, "initial.s11");
    cfg.initial.s12 = {optional_or(kv, "initial.s12_re", 0.0), optional_or(kv, "initial.s12_im", 0.0)};

    cfg.grid.dt = required(kv, "grid.dt");
    cfg.grid.t_final = required(kv, "grid.t_final");
    cfg.grid.window = optional_or(kv, "grid.window", cfg.grid.dt);
    cfg.grid.seed = kv.contains("grid.seed") ? to_u64("grid.seed", kv.at("grid.seed")) : 0;

    const auto mode = kv.find("run.mode");
    if (mode == kv.end()) throw ConfigError("missing required key 'run.mode'");
    parse_mode(mode->second, cfg);
    if (kv.contains("run.output")) cfg.output_dir = kv.at("run.output");
    if (kv.contains("run.record_model")) {
        const std::string& m = kv.at("run.record_model");
        if (m == "langevin") cfg.record_model = RecordModel::kLangevin;
        else if (m == "bayes_mixture") cfg.record_model = RecordModel::kBayesMixture;
        else throw ConfigError("key 'run.record_model': unknown model '" + m + "'");
    }

    try {
        cfg.hamiltonian.validate();
        cfg.detector.validate();
        cfg.grid.validate();
        ConditionedState::make(cfg.initial.s11, cfg.initial.s12, 1e-12);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::string text;
    try {
        text = csv::read_file(path);
    } catch (const std::runtime_error& e) {
        throw ConfigError(e.what());
    }
    return parse_config(text);
}

std::string mode_to_string(const RunConfig& config) {
    switch (config.mode) {
        case RunMode::kTrajectory: return "trajectory";
        case RunMode::kEnsemble: return "ensemble:" + std::to_string(config.ensemble_size);
        case RunMode::kMaster: return "master";
        case RunMode::kReconstruct: return "reconstruct:" + config.record_file;
        case RunMode::kSteer: return "steer";
    }
    return "trajectory";
}

std::string to_config_text(const RunConfig& c) {
    using csv::format_number;
    std::ostringstream os;
    os << "[hamiltonian]\n"
       << "epsilon = " << format_number(c.hamiltonian.epsilon) << '\n'
       << "h_tunnel = " << format_number(c.hamiltonian.h_tunnel) << '\n'
       << "hbar = " << format_number(c.hamiltonian.hbar) << '\n'
       << "\n[detector]\n"
       << "i1 = " << format_number(c.detector.i1) << '\n'
       << "i2 = " << format_number(c.detector.i2) << '\n';
    if (c.transparency) os << "transparency = " << format_number(*c.transparency) << '\n';
    else os << "s_i = " << format_number(c.detector.s_i) << '\n';
    os << "e = " << format_number(c.detector.e_charge) << '\n'
       << "gamma_d_extra = " << format_number(c.detector.gamma_d_extra) << '\n'
       << "\n[initial]\n"
       << "s11 = " << format_number(c.initial.s11) << '\n'
       << "s12_re = " << format_number(c.initial.s12.real()) << '\n'
       << "s12_im = " << format_number(c.initial.s12.imag()) << '\n'
       << "\n[grid]\n"
       << "dt = " << format_number(c.grid.dt) << '\n'
       << "t_final = " << format_number(c.grid.t_final) << '\n'
       << "window = " << format_number(c.grid.window) << '\n'
       << "seed = " << c.grid.seed << '\n'
       << "\n[run]\n"
       << "mode = " << mode_to_string(c) << '\n'
       << "output = " << c.output_dir << '\n'
       << "record_model = " << (c.record_model == RecordModel::kLangevin ? "langevin" : "bayes_mixture") << '\n';
    return os.str();
}

namespace {

// Currents 10 and 11 (|ΔI|/I0 ≈ 0.095); e is chosen so that S_I = 2 e I0.
DetectorModel preset_detector(double s_i) {
    DetectorModel det;
    det.i1 = 10.0;
    det.i2 = 11.0;
    det.s_i = s_i;
    det.e_charge = s_i / (2.0 * det.i0());
    return det;
}

RunConfig fig1_base() {
    RunConfig c;
    c.hamiltonian = {0.0, 0.0, 1.0};
    c.detector = preset_detector(1.0);  // τ_loc = 2
    c.initial = {0.5, {0.0, 0.0}};
    c.grid = {0.01, 20.0, 0.05, 1};
    c.mode = RunMode::kTrajectory;
    c.output_dir = "out";
    return c;
}

}  // namespace

RunConfig zeno_scenario(double coupling) {
    RunConfig c;
    c.hamiltonian = {1.0, 1.0, 1.0};
    // 𝒞 = ħ (ΔI)² / (S_I H) with ΔI = H = ħ = 1.
    c.detector = preset_detector(1.0 / coupling);
    c.initial = {1.0, {0.0, 0.0}};
    c.grid = {0.001, 20.0, 0.01, 1};
    c.mode = RunMode::kTrajectory;
    c.output_dir = "out";
    return c;
}

RunConfig scenario(const std::string& name) {
    if (name == "fig1") return fig1_base();
    if (name == "fig2a") return zeno_scenario(0.3);
    if (name == "fig2b") return zeno_scenario(3.0);
    if (name == "fig2c") return zeno_scenario(30.0);
    if (name == "purify") {
        RunConfig c = fig1_base();
        c.grid.window = 0.5;
        c.mode = RunMode::kEnsemble;
        c.ensemble_size = 1000;
        return c;
    }
    if (name == "steer-demo") {
        RunConfig c = fig1_base();
        c.initial = ConditionedState::pure_symmetric();
        c.grid.t_final = c.detector.tau_loc();
        c.mode = RunMode::kSteer;
        return c;
    }
    throw ConfigError("unknown scenario '" + name + "'");
}

std::vector<std::string> scenario_names() {
    return {"fig1", "fig2a", "fig2b", "fig2c", "purify", "steer-demo"};
}

}  // namespace dqd
