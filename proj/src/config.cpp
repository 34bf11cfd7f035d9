#include "vortctl/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace vortctl {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw ConfigError("config: key '" + key + "' has a malformed number '" + v + "'");
    return x;
}

int parse_int(const std::string& key, const std::string& v) {
    const double x = parse_double(key, v);
    if (x != std::floor(x))
        throw ConfigError("config: key '" + key + "' must be an integer, got '" + v + "'");
    return static_cast<int>(x);
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <typename T, typename F>
std::vector<T> parse_list(const std::string& key, const std::string& v, F f) {
    std::vector<T> out;
    for (const std::string& s : split_list(v)) out.push_back(f(key, s));
    if (out.empty()) throw ConfigError("config: key '" + key + "' has an empty list");
    return out;
}

std::function<double(Vec2)> named_profile(const std::string& key, const std::string& name) {
    if (name == "zero") return [](Vec2) { return 0.0; };
    if (name == "one") return [](Vec2) { return 1.0; };
    if (name == "sin3x1") return [](Vec2 p) { return -2.0 * std::sin(3.0 * p.x) + 1.0; };
    if (name == "sin3x1sin4x2")
        return [](Vec2 p) { return -10.0 * std::sin(3.0 * p.x) * std::sin(4.0 * p.y) + 5.0; };
    throw ConfigError("config: key '" + key + "' names an unknown profile '" + name +
                      "' (known: zero, one, sin3x1, sin3x1sin4x2)");
}

}  // namespace

KeyValues parse_config_text(const std::string& text) {
    KeyValues kv;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) +
                              " is not of the form 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config: line " + std::to_string(lineno) + " has an empty key or value");
        if (kv.count(key))
            throw ConfigError("config: duplicate key '" + key + "' at line " + std::to_string(lineno));
        kv[key] = value;
    }
    return kv;
}

KeyValues load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

RunSetup run_setup_from_config(const KeyValues& kv) {
    static const std::set<std::string> known{
        "preset",        "mesh.level",     "mesh.target_h0",  "physics.nu",
        "physics.conv_scale", "time.dt",   "time.t_end",      "control.mode",
        "control.M",     "control.lambda", "output.stride",   "snapshots.times",
        "domain.v0x",    "domain.v0y",     "domain.v1x",      "domain.v1y",
        "domain.v2x",    "domain.v2y",     "actuators.support_scale",
        "sweep.M",       "sweep.lambda",   "custom.w0",       "custom.wt0",
    };
    for (const auto& [k, v] : kv)
        if (!known.count(k)) throw ConfigError("config: unknown key '" + k + "'");

    auto get = [&](const char* k) -> const std::string* {
        auto it = kv.find(k);
        return it == kv.end() ? nullptr : &it->second;
    };

    int level = 1;
    if (const auto* v = get("mesh.level")) level = parse_int("mesh.level", *v);
    if (level < 0 || level > 6) throw ConfigError("config: mesh.level out of the supported range 0..6");

    std::string preset = "example1";
    if (const auto* v = get("preset")) preset = *v;

    RunSetup setup;
    if (preset == "example1") {
        setup.sim = example1_config(level);
    } else if (preset == "example2") {
        setup.sim = example2_config(level);
    } else if (preset == "custom") {
        setup.sim = example1_config(level);
        setup.sim.preset = Preset::custom;
        setup.sim.forcing.f = [](double, Vec2) { return 0.0; };
        setup.sim.forcing.g = [](double, Vec2) { return 0.0; };
        setup.sim.forcing.w0 = named_profile("custom.w0", get("custom.w0") ? *get("custom.w0") : "sin3x1");
        setup.sim.forcing.wt0 =
            named_profile("custom.wt0", get("custom.wt0") ? *get("custom.wt0") : "zero");
    } else {
        throw ConfigError("config: unknown preset '" + preset + "'");
    }
    if (preset != "custom" && (get("custom.w0") || get("custom.wt0")))
        throw ConfigError("config: custom.* keys require preset = custom");

    SimConfig& sim = setup.sim;
    if (const auto* v = get("physics.nu")) sim.nu = parse_double("physics.nu", *v);
    if (const auto* v = get("physics.conv_scale"))
        sim.conv_scale = parse_double("physics.conv_scale", *v);
    if (const auto* v = get("time.dt")) sim.dt = parse_double("time.dt", *v);
    if (const auto* v = get("time.t_end")) sim.t_end = parse_double("time.t_end", *v);
    if (const auto* v = get("control.lambda")) sim.lambda = parse_double("control.lambda", *v);
    if (const auto* v = get("control.M")) sim.M = parse_int("control.M", *v);
    if (const auto* v = get("output.stride")) sim.stride = parse_int("output.stride", *v);
    if (const auto* v = get("mesh.target_h0")) sim.target_h0 = parse_double("mesh.target_h0", *v);
    if (const auto* v = get("actuators.support_scale"))
        sim.support_scale = parse_double("actuators.support_scale", *v);
    if (const auto* v = get("snapshots.times"))
        sim.snapshot_times = parse_list<double>("snapshots.times", *v, parse_double);
    if (const auto* v = get("control.mode")) {
        if (*v == "free")
            sim.mode = RunMode::free_run;
        else if (*v == "controlled")
            sim.mode = RunMode::controlled;
        else if (*v == "observer")
            sim.mode = RunMode::observer;
        else
            throw ConfigError("config: control.mode must be free, controlled, or observer");
    }
    TriangleDomain d = sim.domain;
    if (const auto* v = get("domain.v0x")) d.v0.x = parse_double("domain.v0x", *v);
    if (const auto* v = get("domain.v0y")) d.v0.y = parse_double("domain.v0y", *v);
    if (const auto* v = get("domain.v1x")) d.v1.x = parse_double("domain.v1x", *v);
    if (const auto* v = get("domain.v1y")) d.v1.y = parse_double("domain.v1y", *v);
    if (const auto* v = get("domain.v2x")) d.v2.x = parse_double("domain.v2x", *v);
    if (const auto* v = get("domain.v2y")) d.v2.y = parse_double("domain.v2y", *v);
    sim.domain = d;

    if (sim.stride < 1) throw ConfigError("config: output.stride must be >= 1");
    if (!(sim.dt > 0) || !(sim.t_end > 0))
        throw ConfigError("config: time.dt and time.t_end must be positive");
    if (!(sim.nu > 0)) throw ConfigError("config: physics.nu must be positive");
    if (sim.M < 1) throw ConfigError("config: control.M must be >= 1");
    if (sim.lambda < 0) throw ConfigError("config: control.lambda must be >= 0");

    if (const auto* v = get("sweep.M")) setup.sweep_M = parse_list<int>("sweep.M", *v, parse_int);
    if (const auto* v = get("sweep.lambda"))
        setup.sweep_lambda = parse_list<double>("sweep.lambda", *v, parse_double);
    return setup;
}

XiSetup xi_setup_from_config(const KeyValues& kv) {
    static const std::set<std::string> known{
        "domain.kind", "domain.L1",  "domain.L2",  "actuators.r",
        "actuators.support_scale",   "mesh.level", "mesh.target_h0",
        "xi.M_list",   "domain.v0x", "domain.v0y", "domain.v1x",
        "domain.v1y",  "domain.v2x", "domain.v2y",
    };
    for (const auto& [k, v] : kv)
        if (!known.count(k)) throw ConfigError("config: unknown key '" + k + "' for xi");

    auto get = [&](const char* k) -> const std::string* {
        auto it = kv.find(k);
        return it == kv.end() ? nullptr : &it->second;
    };
    XiSetup s;
    if (const auto* v = get("domain.kind")) {
        if (*v == "rectangle")
            s.rectangle = true;
        else if (*v == "triangle")
            s.rectangle = false;
        else
            throw ConfigError("config: domain.kind must be rectangle or triangle");
    }
    if (const auto* v = get("domain.L1")) s.L1 = parse_double("domain.L1", *v);
    if (const auto* v = get("domain.L2")) s.L2 = parse_double("domain.L2", *v);
    if (const auto* v = get("actuators.r")) s.r = parse_double("actuators.r", *v);
    if (const auto* v = get("actuators.support_scale"))
        s.support_scale = parse_double("actuators.support_scale", *v);
    if (const auto* v = get("mesh.level")) s.mesh_level = parse_int("mesh.level", *v);
    if (const auto* v = get("mesh.target_h0")) s.target_h0 = parse_double("mesh.target_h0", *v);
    if (const auto* v = get("xi.M_list")) s.m_list = parse_list<int>("xi.M_list", *v, parse_int);
    if (const auto* v = get("domain.v0x")) s.tri.v0.x = parse_double("domain.v0x", *v);
    if (const auto* v = get("domain.v0y")) s.tri.v0.y = parse_double("domain.v0y", *v);
    if (const auto* v = get("domain.v1x")) s.tri.v1.x = parse_double("domain.v1x", *v);
    if (const auto* v = get("domain.v1y")) s.tri.v1.y = parse_double("domain.v1y", *v);
    if (const auto* v = get("domain.v2x")) s.tri.v2.x = parse_double("domain.v2x", *v);
    if (const auto* v = get("domain.v2y")) s.tri.v2.y = parse_double("domain.v2y", *v);
    if (s.m_list.empty()) throw ConfigError("config: xi.M_list must not be empty");
    for (int m : s.m_list)
        if (m < 0) throw ConfigError("config: xi.M_list entries must be >= 0");
    if (s.mesh_level < 0 || s.mesh_level > 6)
        throw ConfigError("config: mesh.level out of the supported range 0..6");
    return s;
}

}  // namespace vortctl
