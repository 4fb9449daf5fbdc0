#include "chnsd/config.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace chnsd {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<double> parse_numbers(const std::string& value, const std::string& key) {
    std::vector<double> out;
    std::string piece;
    std::istringstream is(value);
    while (std::getline(is, piece, ',')) {
        piece = trim(piece);
        if (piece.empty()) continue;
        try {
            std::size_t used = 0;
            out.push_back(std::stod(piece, &used));
            if (used != piece.size()) throw std::invalid_argument(piece);
        } catch (const std::exception&) {
            throw ConfigError("key '" + key + "': cannot parse number '" + piece + "'");
        }
    }
    if (out.empty()) throw ConfigError("key '" + key + "': empty value");
    return out;
}

double parse_one(const std::string& value, const std::string& key) {
    const auto v = parse_numbers(value, key);
    if (v.size() != 1) throw ConfigError("key '" + key + "': expected one number");
    return v[0];
}

int parse_int(const std::string& value, const std::string& key) {
    const double d = parse_one(value, key);
    const int i = static_cast<int>(d);
    if (d != i) throw ConfigError("key '" + key + "': expected an integer");
    return i;
}

struct KeyTable {
    std::map<std::string, std::string> entries; // "section.key" -> value
    std::map<std::string, bool> used;

    bool has(const std::string& k) const { return entries.count(k) > 0; }
    std::string take(const std::string& k) {
        used[k] = true;
        return entries.at(k);
    }
};

} // namespace

std::string mode_name(RunMode mode) {
    switch (mode) {
    case RunMode::run: return "run";
    case RunMode::converge_space: return "converge_space";
    case RunMode::converge_time: return "converge_time";
    case RunMode::compare_schemes: return "compare_schemes";
    }
    return "run";
}

RunMode mode_from_name(const std::string& name) {
    if (name == "run") return RunMode::run;
    if (name == "converge_space") return RunMode::converge_space;
    if (name == "converge_time") return RunMode::converge_time;
    if (name == "compare_schemes") return RunMode::compare_schemes;
    throw ConfigError("unknown mode '" + name + "'");
}

Config parse_config(const std::string& text) {
    KeyTable table;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = section + "." + trim(line.substr(0, eq));
        if (table.entries.count(key)) throw ConfigError("duplicate key '" + key + "'");
        table.entries[key] = trim(line.substr(eq + 1));
    }

    Config cfg;
    auto num = [&](const char* k, double dflt) { return table.has(k) ? parse_one(table.take(k), k) : dflt; };
    auto integer = [&](const char* k, int dflt) { return table.has(k) ? parse_int(table.take(k), k) : dflt; };
    auto str = [&](const char* k, const std::string& dflt) { return table.has(k) ? table.take(k) : dflt; };

    cfg.layout.x_min = num("domain.x_min", 0.0);
    cfg.layout.x_max = num("domain.x_max", 1.0);
    cfg.layout.y_min = num("domain.y_min", 0.0);
    cfg.layout.y_max = num("domain.y_max", 2.0);
    cfg.layout.y_interface = num("domain.y_interface", 1.0);
    const std::string pos = str("domain.conduit_position", "top");
    if (pos == "top")
        cfg.layout.conduit_position = ConduitPosition::top;
    else if (pos == "bottom")
        cfg.layout.conduit_position = ConduitPosition::bottom;
    else
        throw ConfigError("domain.conduit_position must be 'top' or 'bottom'");
    cfg.nx = integer("domain.nx", 16);
    cfg.ny = integer("domain.ny", 32);
    if (cfg.nx < 1 || cfg.ny < 1) throw ConfigError("domain.nx and domain.ny must be positive");

    // densities/viscosities/mobilities accept one value (both phases/layers) or a pair
    auto pair = [&](const char* k, double d1, double d2) -> std::pair<double, double> {
        if (!table.has(k)) return {d1, d2};
        const auto v = parse_numbers(table.take(k), k);
        if (v.size() == 1) return {v[0], v[0]};
        if (v.size() == 2) return {v[0], v[1]};
        throw ConfigError(std::string("key '") + k + "': expected one or two numbers");
    };
    std::tie(cfg.model.rho1, cfg.model.rho2) = pair("model.rho", 1.0, 1.0);
    std::tie(cfg.model.nu1, cfg.model.nu2) = pair("model.nu", 1.0, 1.0);
    std::tie(cfg.model.M_c, cfg.model.M_m) = pair("model.mobility", 1.0, 1.0);
    cfg.model.gamma = num("model.gamma", 1.0);
    cfg.model.epsilon = num("model.epsilon", 0.1);
    if (table.has("model.K")) {
        const auto v = parse_numbers(table.take("model.K"), "model.K");
        if (v.size() == 1)
            cfg.model.K = v[0] * Mat2::Identity();
        else if (v.size() == 3) {
            cfg.model.K << v[0], v[1], v[1], v[2];
        } else {
            throw ConfigError("model.K expects 1 (isotropic) or 3 (kxx, kxy, kyy) numbers");
        }
    }
    cfg.model.alpha_bjs = num("model.alpha_bjs", 1.0);
    if (table.has("model.gravity")) {
        const auto v = parse_numbers(table.take("model.gravity"), "model.gravity");
        if (v.size() != 2) throw ConfigError("model.gravity expects two numbers");
        cfg.model.gravity = Vec2(v[0], v[1]);
    }

    cfg.scheme.dt = num("scheme.dt", 0.01);
    cfg.scheme.T = num("scheme.T", 1.0);
    cfg.scheme.beta = num("scheme.beta", 5.0);
    cfg.scheme.xi = num("scheme.xi", 5.0);
    cfg.scheme.zeta = num("scheme.zeta", -1.0);
    cfg.scheme.rel_tol = num("scheme.rel_tol", 1e-10);
    const std::string sch = str("scheme.scheme", "decoupled");
    if (sch == "decoupled")
        cfg.scheme.scheme = SchemeKind::decoupled;
    else if (sch == "coupled")
        cfg.scheme.scheme = SchemeKind::coupled;
    else
        throw ConfigError("scheme.scheme must be 'coupled' or 'decoupled'");
    const std::string solver = str("scheme.solver", "direct");
    if (solver == "direct")
        cfg.scheme.solver = SolveMethod::direct;
    else if (solver == "iterative")
        cfg.scheme.solver = SolveMethod::iterative;
    else
        throw ConfigError("scheme.solver must be 'direct' or 'iterative'");

    const std::string kind = str("initial.type", "uniform");
    if (kind == "uniform")
        cfg.initial.kind = InitKind::uniform;
    else if (kind == "square_bubble")
        cfg.initial.kind = InitKind::square_bubble;
    else if (kind == "circle_bubble")
        cfg.initial.kind = InitKind::circle_bubble;
    else
        throw ConfigError("initial.type must be uniform, square_bubble, or circle_bubble");
    cfg.initial.phi0 = num("initial.phi0", 1.0);
    if (table.has("initial.center")) {
        const auto v = parse_numbers(table.take("initial.center"), "initial.center");
        if (v.size() != 2) throw ConfigError("initial.center expects two numbers");
        cfg.initial.center = Vec2(v[0], v[1]);
    }
    cfg.initial.radius = num("initial.radius", 0.2);
    cfg.initial.half_width = num("initial.half_width", 0.15);

    cfg.output.directory = str("output.directory", "out");
    cfg.output.vtk_every = integer("output.vtk_every", 0);
    cfg.output.energy_csv = str("output.energy_csv", "energy.csv");
    if (cfg.output.vtk_every < 0) throw ConfigError("output.vtk_every must be nonnegative");

    cfg.mode = mode_from_name(str("run.mode", "run"));

    for (const auto& [key, value] : table.entries)
        if (!table.used.count(key)) throw ConfigError("unknown key '" + key + "'");

    cfg.layout.validate();
    cfg.model.validate();
    cfg.scheme.validate(cfg.model);
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config(os.str());
}

} // namespace chnsd
