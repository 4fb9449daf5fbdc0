#pragma once

#include "chnsd/mesh.hpp"
#include "chnsd/physics.hpp"

#include <string>

namespace chnsd {

enum class InitKind { uniform, square_bubble, circle_bubble };

enum class RunMode { run, converge_space, converge_time, compare_schemes };

struct InitialCondition {
    InitKind kind = InitKind::uniform;
    double phi0 = 1.0;        // uniform value
    Vec2 center{0.5, 0.5};    // bubble center
    double radius = 0.2;      // circle bubble
    double half_width = 0.15; // square bubble
};

struct OutputConfig {
    std::string directory = "out";
    int vtk_every = 0; // 0: no field snapshots
    std::string energy_csv = "energy.csv";
};

struct Config {
    DomainLayout layout;
    int nx = 16, ny = 32;
    ModelParams model;
    SchemeParams scheme;
    InitialCondition initial;
    OutputConfig output;
    RunMode mode = RunMode::run;
};

/// Parses "[section]" / "key = value" text into a validated Config; unknown
/// keys and violated constraints raise ConfigError naming the offender.
Config parse_config(const std::string& text);
Config load_config(const std::string& path);

std::string mode_name(RunMode mode);
RunMode mode_from_name(const std::string& name);

} // namespace chnsd
