#pragma once

#include "chnsd/config.hpp"
#include "chnsd/convergence.hpp"
#include "chnsd/mms.hpp"
#include "chnsd/vtk_io.hpp"

#include <functional>
#include <memory>

namespace chnsd {

/// Owns the geometry and discretization of one experiment; states created
/// from it must not outlive it.
struct Problem {
    std::unique_ptr<Mesh> mesh;
    std::unique_ptr<Spaces> spaces;
};

Problem make_problem(const Config& cfg, bool mms_mode = false);

/// Nodal interpolation of the configured initial phase profile.
DiscreteField initial_phase(const Config& cfg, const Spaces& spaces);

/// Initial phase plus zero velocity, pressures, and chemical potential.
SimState initial_state(const Config& cfg, const Spaces& spaces);

using StepCallback = std::function<void(int step, const SimState& state, const StepReport& report)>;

/// Runs n_steps of the configured scheme, recording energies per step
/// (row 0 is the initial state).
std::vector<EnergyRecord> run_time_loop(const Problem& problem, const Config& cfg, SimState& state, int n_steps,
                                        const SchemeForcing* forcing = nullptr, const StepCallback& on_step = {});

struct SpaceConvergenceResult {
    ConvergenceTable table;
};
/// Accuracy study on the manufactured solution: mesh levels n_cells(+doublings),
/// all at the configured dt and T.
SpaceConvergenceResult run_converge_space(const Config& cfg, const std::vector<int>& cells_per_unit = {4, 8, 16, 32});

struct TimeConvergenceResult {
    ConvergenceTable table; // Cauchy differences per dt level
};
/// Time-accuracy study at fixed h: dt, dt/2, ..., dt/2^(levels-1).
TimeConvergenceResult run_converge_time(const Config& cfg, int levels = 6);

struct CompareResult {
    std::vector<EnergyRecord> decoupled;
    std::vector<EnergyRecord> coupled;
    double phi_l2_difference = 0.0; // at final time
};
/// Both schemes on byte-identical inputs (asserted by hash).
CompareResult run_compare_schemes(const Config& cfg);

/// Full CLI entry: dispatches on cfg.mode and writes artifacts into
/// cfg.output.directory. Throws ConfigError/SolverError/IoError on failure.
void run_experiment(const Config& cfg);

/// FNV-1a over doubles; used to assert identical inputs across scheme runs.
std::uint64_t hash_bytes(const double* data, std::size_t n, std::uint64_t seed = 1469598103934665603ull);

} // namespace chnsd
