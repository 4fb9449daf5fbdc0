#pragma once

#include "chnsd/diagnostics.hpp"

#include <string>
#include <vector>

namespace chnsd {

/// Legacy-VTK ASCII snapshot: mesh, region tags, and the fields sampled at
/// the vertices (phi, w, p with the conduit pressure winning on the
/// interface, and the velocity from u_c / recovered u_m).
void write_vtk(const SimState& state, const Mesh& mesh, const std::string& path);

/// Mesh-only dump for inspection.
void write_mesh_vtk(const Mesh& mesh, const std::string& path);

/// "t,E,E_mod,D,phase_mass,div_u" rows at 17 significant digits.
void write_energy_csv(const std::vector<EnergyRecord>& records, const std::string& path);
std::vector<EnergyRecord> read_energy_csv(const std::string& path);

} // namespace chnsd
