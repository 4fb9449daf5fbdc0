#include "chnsd/vtk_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace chnsd {

namespace {

void write_mesh_header(std::ostream& os, const Mesh& mesh) {
    os << "# vtk DataFile Version 3.0\n";
    os << "chnsd snapshot\n";
    os << "ASCII\n";
    os << "DATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << mesh.n_nodes() << " double\n";
    char buf[96];
    for (const Vec2& p : mesh.nodes) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g 0\n", p.x(), p.y());
        os << buf;
    }
    os << "CELLS " << mesh.n_triangles() << " " << 4 * mesh.n_triangles() << "\n";
    for (const auto& t : mesh.triangles) os << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
    os << "CELL_TYPES " << mesh.n_triangles() << "\n";
    for (int t = 0; t < mesh.n_triangles(); ++t) os << "5\n";
    os << "CELL_DATA " << mesh.n_triangles() << "\n";
    os << "SCALARS region int 1\nLOOKUP_TABLE default\n";
    for (Region r : mesh.region) os << (r == Region::conduit ? 0 : 1) << "\n";
}

std::vector<double> vertex_scalar(const Mesh& mesh, const FunctionSpace& space, const Vector& coeffs,
                                  int component = -1) {
    std::vector<double> out(mesh.n_nodes(), 0.0);
    for (int n = 0; n < mesh.n_nodes(); ++n) {
        const int d = space.node_dof[n];
        if (d < 0) continue;
        out[n] = component < 0 ? coeffs[d] : coeffs[2 * d + component];
    }
    return out;
}

} // namespace

void write_mesh_vtk(const Mesh& mesh, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    write_mesh_header(os, mesh);
    if (!os) throw IoError("write failed for '" + path + "'");
}

void write_vtk(const SimState& state, const Mesh& mesh, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    write_mesh_header(os, mesh);

    const auto phi = vertex_scalar(mesh, *state.phi.space, state.phi.coeffs);
    const auto w = vertex_scalar(mesh, *state.w.space, state.w.coeffs);
    // matrix pressure first, conduit pressure wins on the shared interface nodes
    auto p = vertex_scalar(mesh, *state.p_m.space, state.p_m.coeffs);
    for (int n = 0; n < mesh.n_nodes(); ++n) {
        const int d = state.p_c.space->node_dof[n];
        if (d >= 0) p[n] = state.p_c.coeffs[d];
    }
    auto ux = vertex_scalar(mesh, *state.u_m.space, state.u_m.coeffs, 0);
    auto uy = vertex_scalar(mesh, *state.u_m.space, state.u_m.coeffs, 1);
    for (int n = 0; n < mesh.n_nodes(); ++n) {
        const int d = state.u_c.space->node_dof[n];
        if (d >= 0) {
            ux[n] = state.u_c.coeffs[2 * d];
            uy[n] = state.u_c.coeffs[2 * d + 1];
        }
    }

    char buf[128];
    os << "POINT_DATA " << mesh.n_nodes() << "\n";
    auto scalars = [&](const char* name, const std::vector<double>& v) {
        os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
        for (double x : v) {
            std::snprintf(buf, sizeof buf, "%.17g\n", x);
            os << buf;
        }
    };
    scalars("phi", phi);
    scalars("w", w);
    scalars("p", p);
    os << "VECTORS velocity double\n";
    for (int n = 0; n < mesh.n_nodes(); ++n) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g 0\n", ux[n], uy[n]);
        os << buf;
    }
    if (!os) throw IoError("write failed for '" + path + "'");
}

void write_energy_csv(const std::vector<EnergyRecord>& records, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    os << "t,E,E_mod,D,phase_mass,div_u\n";
    char buf[256];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.E, r.E_mod, r.D, r.phase_mass,
                      r.div_u);
        os << buf;
    }
    if (!os) throw IoError("write failed for '" + path + "'");
}

std::vector<EnergyRecord> read_energy_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(is, line) || line != "t,E,E_mod,D,phase_mass,div_u")
        throw IoError("unexpected energy CSV header in '" + path + "'");
    std::vector<EnergyRecord> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        EnergyRecord r;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf", &r.t, &r.E, &r.E_mod, &r.D, &r.phase_mass,
                        &r.div_u) != 6)
            throw IoError("malformed energy CSV row: " + line);
        out.push_back(r);
    }
    return out;
}

} // namespace chnsd
