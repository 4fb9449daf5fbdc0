#include "chnsd/mesh.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>

namespace chnsd {

void DomainLayout::validate() const {
    if (!(x_max > x_min) || !(y_max > y_min))
        throw MeshError("degenerate domain ranges");
    if (!(y_interface > y_min && y_interface < y_max))
        throw MeshError("y_interface must lie strictly inside y_range");
}

Region DomainLayout::region_of(double y) const {
    const bool below = y < y_interface;
    if (conduit_position == ConduitPosition::bottom)
        return below ? Region::conduit : Region::matrix;
    return below ? Region::matrix : Region::conduit;
}

double Mesh::domain_area() const {
    double a = 0.0;
    for (double t : tri_area) a += t;
    return a;
}

double Mesh::region_area(Region r) const {
    double a = 0.0;
    for (int t = 0; t < n_triangles(); ++t)
        if (region[t] == r) a += tri_area[t];
    return a;
}

namespace {

double signed_area(const Vec2& p0, const Vec2& p1, const Vec2& p2) {
    return 0.5 * ((p1.x() - p0.x()) * (p2.y() - p0.y()) - (p2.x() - p0.x()) * (p1.y() - p0.y()));
}

} // namespace

void finalize_mesh(Mesh& mesh) {
    const int nt = mesh.n_triangles();
    mesh.tri_area.resize(nt);
    mesh.jinv_t.resize(nt);
    for (int t = 0; t < nt; ++t) {
        const auto c = mesh.tri_coords(t);
        const double a = signed_area(c[0], c[1], c[2]);
        if (a <= 0.0) throw MeshError("triangle " + std::to_string(t) + " is not counterclockwise");
        mesh.tri_area[t] = a;
        Mat2 jac;
        jac << c[1].x() - c[0].x(), c[2].x() - c[0].x(), c[1].y() - c[0].y(), c[2].y() - c[0].y();
        mesh.jinv_t[t] = jac.inverse().transpose();
    }

    // unique edge table, kept sorted so edge lookups can bisect
    std::map<std::array<int, 2>, int> edge_id;
    for (int t = 0; t < nt; ++t)
        for (int k = 0; k < 3; ++k) {
            int a = mesh.triangles[t][k];
            int b = mesh.triangles[t][(k + 1) % 3];
            edge_id.emplace(std::array<int, 2>{std::min(a, b), std::max(a, b)}, 0);
        }
    mesh.edges.clear();
    mesh.edges.reserve(edge_id.size());
    for (auto& [key, id] : edge_id) {
        id = static_cast<int>(mesh.edges.size());
        mesh.edges.push_back(key);
    }
    mesh.tri_edges.assign(nt, {-1, -1, -1});
    for (int t = 0; t < nt; ++t)
        for (int k = 0; k < 3; ++k) {
            int a = mesh.triangles[t][k];
            int b = mesh.triangles[t][(k + 1) % 3];
            mesh.tri_edges[t][k] = edge_id.at({std::min(a, b), std::max(a, b)});
        }

    // interface adjacency: locate the conduit and matrix triangle of each edge
    std::map<std::array<int, 2>, std::array<int, 2>> adj; // edge -> {tri_c, tri_m}
    for (const auto& e : mesh.interface_edges)
        adj[{std::min(e.a, e.b), std::max(e.a, e.b)}] = {-1, -1};
    for (int t = 0; t < nt; ++t) {
        for (int k = 0; k < 3; ++k) {
            int a = mesh.triangles[t][k];
            int b = mesh.triangles[t][(k + 1) % 3];
            auto it = adj.find({std::min(a, b), std::max(a, b)});
            if (it == adj.end()) continue;
            if (mesh.region[t] == Region::conduit)
                it->second[0] = t;
            else
                it->second[1] = t;
        }
    }
    for (auto& e : mesh.interface_edges) {
        auto pair = adj.at({std::min(e.a, e.b), std::max(e.a, e.b)});
        e.tri_c = pair[0];
        e.tri_m = pair[1];
        if (e.tri_c < 0 || e.tri_m < 0)
            throw MeshError("interface edge not shared by one conduit and one matrix triangle");
    }
}

Mesh build_layered_mesh(int nx, int ny, const DomainLayout& layout) {
    layout.validate();
    if (nx < 1 || ny < 1) throw MeshError("nx and ny must be positive");

    const double hx = (layout.x_max - layout.x_min) / nx;
    const double hy = (layout.y_max - layout.y_min) / ny;
    const double rows = (layout.y_interface - layout.y_min) / hy;
    const int j_interface = static_cast<int>(std::lround(rows));
    if (std::abs(rows - j_interface) > 1e-9 * ny || j_interface <= 0 || j_interface >= ny)
        throw MeshError("y_interface is not a grid line for ny=" + std::to_string(ny));

    Mesh mesh;
    mesh.layout = layout;
    mesh.nodes.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            // snap the interface row exactly onto the line
            const double y = (j == j_interface) ? layout.y_interface : layout.y_min + j * hy;
            mesh.nodes.emplace_back(layout.x_min + i * hx, y);
        }
    auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };

    mesh.triangles.reserve(static_cast<std::size_t>(2) * nx * ny);
    mesh.region.reserve(static_cast<std::size_t>(2) * nx * ny);
    for (int j = 0; j < ny; ++j) {
        const Region r = layout.region_of(layout.y_min + (j + 0.5) * hy);
        for (int i = 0; i < nx; ++i) {
            const int v00 = vid(i, j), v10 = vid(i + 1, j);
            const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
            mesh.triangles.push_back({v00, v10, v11});
            mesh.triangles.push_back({v00, v11, v01});
            mesh.region.push_back(r);
            mesh.region.push_back(r);
        }
    }

    for (int i = 0; i < nx; ++i) { // bottom and top walls
        const Region rb = layout.region_of(layout.y_min + 0.5 * hy);
        const Region rt = layout.region_of(layout.y_max - 0.5 * hy);
        mesh.boundary_edges.push_back(
            {vid(i, 0), vid(i + 1, 0), rb == Region::conduit ? BoundaryTag::gamma_c : BoundaryTag::gamma_m});
        mesh.boundary_edges.push_back(
            {vid(i, ny), vid(i + 1, ny), rt == Region::conduit ? BoundaryTag::gamma_c : BoundaryTag::gamma_m});
    }
    for (int j = 0; j < ny; ++j) { // side walls
        const Region r = layout.region_of(layout.y_min + (j + 0.5) * hy);
        const BoundaryTag tag = r == Region::conduit ? BoundaryTag::gamma_c : BoundaryTag::gamma_m;
        mesh.boundary_edges.push_back({vid(0, j), vid(0, j + 1), tag});
        mesh.boundary_edges.push_back({vid(nx, j), vid(nx, j + 1), tag});
    }

    const Vec2 n_c = layout.conduit_position == ConduitPosition::bottom ? Vec2(0.0, 1.0) : Vec2(0.0, -1.0);
    for (int i = 0; i < nx; ++i) {
        InterfaceEdge e;
        e.a = vid(i, j_interface);
        e.b = vid(i + 1, j_interface);
        e.normal_c = n_c;
        mesh.interface_edges.push_back(e);
    }

    finalize_mesh(mesh);
    return mesh;
}

Mesh refine_uniform(const Mesh& mesh) {
    Mesh out;
    out.layout = mesh.layout;
    out.nodes = mesh.nodes;

    // one new node per parent edge
    std::vector<int> mid(mesh.edges.size());
    for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
        mid[e] = static_cast<int>(out.nodes.size());
        out.nodes.push_back(0.5 * (mesh.nodes[mesh.edges[e][0]] + mesh.nodes[mesh.edges[e][1]]));
    }

    out.triangles.reserve(mesh.triangles.size() * 4);
    out.region.reserve(mesh.triangles.size() * 4);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& v = mesh.triangles[t];
        const int m01 = mid[mesh.tri_edges[t][0]];
        const int m12 = mid[mesh.tri_edges[t][1]];
        const int m20 = mid[mesh.tri_edges[t][2]];
        const std::array<std::array<int, 3>, 4> kids{{{v[0], m01, m20}, {m01, v[1], m12}, {m20, m12, v[2]}, {m01, m12, m20}}};
        for (const auto& k : kids) {
            out.triangles.push_back(k);
            out.region.push_back(mesh.region[t]);
        }
    }

    std::map<std::array<int, 2>, int> parent_edge;
    for (std::size_t e = 0; e < mesh.edges.size(); ++e)
        parent_edge.emplace(mesh.edges[e], static_cast<int>(e));
    auto split = [&](int a, int b) {
        const int m = mid[parent_edge.at({std::min(a, b), std::max(a, b)})];
        return std::array<std::array<int, 2>, 2>{{{a, m}, {m, b}}};
    };

    for (const auto& be : mesh.boundary_edges)
        for (const auto& half : split(be.a, be.b)) out.boundary_edges.push_back({half[0], half[1], be.tag});
    for (const auto& ie : mesh.interface_edges)
        for (const auto& half : split(ie.a, ie.b)) {
            InterfaceEdge e;
            e.a = half[0];
            e.b = half[1];
            e.normal_c = ie.normal_c;
            out.interface_edges.push_back(e);
        }

    finalize_mesh(out);
    return out;
}

void validate_mesh(const Mesh& mesh) {
    mesh.layout.validate();
    if (mesh.region.size() != mesh.triangles.size()) throw MeshError("region tags do not match triangle count");

    const double yi = mesh.layout.y_interface;
    const double tol = 1e-12 * (mesh.layout.y_max - mesh.layout.y_min);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto c = mesh.tri_coords(t);
        bool above = false, below = false;
        for (const auto& p : c) {
            if (p.y() > yi + tol) above = true;
            if (p.y() < yi - tol) below = true;
        }
        if (above && below) throw MeshError("triangle " + std::to_string(t) + " straddles the interface");
        const Region want = mesh.layout.region_of(above ? yi + 1.0 : yi - 1.0);
        // triangles fully on the line cannot occur for positive-area triangles
        if (mesh.region[t] != want) throw MeshError("triangle " + std::to_string(t) + " has the wrong region tag");
    }

    for (const auto& e : mesh.interface_edges) {
        if (std::abs(mesh.nodes[e.a].y() - yi) > tol || std::abs(mesh.nodes[e.b].y() - yi) > tol)
            throw MeshError("interface edge endpoint off y = y_interface");
        if (std::abs(e.normal_c.norm() - 1.0) > 1e-14) throw MeshError("interface normal is not unit");
        if (e.tri_c < 0 || e.tri_m < 0 || mesh.region[e.tri_c] != Region::conduit || mesh.region[e.tri_m] != Region::matrix)
            throw MeshError("interface edge adjacency broken");
    }

    // conformity: every edge belongs to one or two triangles; count matches boundary+interface structure
    std::map<std::array<int, 2>, int> uses;
    for (int t = 0; t < mesh.n_triangles(); ++t)
        for (int k = 0; k < 3; ++k) {
            int a = mesh.triangles[t][k], b = mesh.triangles[t][(k + 1) % 3];
            uses[{std::min(a, b), std::max(a, b)}]++;
        }
    for (const auto& [key, n] : uses)
        if (n > 2) throw MeshError("non-conforming edge shared by more than two triangles");
    for (const auto& be : mesh.boundary_edges)
        if (uses.at({std::min(be.a, be.b), std::max(be.a, be.b)}) != 1)
            throw MeshError("boundary edge is not on the boundary");
    for (const auto& ie : mesh.interface_edges)
        if (uses.at({std::min(ie.a, ie.b), std::max(ie.a, ie.b)}) != 2)
            throw MeshError("interface edge is not interior");
}

} // namespace chnsd
