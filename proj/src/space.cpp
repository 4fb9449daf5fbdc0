#include "chnsd/space.hpp"

#include <algorithm>
#include <set>

namespace chnsd {

void FunctionSpace::cell_dofs(int t, std::span<int> out) const {
    const auto& tri = mesh->triangles[t];
    int scalar[6];
    int ns = 3;
    for (int k = 0; k < 3; ++k) scalar[k] = node_dof[tri[k]];
    if (scalar_shape_count(element) == 6) {
        ns = 6;
        for (int k = 0; k < 3; ++k) scalar[3 + k] = edge_dof[mesh->tri_edges[t][k]];
    }
    if (!is_vector_space()) {
        for (int k = 0; k < ns; ++k) out[k] = scalar[k];
    } else {
        for (int k = 0; k < ns; ++k) {
            out[2 * k] = 2 * scalar[k];
            out[2 * k + 1] = 2 * scalar[k] + 1;
        }
    }
}

std::array<int, 3> FunctionSpace::edge_scalar_dofs(int a, int b) const {
    std::array<int, 3> out{node_dof[a], node_dof[b], -1};
    if (scalar_shape_count(element) == 6) {
        const std::array<int, 2> key{std::min(a, b), std::max(a, b)};
        auto it = std::lower_bound(mesh->edges.begin(), mesh->edges.end(), key);
        if (it != mesh->edges.end() && *it == key)
            out[2] = edge_dof[static_cast<int>(it - mesh->edges.begin())];
    }
    return out;
}

FunctionSpace make_space(const Mesh& mesh, ElementKind kind, SpaceRegion region, Constraint constraint) {
    if (constraint == Constraint::zero_mean && (kind != ElementKind::p1_scalar || region != SpaceRegion::matrix))
        throw AssemblyError("zero_mean constraint is reserved for the Darcy pressure space");

    FunctionSpace s;
    s.mesh = &mesh;
    s.element = kind;
    s.region = region;
    s.constraint = constraint;
    s.node_dof.assign(mesh.n_nodes(), -1);
    if (scalar_shape_count(kind) == 6) s.edge_dof.assign(mesh.n_edges(), -1);

    std::vector<char> node_hit(mesh.n_nodes(), 0), edge_hit(mesh.n_edges(), 0);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        if (!s.covers_tri(t)) continue;
        for (int k = 0; k < 3; ++k) {
            node_hit[mesh.triangles[t][k]] = 1;
            edge_hit[mesh.tri_edges[t][k]] = 1;
        }
    }

    int next = 0;
    for (int n = 0; n < mesh.n_nodes(); ++n)
        if (node_hit[n]) {
            s.node_dof[n] = next++;
            s.dof_points.push_back(mesh.nodes[n]);
        }
    if (scalar_shape_count(kind) == 6)
        for (int e = 0; e < mesh.n_edges(); ++e)
            if (edge_hit[e]) {
                s.edge_dof[e] = next++;
                s.dof_points.push_back(0.5 * (mesh.nodes[mesh.edges[e][0]] + mesh.nodes[mesh.edges[e][1]]));
            }
    s.n_scalar_dofs = next;
    s.n_dofs = s.is_vector_space() ? 2 * next : next;
    return s;
}

namespace {

std::vector<int> edge_support_dofs(const FunctionSpace& space, const std::vector<std::array<int, 2>>& edge_nodes) {
    std::set<int> dofs;
    for (const auto& [a, b] : edge_nodes) {
        const auto d = space.edge_scalar_dofs(a, b);
        for (int x : d)
            if (x >= 0) dofs.insert(x);
    }
    return {dofs.begin(), dofs.end()};
}

} // namespace

std::vector<int> boundary_scalar_dofs(const FunctionSpace& space, BoundaryTag tag) {
    std::vector<std::array<int, 2>> edges;
    for (const auto& be : space.mesh->boundary_edges)
        if (be.tag == tag) edges.push_back({be.a, be.b});
    return edge_support_dofs(space, edges);
}

std::vector<int> boundary_scalar_dofs(const FunctionSpace& space) {
    std::vector<std::array<int, 2>> edges;
    for (const auto& be : space.mesh->boundary_edges) edges.push_back({be.a, be.b});
    return edge_support_dofs(space, edges);
}

std::vector<int> interface_scalar_dofs(const FunctionSpace& space) {
    std::vector<std::array<int, 2>> edges;
    for (const auto& ie : space.mesh->interface_edges) edges.push_back({ie.a, ie.b});
    return edge_support_dofs(space, edges);
}

} // namespace chnsd
