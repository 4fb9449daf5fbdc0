#pragma once

#include "chnsd/element.hpp"
#include "chnsd/mesh.hpp"

#include <span>
#include <vector>

namespace chnsd {

enum class SpaceRegion { whole, conduit, matrix };

enum class Constraint { none, zero_mean };

/// Finite element space over one region of the mesh (or all of it).
/// Scalar DOFs live on nodes (P1/P2) and edge midpoints (P2); the vector
/// element interleaves components: global dof = 2 * scalar_dof + component.
struct FunctionSpace {
    const Mesh* mesh = nullptr;
    ElementKind element = ElementKind::p1_scalar;
    SpaceRegion region = SpaceRegion::whole;
    Constraint constraint = Constraint::none;

    int n_dofs = 0;
    int n_scalar_dofs = 0;
    std::vector<int> node_dof; // node -> scalar dof, -1 when outside the region
    std::vector<int> edge_dof; // edge -> scalar dof (P2 only)
    std::vector<Vec2> dof_points;

    bool is_vector_space() const { return is_vector(element); }
    int local_dofs() const { return local_dof_count(element); }
    bool covers(Region r) const {
        return region == SpaceRegion::whole || (region == SpaceRegion::conduit && r == Region::conduit) ||
               (region == SpaceRegion::matrix && r == Region::matrix);
    }
    bool covers_tri(int t) const { return covers(mesh->region[t]); }

    /// Fills the local->global map for triangle t (must be covered).
    /// Scalar: one entry per shape. Vector: entries 2s, 2s+1 per shape s.
    void cell_dofs(int t, std::span<int> out) const;

    /// Scalar dofs of the three P2/P1 support points on an edge (a, b):
    /// the two endpoint dofs, plus the midpoint dof for P2 (-1 entries for P1).
    std::array<int, 3> edge_scalar_dofs(int a, int b) const;
};

FunctionSpace make_space(const Mesh& mesh, ElementKind kind, SpaceRegion region,
                         Constraint constraint = Constraint::none);

/// Scalar dofs whose support point lies on boundary edges with the given tag.
/// For vector spaces expand with both components at call sites.
std::vector<int> boundary_scalar_dofs(const FunctionSpace& space, BoundaryTag tag);

/// All outer-boundary scalar dofs of the space (both tags).
std::vector<int> boundary_scalar_dofs(const FunctionSpace& space);

/// Scalar dofs with support on the interface line.
std::vector<int> interface_scalar_dofs(const FunctionSpace& space);

} // namespace chnsd
