#pragma once

#include "chnsd/common.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace chnsd {

/// Subdomain of the two-layer domain: conduit (free flow) or matrix (porous media).
enum class Region : std::uint8_t { conduit, matrix };

/// Tag of an outer boundary edge: gamma_c borders the conduit, gamma_m the matrix.
enum class BoundaryTag : std::uint8_t { gamma_c, gamma_m };

enum class ConduitPosition : std::uint8_t { bottom, top };

/// Rectangular two-layer domain split by a horizontal interface line.
struct DomainLayout {
    double x_min = 0.0;
    double x_max = 1.0;
    double y_min = 0.0;
    double y_max = 2.0;
    double y_interface = 1.0;
    ConduitPosition conduit_position = ConduitPosition::top;

    void validate() const;
    Region region_of(double y) const;
};

struct BoundaryEdge {
    int a = -1, b = -1;
    BoundaryTag tag = BoundaryTag::gamma_c;
};

/// Interface edge on y = y_interface. normal_c is the unit normal pointing
/// from the conduit into the matrix; tri_c / tri_m are the adjacent triangles.
struct InterfaceEdge {
    int a = -1, b = -1;
    int tri_c = -1, tri_m = -1;
    Vec2 normal_c = Vec2::Zero();
};

/// Conforming triangulation of the layered domain. Immutable after
/// construction; all derived arrays are filled by finalize_mesh().
struct Mesh {
    DomainLayout layout;
    std::vector<Vec2> nodes;
    std::vector<std::array<int, 3>> triangles; // counterclockwise
    std::vector<Region> region;                // one per triangle
    std::vector<BoundaryEdge> boundary_edges;
    std::vector<InterfaceEdge> interface_edges;

    // derived, see finalize_mesh()
    std::vector<double> tri_area;
    std::vector<Mat2> jinv_t;                    // inverse-transpose Jacobian per triangle
    std::vector<std::array<int, 2>> edges;       // unique undirected edges, endpoints sorted
    std::vector<std::array<int, 3>> tri_edges;   // edge ids; local edge k = (v_k, v_{k+1 mod 3})

    int n_nodes() const { return static_cast<int>(nodes.size()); }
    int n_triangles() const { return static_cast<int>(triangles.size()); }
    int n_edges() const { return static_cast<int>(edges.size()); }

    std::array<Vec2, 3> tri_coords(int t) const {
        return {nodes[triangles[t][0]], nodes[triangles[t][1]], nodes[triangles[t][2]]};
    }
    /// Barycentric -> physical coordinates.
    Vec2 point_of(int t, const std::array<double, 3>& bary) const {
        const auto c = tri_coords(t);
        return bary[0] * c[0] + bary[1] * c[1] + bary[2] * c[2];
    }
    double domain_area() const;
    double region_area(Region r) const;
};

/// Uniform nx-by-ny grid of rectangles, each split along the lower-left to
/// upper-right diagonal. Rejects layouts whose interface is not a grid line.
Mesh build_layered_mesh(int nx, int ny, const DomainLayout& layout);

/// Red refinement: every triangle split into four by its edge midpoints.
Mesh refine_uniform(const Mesh& mesh);

/// Recomputes derived arrays (areas, Jacobians, edge table, interface
/// adjacency) from nodes/triangles/tags. Called by the builders.
void finalize_mesh(Mesh& mesh);

/// Checks all structural invariants; throws MeshError on violation.
void validate_mesh(const Mesh& mesh);

} // namespace chnsd
