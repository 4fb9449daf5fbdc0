#pragma once

#include <array>
#include <vector>

namespace chnsd {

/// Quadrature on the reference triangle plus a 1D Gauss rule for edge
/// integrals. Triangle weights sum to the reference area 1/2; edge weights
/// sum to 1 (scaled by edge length at use sites).
struct QuadRule {
    std::vector<std::array<double, 3>> points; // barycentric
    std::vector<double> weights;
    std::vector<double> edge_points; // on [0, 1]
    std::vector<double> edge_weights;

    int n_points() const { return static_cast<int>(points.size()); }
    int n_edge_points() const { return static_cast<int>(edge_points.size()); }
};

/// 7-point degree-5 triangle rule with 3-point Gauss edges; used for all
/// operator assembly.
const QuadRule& assembly_rule();

/// 16-point degree-8 triangle rule with 5-point Gauss edges; used for error
/// norms and other diagnostics where the integrand outdegrees the assembly rule.
const QuadRule& norm_rule();

} // namespace chnsd
