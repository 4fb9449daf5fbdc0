#pragma once

#include "chnsd/common.hpp"
#include "chnsd/quadrature.hpp"

#include <array>
#include <vector>

namespace chnsd {

enum class ElementKind { p1_scalar, p2_scalar, p2_vector2, p1_vector2 };

/// Local DOFs: 3 for P1, 6 for P2 (3 vertices + 3 edge midpoints),
/// 12 for the P2 vector element and 6 for the P1 vector element
/// (scalar shapes x 2 components, interleaved).
int local_dof_count(ElementKind kind);

/// Scalar shape functions underlying the element: 3 for P1, 6 for P2 and
/// the P2 vector element (whose local dof 2*s + c is N_s * e_c).
int scalar_shape_count(ElementKind kind);

bool is_vector(ElementKind kind);

/// Lagrange basis values and reference gradients at a barycentric point.
/// P2 dof order: vertices 0-2, then midpoints of local edges (0,1), (1,2), (2,0).
void eval_basis(ElementKind kind, const std::array<double, 3>& bary, std::array<double, 6>& values,
                std::array<Vec2, 6>& ref_gradients);

/// Basis values/reference gradients tabulated at a quadrature rule's points.
struct BasisTable {
    int n_shapes = 0;
    std::vector<std::array<double, 6>> values;    // [qp][shape]
    std::vector<std::array<Vec2, 6>> ref_grads;   // [qp][shape]
};

BasisTable tabulate_basis(ElementKind kind, const QuadRule& rule);

} // namespace chnsd
