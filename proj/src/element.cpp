#include "chnsd/element.hpp"

namespace chnsd {

int local_dof_count(ElementKind kind) {
    switch (kind) {
    case ElementKind::p1_scalar: return 3;
    case ElementKind::p2_scalar: return 6;
    case ElementKind::p2_vector2: return 12;
    case ElementKind::p1_vector2: return 6;
    }
    return 0;
}

int scalar_shape_count(ElementKind kind) {
    return (kind == ElementKind::p1_scalar || kind == ElementKind::p1_vector2) ? 3 : 6;
}

bool is_vector(ElementKind kind) { return kind == ElementKind::p2_vector2 || kind == ElementKind::p1_vector2; }

void eval_basis(ElementKind kind, const std::array<double, 3>& bary, std::array<double, 6>& values,
                std::array<Vec2, 6>& ref_gradients) {
    // reference gradients of the barycentric coordinates on the unit triangle
    static const Vec2 dl[3] = {Vec2(-1.0, -1.0), Vec2(1.0, 0.0), Vec2(0.0, 1.0)};
    const double l0 = bary[0], l1 = bary[1], l2 = bary[2];
    if (kind == ElementKind::p1_scalar || kind == ElementKind::p1_vector2) {
        values = {l0, l1, l2, 0, 0, 0};
        ref_gradients = {dl[0], dl[1], dl[2], Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
        return;
    }
    const double l[3] = {l0, l1, l2};
    for (int i = 0; i < 3; ++i) {
        values[i] = l[i] * (2.0 * l[i] - 1.0);
        ref_gradients[i] = (4.0 * l[i] - 1.0) * dl[i];
    }
    for (int k = 0; k < 3; ++k) {
        const int a = k, b = (k + 1) % 3;
        values[3 + k] = 4.0 * l[a] * l[b];
        ref_gradients[3 + k] = 4.0 * (l[a] * dl[b] + l[b] * dl[a]);
    }
}

BasisTable tabulate_basis(ElementKind kind, const QuadRule& rule) {
    BasisTable table;
    table.n_shapes = scalar_shape_count(kind);
    table.values.resize(rule.n_points());
    table.ref_grads.resize(rule.n_points());
    for (int q = 0; q < rule.n_points(); ++q) eval_basis(kind, rule.points[q], table.values[q], table.ref_grads[q]);
    return table;
}

} // namespace chnsd
