#include "chnsd/fields.hpp"

namespace chnsd {

DiscreteField make_field(const FunctionSpace& space) {
    return {&space, Vector::Zero(space.n_dofs)};
}

DiscreteField interpolate(const FunctionSpace& space, const std::function<double(const Vec2&)>& f) {
    if (space.is_vector_space()) throw AssemblyError("interpolate: scalar callable on vector space");
    DiscreteField out = make_field(space);
    for (int i = 0; i < space.n_scalar_dofs; ++i) out.coeffs[i] = f(space.dof_points[i]);
    return out;
}

DiscreteField interpolate_vector(const FunctionSpace& space, const std::function<Vec2(const Vec2&)>& f) {
    if (!space.is_vector_space()) throw AssemblyError("interpolate_vector: vector callable on scalar space");
    DiscreteField out = make_field(space);
    for (int i = 0; i < space.n_scalar_dofs; ++i) {
        const Vec2 v = f(space.dof_points[i]);
        out.coeffs[2 * i] = v.x();
        out.coeffs[2 * i + 1] = v.y();
    }
    return out;
}

namespace {

struct LocalBasis {
    std::array<double, 6> values;
    std::array<Vec2, 6> ref_grads;
    int n = 0;
};

LocalBasis local_basis(const DiscreteField& f, int tri, const std::array<double, 3>& bary) {
    LocalBasis b;
    b.n = scalar_shape_count(f.space->element);
    eval_basis(f.space->element, bary, b.values, b.ref_grads);
    return b;
}

} // namespace

double eval_scalar(const DiscreteField& f, int tri, const std::array<double, 3>& bary) {
    const auto b = local_basis(f, tri, bary);
    int dofs[6];
    f.space->cell_dofs(tri, {dofs, static_cast<std::size_t>(b.n)});
    double v = 0.0;
    for (int k = 0; k < b.n; ++k) v += f.coeffs[dofs[k]] * b.values[k];
    return v;
}

Vec2 eval_scalar_grad(const DiscreteField& f, int tri, const std::array<double, 3>& bary) {
    const auto b = local_basis(f, tri, bary);
    int dofs[6];
    f.space->cell_dofs(tri, {dofs, static_cast<std::size_t>(b.n)});
    const Mat2& jt = f.space->mesh->jinv_t[tri];
    Vec2 g = Vec2::Zero();
    for (int k = 0; k < b.n; ++k) g += f.coeffs[dofs[k]] * (jt * b.ref_grads[k]);
    return g;
}

Vec2 eval_vector(const DiscreteField& f, int tri, const std::array<double, 3>& bary) {
    const auto b = local_basis(f, tri, bary);
    int dofs[12];
    f.space->cell_dofs(tri, {dofs, static_cast<std::size_t>(2 * b.n)});
    Vec2 v = Vec2::Zero();
    for (int k = 0; k < b.n; ++k) {
        v.x() += f.coeffs[dofs[2 * k]] * b.values[k];
        v.y() += f.coeffs[dofs[2 * k + 1]] * b.values[k];
    }
    return v;
}

Mat2 eval_vector_grad(const DiscreteField& f, int tri, const std::array<double, 3>& bary) {
    const auto b = local_basis(f, tri, bary);
    int dofs[12];
    f.space->cell_dofs(tri, {dofs, static_cast<std::size_t>(2 * b.n)});
    const Mat2& jt = f.space->mesh->jinv_t[tri];
    Mat2 g = Mat2::Zero();
    for (int k = 0; k < b.n; ++k) {
        const Vec2 gk = jt * b.ref_grads[k];
        g.row(0) += f.coeffs[dofs[2 * k]] * gk.transpose();
        g.row(1) += f.coeffs[dofs[2 * k + 1]] * gk.transpose();
    }
    return g;
}

double eval_vector_div(const DiscreteField& f, int tri, const std::array<double, 3>& bary) {
    const Mat2 g = eval_vector_grad(f, tri, bary);
    return g(0, 0) + g(1, 1);
}

} // namespace chnsd
