#pragma once

#include "chnsd/space.hpp"

#include <functional>

namespace chnsd {

/// Coefficient vector attached to a function space.
struct DiscreteField {
    const FunctionSpace* space = nullptr;
    Vector coeffs;
};

DiscreteField make_field(const FunctionSpace& space);

/// Nodal interpolation of a scalar (or vector) closed form.
DiscreteField interpolate(const FunctionSpace& space, const std::function<double(const Vec2&)>& f);
DiscreteField interpolate_vector(const FunctionSpace& space, const std::function<Vec2(const Vec2&)>& f);

// In-element evaluation. The triangle must be covered by the field's space.
double eval_scalar(const DiscreteField& f, int tri, const std::array<double, 3>& bary);
Vec2 eval_scalar_grad(const DiscreteField& f, int tri, const std::array<double, 3>& bary);
Vec2 eval_vector(const DiscreteField& f, int tri, const std::array<double, 3>& bary);
/// Jacobian (grad u)_{ij} = du_i/dx_j.
Mat2 eval_vector_grad(const DiscreteField& f, int tri, const std::array<double, 3>& bary);
double eval_vector_div(const DiscreteField& f, int tri, const std::array<double, 3>& bary);

} // namespace chnsd
