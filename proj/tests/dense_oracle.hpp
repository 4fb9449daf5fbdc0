#pragma once

// Independent dense reference implementations of the four substeps and the
// monolithic step. Everything here is written against the weak forms
// directly: basis functions come from monomial Vandermonde solves (not the
// closed-form Lagrange expressions of the library), element matrices are
// accumulated into dense Eigen matrices, and the systems are solved by dense
// LU. Shared with the library: only the quadrature point tables and the
// mesh/space numbering needed to compare coefficient vectors.

#include "chnsd/scheme.hpp"

#include <Eigen/Dense>

namespace chnsd::oracle {

struct DenseStepResult {
    Vector phi, w, p_m, u_c, p_c;
};

/// Steps 1-4 replayed with dense independent assembly (no forcing, natural
/// boundary handling mirrored from the scheme contracts).
Vector dense_step_cahn_hilliard(const Spaces& sp, const ModelParams& m, const SchemeParams& p, const SimState& st);
Vector dense_step_darcy(const Spaces& sp, const ModelParams& m, const SchemeParams& p, const SimState& st,
                        const DiscreteField& w_next);
Vector dense_step_momentum(const Spaces& sp, const ModelParams& m, const SchemeParams& p, const SimState& st,
                           const DiscreteField& phi_next, const DiscreteField& w_next, const DiscreteField& p_m_next);
Vector dense_step_pressure_update(const Spaces& sp, const ModelParams& m, const SchemeParams& p,
                                  const DiscreteField& u_next, const DiscreteField& p_current);

/// The monolithic step including the density fixed-point loop.
DenseStepResult dense_coupled_step(const Spaces& sp, const ModelParams& m, const SchemeParams& p, const SimState& st);

/// Independent scalar basis (values and physical gradients) at a barycentric
/// point of a triangle, from monomial coefficients.
void oracle_basis(const Mesh& mesh, int tri, bool quadratic, const std::array<double, 3>& bary,
                  std::array<double, 6>& values, std::array<Vec2, 6>& grads);

} // namespace chnsd::oracle
