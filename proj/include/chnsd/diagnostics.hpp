#pragma once

#include "chnsd/physics.hpp"
#include "chnsd/state.hpp"

#include <functional>
#include <optional>

namespace chnsd {

/// One line of the energy history.
struct EnergyRecord {
    double t = 0.0;
    double E = 0.0;          // basic energy
    double E_mod = 0.0;      // modified energy with grad-div/pressure/Darcy terms
    double D = 0.0;          // dissipation of the step ending at t (0 in the first row)
    double phase_mass = 0.0; // integral of phi
    double div_u = 0.0;      // L2 norm of div u_c
};

/// E^n: kinetic energy over the conduit plus the interfacial free energy.
double energy(const SimState& state, const ModelParams& model);

/// E^n + (xi/2)||div u||^2 + (dt^2/(2 zeta))||p_c||^2 + (dt/2)||sqrt(K) grad p_m||^2.
double modified_energy(const SimState& state, const ModelParams& model, const SchemeParams& params);

/// Dissipation of the decoupled scheme: the six-term sum with coefficients
/// frozen at the previous time level.
double dissipation(const SimState& prev, const SimState& next, const ModelParams& model, const SchemeParams& params);

/// Dissipation of the monolithic scheme, with the Darcy velocity evaluated
/// pointwise from the new pressure and chemical potential.
double dissipation_coupled(const SimState& prev, const SimState& next, const ModelParams& model,
                           const SchemeParams& params);

double phase_mass(const SimState& state);
double div_u_norm(const SimState& state);

EnergyRecord make_record(const SimState* prev, const SimState& state, const ModelParams& model,
                         const SchemeParams& params, SchemeKind scheme);

// Quadrature helpers (norm-grade rule, region-filtered).
double integrate(const Mesh& mesh, const std::function<double(int, const std::array<double, 3>&, const Vec2&)>& f,
                 std::optional<Region> region = {}, bool high_order = true);

using ExactScalar = std::function<double(const Vec2&)>;
using ExactVector = std::function<Vec2(const Vec2&)>;
using ExactMatrix = std::function<Mat2(const Vec2&)>;

double error_l2(const DiscreteField& f, const ExactScalar& exact, std::optional<Region> region = {});
double error_h1(const DiscreteField& f, const ExactScalar& exact, const ExactVector& exact_grad,
                std::optional<Region> region = {});
double error_l2_vec(const DiscreteField& f, const ExactVector& exact, std::optional<Region> region = {});
double error_h1_vec(const DiscreteField& f, const ExactVector& exact, const ExactMatrix& exact_grad,
                    std::optional<Region> region = {});
double l2_diff(const DiscreteField& a, const DiscreteField& b);

} // namespace chnsd
