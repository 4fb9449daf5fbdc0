#pragma once

#include "chnsd/assembly.hpp"
#include "chnsd/solver.hpp"
#include "chnsd/state.hpp"

#include <functional>
#include <memory>
#include <utility>

namespace chnsd {

/// Optional per-substep right-hand-side functionals plus strong boundary
/// data, used by the manufactured-solution driver. Load builders receive the
/// target time t^{n+1} and return a load vector on the substep's space.
struct SchemeForcing {
    std::function<Vector(double)> phi_load;      // on Y, transport equation
    std::function<Vector(double)> w_load;        // on Y, chemical potential equation
    std::function<Vector(double)> darcy_load;    // on Qm
    std::function<Vector(double)> momentum_load; // on Xc

    /// When set: phi/w take Dirichlet data on the whole outer boundary, u_c on
    /// Gamma_c, p_m on Gamma_m (replacing the zero-mean constraint).
    bool mms_dirichlet = false;
    std::function<double(const Vec2&, double)> phi_bc, w_bc, pm_bc;
    std::function<Vec2(const Vec2&, double)> u_bc;
};

/// One step of the four-substep pressure-stabilized artificial-compressibility
/// scheme. Factorizations and constant operators are cached across steps, so
/// drive a time loop through one stepper instance.
class DecoupledStepper {
  public:
    DecoupledStepper(const Spaces& spaces, const ModelParams& model, const SchemeParams& params);
    ~DecoupledStepper();

    /// Substep 1: one linear block solve for (phi^{n+1}, w^{n+1}).
    std::pair<DiscreteField, DiscreteField> step_cahn_hilliard(const SimState& state,
                                                               const SchemeForcing* forcing = nullptr,
                                                               SubstepReport* report = nullptr);
    /// Substep 2: stabilized Darcy pressure with the lagged interface velocity.
    DiscreteField step_darcy_pressure(const SimState& state, const DiscreteField& w_next,
                                      const SchemeForcing* forcing = nullptr, SubstepReport* report = nullptr);
    /// Substep 3: conduit momentum with explicit pressure extrapolation.
    DiscreteField step_momentum(const SimState& state, const DiscreteField& phi_next, const DiscreteField& w_next,
                                const DiscreteField& p_m_next, const SchemeForcing* forcing = nullptr,
                                SubstepReport* report = nullptr);
    /// Substep 4: explicit pressure update; no boundary conditions anywhere.
    DiscreteField step_pressure_update(const DiscreteField& u_c_next, const DiscreteField& p_c_current,
                                       SubstepReport* report = nullptr);

    SimState advance(const SimState& state, const SchemeForcing* forcing = nullptr, StepReport* report = nullptr);

    const Spaces& spaces() const { return *spaces_; }
    const ModelParams& model() const { return *model_; }
    const SchemeParams& params() const { return *params_; }

  private:
    struct Impl;
    const Spaces* spaces_;
    const ModelParams* model_;
    const SchemeParams* params_;
    std::unique_ptr<Impl> impl_;
};

/// One step of the monolithic scheme: all five fields advance in a single
/// solve, with a short fixed-point loop on the density of the new time level.
class CoupledStepper {
  public:
    CoupledStepper(const Spaces& spaces, const ModelParams& model, const SchemeParams& params);
    ~CoupledStepper();

    SimState advance(const SimState& state, const SchemeForcing* forcing = nullptr, StepReport* report = nullptr);

  private:
    struct Impl;
    const Spaces* spaces_;
    const ModelParams* model_;
    const SchemeParams* params_;
    std::unique_ptr<Impl> impl_;
};

/// L2 projection of the Darcy velocity -K grad p_m - K phi grad w (+ K rho g)
/// onto the P1 vector space. Pass the lagged pressure for the transport
/// velocity of the decoupled scheme, the current one for visualization.
DiscreteField recover_darcy_velocity(const Spaces& spaces, const ModelParams& model, const DiscreteField& phi,
                                     const DiscreteField& w, const DiscreteField& p_m);

} // namespace chnsd
