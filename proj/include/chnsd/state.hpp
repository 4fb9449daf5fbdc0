#pragma once

#include "chnsd/fields.hpp"
#include "chnsd/physics.hpp"

#include <string>
#include <vector>

namespace chnsd {

/// The five discrete spaces of the model on one mesh. In MMS mode the Darcy
/// pressure trades its zero-mean constraint for boundary data.
struct Spaces {
    const Mesh* mesh = nullptr;
    FunctionSpace Y;  // P2 scalar on the whole domain: phi, w
    FunctionSpace Xc; // P2 vector on the conduit: u_c (Taylor-Hood velocity)
    FunctionSpace Qc; // P1 scalar on the conduit: p_c
    FunctionSpace Qm; // P1 scalar on the matrix: p_m
    FunctionSpace Vm; // P1 vector on the matrix: recovered Darcy velocity
};

Spaces make_spaces(const Mesh& mesh, bool mms_mode = false);

/// Discrete fields at one time level. p_c_prev carries the lagged pressure
/// for the 2 p^n - p^{n-1} extrapolation and equals p_c at t = 0.
struct SimState {
    double t = 0.0;
    DiscreteField phi, w, u_c, p_c, p_c_prev, p_m, u_m;
};

SimState make_state(const Spaces& spaces);

struct SubstepReport {
    std::string name;
    double seconds = 0.0;
    int iterations = 0;
    double rel_residual = 0.0;
    int refactorizations = 0;
};

struct StepReport {
    std::vector<SubstepReport> substeps;
    double seconds = 0.0;
};

} // namespace chnsd
