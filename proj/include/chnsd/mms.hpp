#pragma once

#include "chnsd/diagnostics.hpp"
#include "chnsd/scheme.hpp"

namespace chnsd {

/// Closed-form fields of the accuracy benchmark on [0,1] x [0,2] with the
/// porous layer below the interface line y = 1, plus every derivative the
/// forcing residuals need. All evaluators take physical coordinates.
struct ExactSolution {
    ModelParams model;

    double phi(const Vec2& x, double t) const;
    double phi_t(const Vec2& x, double t) const;
    Vec2 grad_phi(const Vec2& x, double t) const;
    double lap_phi(const Vec2& x, double t) const;
    Vec2 grad_lap_phi(const Vec2& x, double t) const;

    double w(const Vec2& x, double t) const;      // gamma f(phi) - gamma eps lap(phi)
    Vec2 grad_w(const Vec2& x, double t) const;

    Vec2 u(const Vec2& x, double t) const;        // divergence-free conduit velocity
    Vec2 u_t(const Vec2& x, double t) const;
    Mat2 grad_u(const Vec2& x, double t) const;   // (du_i/dx_j)

    double p_c(const Vec2& x, double t) const;
    double p_m(const Vec2& x, double t) const;
    Vec2 grad_p_m(const Vec2& x, double t) const;
};

/// Per-substep forcing functionals: residuals of the continuous weak system
/// evaluated on the exact solution, assembled on the given spaces. Also
/// carries the strong boundary data used in MMS mode.
SchemeForcing make_mms_forcing(const Spaces& spaces, const ExactSolution& ex);

/// Exact fields interpolated at time t (the lagged pressure set equal to the
/// current one).
SimState mms_initial_state(const Spaces& spaces, const ExactSolution& ex, double t = 0.0);

/// The seven error norms of the accuracy study at time t:
/// phi L2/H1, p_m L2/H1, u_c L2/H1, p_c L2.
std::vector<double> mms_errors(const SimState& state, const ExactSolution& ex, double t);

std::vector<std::string> mms_error_names();

} // namespace chnsd
