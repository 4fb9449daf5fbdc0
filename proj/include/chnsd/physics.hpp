#pragma once

#include "chnsd/common.hpp"

namespace chnsd {

enum class SchemeKind { coupled, decoupled };

/// Physical parameters of the two-phase model.
struct ModelParams {
    double rho1 = 1.0, rho2 = 1.0; // densities of phase +1 / phase -1
    double nu1 = 1.0, nu2 = 1.0;   // kinematic viscosities
    double M_c = 1.0, M_m = 1.0;   // Cahn-Hilliard mobilities per layer
    double gamma = 1.0;            // surface-tension relaxation
    double epsilon = 1.0;          // capillary width
    Mat2 K = Mat2::Identity();     // hydraulic conductivity
    double alpha_bjs = 1.0;        // combined BJS coefficient alpha*sqrt(d)/sqrt(trace(Pi))
    Vec2 gravity = Vec2::Zero();

    double min_rho() const { return rho1 < rho2 ? rho1 : rho2; }
    double mobility(bool conduit) const { return conduit ? M_c : M_m; }
    void validate() const; // throws ConfigError naming the violated rule
};

/// Time-stepping parameters. zeta defaults to min(rho1, rho2)/4 and xi must
/// satisfy xi >= zeta + min(rho1, rho2)/2.
struct SchemeParams {
    double dt = 0.01;
    double T = 1.0;
    double beta = 5.0;
    double xi = 5.0;
    double zeta = -1.0; // negative: derive the default from the densities
    SchemeKind scheme = SchemeKind::decoupled;
    double rel_tol = 1e-10;
    SolveMethod solver = SolveMethod::direct;

    double zeta_value(const ModelParams& m) const { return zeta >= 0.0 ? zeta : 0.25 * m.min_rho(); }
    void validate(const ModelParams& m) const; // throws ConfigError naming the violated rule
};

double mixture(double phi, double a1, double a2);
/// d(mixture)/d(phi): (a1-a2)/2 on the clamped-interior branch, 0 outside.
double mixture_derivative(double phi, double a1, double a2);
double sigma(double phi, const ModelParams& p);

/// Ginzburg-Landau double well (1/(4 eps))(phi^2-1)^2, extended quadratically
/// outside [-1, 1] so that |F''| <= 2/eps everywhere.
double double_well_F(double phi, double epsilon);
/// f = F'.
double double_well_f(double phi, double epsilon);
/// f' = F'' (continuous; piecewise definition).
double double_well_f_prime(double phi, double epsilon);

} // namespace chnsd
