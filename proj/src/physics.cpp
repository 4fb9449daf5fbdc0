#include "chnsd/physics.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace chnsd {

void ModelParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) throw ConfigError(std::string(name) + " must be positive");
    };
    positive(rho1, "rho1");
    positive(rho2, "rho2");
    positive(nu1, "nu1");
    positive(nu2, "nu2");
    positive(M_c, "M_c");
    positive(M_m, "M_m");
    positive(gamma, "gamma");
    positive(epsilon, "epsilon");
    if (std::abs(K(0, 1) - K(1, 0)) > 1e-14 * (1.0 + K.norm())) throw ConfigError("K must be symmetric");
    Eigen::SelfAdjointEigenSolver<Mat2> eig(K);
    if (!(eig.eigenvalues().minCoeff() > 0.0)) throw ConfigError("K must be positive definite");
    if (alpha_bjs < 0.0) throw ConfigError("alpha_bjs must be nonnegative");
}

void SchemeParams::validate(const ModelParams& m) const {
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(T > 0.0)) throw ConfigError("T must be positive");
    if (!(beta > 0.0)) throw ConfigError("beta must be positive");
    if (!(rel_tol > 0.0)) throw ConfigError("rel_tol must be positive");
    const double z = zeta_value(m);
    if (!(z > 0.0)) throw ConfigError("zeta must be positive");
    if (xi < z + 0.5 * m.min_rho())
        throw ConfigError("xi < zeta + min(rho)/2 (stability requirement on the grad-div coefficient)");
}

double mixture(double phi, double a1, double a2) {
    const double c = phi < -1.0 ? -1.0 : (phi > 1.0 ? 1.0 : phi);
    return 0.5 * (a1 - a2) * c + 0.5 * (a1 + a2);
}

double mixture_derivative(double phi, double a1, double a2) {
    if (phi < -1.0 || phi > 1.0) return 0.0;
    return 0.5 * (a1 - a2);
}

double sigma(double phi, const ModelParams& p) { return std::sqrt(mixture(phi, p.rho1, p.rho2)); }

double double_well_F(double phi, double epsilon) {
    if (phi > 1.0) return (phi - 1.0) * (phi - 1.0) / epsilon;
    if (phi < -1.0) return (phi + 1.0) * (phi + 1.0) / epsilon;
    const double s = phi * phi - 1.0;
    return 0.25 * s * s / epsilon;
}

double double_well_f(double phi, double epsilon) {
    if (phi > 1.0) return 2.0 * (phi - 1.0) / epsilon;
    if (phi < -1.0) return 2.0 * (phi + 1.0) / epsilon;
    return phi * (phi * phi - 1.0) / epsilon;
}

double double_well_f_prime(double phi, double epsilon) {
    if (phi > 1.0 || phi < -1.0) return 2.0 / epsilon;
    return (3.0 * phi * phi - 1.0) / epsilon;
}

} // namespace chnsd
