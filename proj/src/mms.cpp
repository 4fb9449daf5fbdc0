#include "chnsd/mms.hpp"

#include <cmath>

namespace chnsd {

namespace {

constexpr double kPi = 3.14159265358979323846;

// c s^2 (s - a)^2 and derivatives
struct QuarticBump {
    double a;
    double c = 16.0;
    double v(double s) const { return c * s * s * (s - a) * (s - a); }
    double d1(double s) const { return 2.0 * c * s * (s - a) * (2.0 * s - a); }
    double d2(double s) const { return c * (12.0 * s * s - 12.0 * a * s + 2.0 * a * a); }
    double d3(double s) const { return c * (24.0 * s - 12.0 * a); }
};

const QuarticBump gx{1.0};        // g(x) = 16 x^2 (x-1)^2
const QuarticBump gy{2.0, 1.0};   // unit amplitude keeps phi in [-1, 1] on the height-2 layer
const QuarticBump gm{1.0};        // g_m(y) = 16 y^2 (y-1)^2

// g_c(y) = 16 (y-1)^2 (y-2)^2 = gx-form in (y-1)
double gc_v(double y) { return gx.v(y - 1.0); }
double gc_d1(double y) { return gx.d1(y - 1.0); }

} // namespace

double ExactSolution::phi(const Vec2& x, double t) const { return gx.v(x.x()) * gy.v(x.y()) * std::cos(kPi * t); }

double ExactSolution::phi_t(const Vec2& x, double t) const {
    return -kPi * gx.v(x.x()) * gy.v(x.y()) * std::sin(kPi * t);
}

Vec2 ExactSolution::grad_phi(const Vec2& x, double t) const {
    const double c = std::cos(kPi * t);
    return {gx.d1(x.x()) * gy.v(x.y()) * c, gx.v(x.x()) * gy.d1(x.y()) * c};
}

double ExactSolution::lap_phi(const Vec2& x, double t) const {
    const double c = std::cos(kPi * t);
    return (gx.d2(x.x()) * gy.v(x.y()) + gx.v(x.x()) * gy.d2(x.y())) * c;
}

Vec2 ExactSolution::grad_lap_phi(const Vec2& x, double t) const {
    const double c = std::cos(kPi * t);
    const double xx = x.x(), yy = x.y();
    return {(gx.d3(xx) * gy.v(yy) + gx.d1(xx) * gy.d2(yy)) * c, (gx.d2(xx) * gy.d1(yy) + gx.v(xx) * gy.d3(yy)) * c};
}

double ExactSolution::w(const Vec2& x, double t) const {
    return model.gamma * double_well_f(phi(x, t), model.epsilon) - model.gamma * model.epsilon * lap_phi(x, t);
}

Vec2 ExactSolution::grad_w(const Vec2& x, double t) const {
    const double fp = double_well_f_prime(phi(x, t), model.epsilon);
    return Vec2(model.gamma * fp * grad_phi(x, t) - model.gamma * model.epsilon * grad_lap_phi(x, t));
}

Vec2 ExactSolution::u(const Vec2& x, double t) const {
    const double c = std::cos(kPi * t);
    const double ym = x.y() - 1.0;
    return {x.x() * x.x() * ym * ym * c, -(2.0 / 3.0) * x.x() * ym * ym * ym * c};
}

Vec2 ExactSolution::u_t(const Vec2& x, double t) const {
    const double s = -kPi * std::sin(kPi * t);
    const double ym = x.y() - 1.0;
    return {x.x() * x.x() * ym * ym * s, -(2.0 / 3.0) * x.x() * ym * ym * ym * s};
}

Mat2 ExactSolution::grad_u(const Vec2& x, double t) const {
    const double c = std::cos(kPi * t);
    const double ym = x.y() - 1.0;
    Mat2 g;
    g << 2.0 * x.x() * ym * ym, 2.0 * x.x() * x.x() * ym, -(2.0 / 3.0) * ym * ym * ym, -2.0 * x.x() * ym * ym;
    return c * g;
}

double ExactSolution::p_c(const Vec2& x, double t) const { return gx.v(x.x()) * gc_v(x.y()) * std::cos(kPi * t); }

double ExactSolution::p_m(const Vec2& x, double t) const { return gx.v(x.x()) * gm.v(x.y()) * std::cos(kPi * t); }

Vec2 ExactSolution::grad_p_m(const Vec2& x, double t) const {
    const double c = std::cos(kPi * t);
    return {gx.d1(x.x()) * gm.v(x.y()) * c, gx.v(x.x()) * gm.d1(x.y()) * c};
}

SchemeForcing make_mms_forcing(const Spaces& spaces, const ExactSolution& ex) {
    SchemeForcing forcing;
    const ModelParams model = ex.model;

    forcing.phi_load = [&spaces, ex, model](double t) {
        // (phi_t, psi) - (u phi, grad psi) + (M grad w, grad psi)
        Vector load = assemble_load_scalar(spaces.Y, [&](const QuadCtx& c) { return ex.phi_t(c.x, t); });
        load += assemble_load_gradient(spaces.Y, [&](const QuadCtx& c) -> Vec2 {
            const double M = model.mobility(c.region == Region::conduit);
            Vec2 vel;
            if (c.region == Region::conduit)
                vel = ex.u(c.x, t);
            else
                vel = -(model.K * (ex.grad_p_m(c.x, t) + ex.phi(c.x, t) * ex.grad_w(c.x, t)));
            return Vec2(M * ex.grad_w(c.x, t) - ex.phi(c.x, t) * vel);
        });
        return load;
    };

    forcing.w_load = [&spaces, ex, model](double t) {
        // (w, omega) - gamma eps (grad phi, grad omega) - gamma (f(phi), omega); zero up to quadrature
        Vector load = assemble_load_scalar(spaces.Y, [&](const QuadCtx& c) {
            return ex.w(c.x, t) - model.gamma * double_well_f(ex.phi(c.x, t), model.epsilon);
        });
        load += assemble_load_gradient(spaces.Y, [&](const QuadCtx& c) {
            return Vec2(-model.gamma * model.epsilon * ex.grad_phi(c.x, t));
        });
        return load;
    };

    forcing.darcy_load = [&spaces, ex, model](double t) {
        // (K grad p_m, grad q) + (K phi grad w, grad q) - <u . n_c, q>
        Vector load = assemble_load_gradient(spaces.Qm, [&](const QuadCtx& c) {
            return Vec2(model.K * (ex.grad_p_m(c.x, t) + ex.phi(c.x, t) * ex.grad_w(c.x, t)));
        });
        load -= assemble_edge_load_scalar(spaces.Qm,
                                          [&](const EdgeQuadCtx& c) { return ex.u(c.x, t).dot(c.normal_c); });
        return load;
    };

    forcing.momentum_load = [&spaces, ex, model](double t) {
        Vector load = assemble_load_vector(spaces.Xc, [&](const QuadCtx& c) -> Vec2 {
            const double phi = ex.phi(c.x, t);
            const double rho = mixture(phi, model.rho1, model.rho2);
            const double rho_t = mixture_derivative(phi, model.rho1, model.rho2) * ex.phi_t(c.x, t);
            const Vec2 grad_rho = Vec2(mixture_derivative(phi, model.rho1, model.rho2) * ex.grad_phi(c.x, t));
            const Vec2 uv = ex.u(c.x, t);
            const Mat2 gu = ex.grad_u(c.x, t);
            // sigma d_t(sigma u) = rho u_t + (rho_t/2) u; div u = 0 so div(rho u) = grad(rho) . u
            Vec2 v = rho * ex.u_t(c.x, t) + 0.5 * rho_t * uv;
            v += rho * (gu * uv); // (u . grad) u, row convention (du_i/dx_j) u_j
            v += phi * ex.grad_w(c.x, t);
            v += 0.5 * grad_rho.dot(uv) * uv;
            return v;
        });
        load += assemble_load_tensor(spaces.Xc, [&](const QuadCtx& c) -> Mat2 {
            const double nu = mixture(ex.phi(c.x, t), model.nu1, model.nu2);
            const Mat2 gu = ex.grad_u(c.x, t);
            return Mat2(nu * (gu + gu.transpose())); // 2 nu D(u)
        });
        load += assemble_load_divergence(spaces.Xc, [&](const QuadCtx& c) { return -ex.p_c(c.x, t); });
        load += assemble_edge_load_normal(spaces.Xc, [&](const EdgeQuadCtx& c) {
            const double rho = mixture(ex.phi(c.x, t), model.rho1, model.rho2);
            return ex.p_m(c.x, t) - 0.5 * rho * ex.u(c.x, t).squaredNorm();
        });
        load += assemble_edge_load_vector(spaces.Xc, [&](const EdgeQuadCtx& c) -> Vec2 {
            const double nu = mixture(ex.phi(c.x, t), model.nu1, model.nu2);
            return {model.alpha_bjs * nu * ex.u(c.x, t).x(), 0.0}; // tau = (1, 0)
        });
        return load;
    };

    forcing.mms_dirichlet = true;
    forcing.phi_bc = [ex](const Vec2& x, double t) { return ex.phi(x, t); };
    forcing.w_bc = [ex](const Vec2& x, double t) { return ex.w(x, t); };
    forcing.pm_bc = [ex](const Vec2& x, double t) { return ex.p_m(x, t); };
    forcing.u_bc = [ex](const Vec2& x, double t) { return ex.u(x, t); };
    return forcing;
}

SimState mms_initial_state(const Spaces& spaces, const ExactSolution& ex, double t) {
    SimState st = make_state(spaces);
    st.t = t;
    st.phi = interpolate(spaces.Y, [&](const Vec2& x) { return ex.phi(x, t); });
    st.w = interpolate(spaces.Y, [&](const Vec2& x) { return ex.w(x, t); });
    st.u_c = interpolate_vector(spaces.Xc, [&](const Vec2& x) { return ex.u(x, t); });
    st.p_c = interpolate(spaces.Qc, [&](const Vec2& x) { return ex.p_c(x, t); });
    st.p_c_prev = st.p_c;
    st.p_m = interpolate(spaces.Qm, [&](const Vec2& x) { return ex.p_m(x, t); });
    st.u_m = make_field(spaces.Vm);
    return st;
}

std::vector<double> mms_errors(const SimState& state, const ExactSolution& ex, double t) {
    auto sphi = [&](const Vec2& x) { return ex.phi(x, t); };
    auto gphi = [&](const Vec2& x) { return ex.grad_phi(x, t); };
    auto spm = [&](const Vec2& x) { return ex.p_m(x, t); };
    auto gpm = [&](const Vec2& x) { return ex.grad_p_m(x, t); };
    auto su = [&](const Vec2& x) { return ex.u(x, t); };
    auto gu = [&](const Vec2& x) { return ex.grad_u(x, t); };
    auto spc = [&](const Vec2& x) { return ex.p_c(x, t); };
    return {
        error_l2(state.phi, sphi),         error_h1(state.phi, sphi, gphi),
        error_l2(state.p_m, spm),          error_h1(state.p_m, spm, gpm),
        error_l2_vec(state.u_c, su),       error_h1_vec(state.u_c, su, gu),
        error_l2(state.p_c, spc),
    };
}

std::vector<std::string> mms_error_names() {
    return {"phi_L2", "phi_H1", "pm_L2", "pm_H1", "uc_L2", "uc_H1", "pc_L2"};
}

} // namespace chnsd
