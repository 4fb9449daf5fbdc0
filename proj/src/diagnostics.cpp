#include "chnsd/diagnostics.hpp"

#include "chnsd/assembly.hpp"
#include "chnsd/quadrature.hpp"

#include <cmath>

namespace chnsd {

double integrate(const Mesh& mesh, const std::function<double(int, const std::array<double, 3>&, const Vec2&)>& f,
                 std::optional<Region> region, bool high_order) {
    const QuadRule& rule = high_order ? norm_rule() : assembly_rule();
    double sum = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        if (region && mesh.region[t] != *region) continue;
        for (int q = 0; q < rule.n_points(); ++q)
            sum += 2.0 * mesh.tri_area[t] * rule.weights[q] * f(t, rule.points[q], mesh.point_of(t, rule.points[q]));
    }
    return sum;
}

namespace {

/// Interface integral of a pointwise integrand evaluated with the assembly
/// edge rule (matches the BJS operator's quadrature).
double integrate_interface(const Mesh& mesh, const std::function<double(int, const std::array<double, 3>&)>& f_on_c) {
    const QuadRule& rule = assembly_rule();
    double sum = 0.0;
    for (const auto& e : mesh.interface_edges) {
        const double len = (mesh.nodes[e.b] - mesh.nodes[e.a]).norm();
        for (int q = 0; q < rule.n_edge_points(); ++q) {
            const Vec2 x = mesh.nodes[e.a] + rule.edge_points[q] * (mesh.nodes[e.b] - mesh.nodes[e.a]);
            sum += rule.edge_weights[q] * len * f_on_c(e.tri_c, barycentric_of(mesh, e.tri_c, x));
        }
    }
    return sum;
}

double sym_grad_sq(const Mat2& g) {
    const Mat2 d = 0.5 * (g + g.transpose());
    return d.squaredNorm();
}

} // namespace

double energy(const SimState& state, const ModelParams& model) {
    const Mesh& mesh = *state.phi.space->mesh;
    // the assembly rule keeps the value consistent with the scheme's identities
    const double kinetic = integrate(
        mesh,
        [&](int t, const std::array<double, 3>& b, const Vec2&) {
            const double rho = mixture(eval_scalar(state.phi, t, b), model.rho1, model.rho2);
            return 0.5 * rho * eval_vector(state.u_c, t, b).squaredNorm();
        },
        Region::conduit, false);
    const double free_energy = integrate(
        mesh,
        [&](int t, const std::array<double, 3>& b, const Vec2&) {
            const double phi = eval_scalar(state.phi, t, b);
            const Vec2 gphi = eval_scalar_grad(state.phi, t, b);
            return model.gamma * (0.5 * model.epsilon * gphi.squaredNorm() + double_well_F(phi, model.epsilon));
        },
        {}, false);
    return kinetic + free_energy;
}

double modified_energy(const SimState& state, const ModelParams& model, const SchemeParams& params) {
    const Mesh& mesh = *state.phi.space->mesh;
    const double dt = params.dt;
    const double zeta = params.zeta_value(model);
    const double div_term = integrate(
        mesh,
        [&](int t, const std::array<double, 3>& b, const Vec2&) {
            const double d = eval_vector_div(state.u_c, t, b);
            return d * d;
        },
        Region::conduit, false);
    const double pc_term = integrate(
        mesh,
        [&](int t, const std::array<double, 3>& b, const Vec2&) {
            const double p = eval_scalar(state.p_c, t, b);
            return p * p;
        },
        Region::conduit, false);
    const double pm_term = integrate(
        mesh,
        [&](int t, const std::array<double, 3>& b, const Vec2&) {
            const Vec2 g = eval_scalar_grad(state.p_m, t, b);
            return g.dot(model.K * g);
        },
        Region::matrix, false);
    return energy(state, model) + 0.5 * params.xi * div_term + 0.5 * dt * dt / zeta * pc_term + 0.5 * dt * pm_term;
}

double dissipation(const SimState& prev, const SimState& next, const ModelParams& model, const SchemeParams& params) {
    const Mesh& mesh = *prev.phi.space->mesh;
    const double dt = params.dt;
    const double zeta = params.zeta_value(model);

    const double viscous = integrate(
        mesh,
        [&](int t, const std::array<double, 3>& b, const Vec2&) {
            const double nu_n = mixture(eval_scalar(prev.phi, t, b), model.nu1, model.nu2);
            return 2.0 * nu_n * sym_grad_sq(eval_vector_grad(next.u_c, t, b));
        },
        Region::conduit, false);
    const double mobility = integrate(
        mesh,
        [&](int t, const std::array<double, 3>& b, const Vec2&) {
            const double M = model.mobility(mesh.region[t] == Region::conduit);
            return M * eval_scalar_grad(next.w, t, b).squaredNorm();
        },
        {}, false);
    const double phi_jump = integrate(
        mesh,
        [&](int t, const std::array<double, 3>& b, const Vec2&) {
            return (eval_scalar_grad(next.phi, t, b) - eval_scalar_grad(prev.phi, t, b)).squaredNorm();
        },
        {}, false);
    const double pc_inc = integrate(
        mesh,
        [&](int t, const std::array<double, 3>& b, const Vec2&) {
            const double d = eval_scalar(prev.p_c, t, b) - eval_scalar(prev.p_c_prev, t, b);
            return d * d;
        },
        Region::conduit, false);
    const double pm_inc = integrate(
        mesh,
        [&](int t, const std::array<double, 3>& b, const Vec2&) {
            const Vec2 g = eval_scalar_grad(next.p_m, t, b) - eval_scalar_grad(prev.p_m, t, b);
            return g.dot(model.K * g);
        },
        Region::matrix, false);
    const double bjs = integrate_interface(mesh, [&](int tc, const std::array<double, 3>& b) {
        const double nu_n = mixture(eval_scalar(prev.phi, tc, b), model.nu1, model.nu2);
        const double ut = eval_vector(next.u_c, tc, b).x(); // tau = (1, 0)
        return nu_n * ut * ut;
    });

    return dt * viscous + dt * mobility + 0.5 * model.gamma * model.epsilon * phi_jump +
           0.5 * dt * dt / zeta * pc_inc + 0.25 * dt * pm_inc + dt * model.alpha_bjs * bjs;
}

double dissipation_coupled(const SimState& prev, const SimState& next, const ModelParams& model,
                           const SchemeParams& params) {
    const Mesh& mesh = *prev.phi.space->mesh;
    const double dt = params.dt;

    const double kinetic_jump = integrate(
        mesh,
        [&](int t, const std::array<double, 3>& b, const Vec2&) {
            const double s1 = std::sqrt(mixture(eval_scalar(next.phi, t, b), model.rho1, model.rho2));
            const double s0 = std::sqrt(mixture(eval_scalar(prev.phi, t, b), model.rho1, model.rho2));
            return 0.5 * (s1 * eval_vector(next.u_c, t, b) - s0 * eval_vector(prev.u_c, t, b)).squaredNorm();
        },
        Region::conduit, false);
    const double viscous = integrate(
        mesh,
        [&](int t, const std::array<double, 3>& b, const Vec2&) {
            const double nu_n = mixture(eval_scalar(prev.phi, t, b), model.nu1, model.nu2);
            return 2.0 * nu_n * sym_grad_sq(eval_vector_grad(next.u_c, t, b));
        },
        Region::conduit, false);
    const double darcy = integrate(
        mesh,
        [&](int t, const std::array<double, 3>& b, const Vec2&) {
            const Vec2 flux = eval_scalar_grad(next.p_m, t, b) +
                              eval_scalar(prev.phi, t, b) * eval_scalar_grad(next.w, t, b);
            return flux.dot(model.K * flux); // |K^{-1/2} u_m|^2 for u_m = -K flux
        },
        Region::matrix, false);
    const double mobility = integrate(
        mesh,
        [&](int t, const std::array<double, 3>& b, const Vec2&) {
            const double M = model.mobility(mesh.region[t] == Region::conduit);
            return M * eval_scalar_grad(next.w, t, b).squaredNorm();
        },
        {}, false);
    const double phi_jump = integrate(
        mesh,
        [&](int t, const std::array<double, 3>& b, const Vec2&) {
            return (eval_scalar_grad(next.phi, t, b) - eval_scalar_grad(prev.phi, t, b)).squaredNorm();
        },
        {}, false);
    const double bjs = integrate_interface(mesh, [&](int tc, const std::array<double, 3>& b) {
        const double nu_n = mixture(eval_scalar(prev.phi, tc, b), model.nu1, model.nu2);
        const double ut = eval_vector(next.u_c, tc, b).x();
        return nu_n * ut * ut;
    });

    return kinetic_jump + dt * viscous + dt * darcy + dt * mobility +
           0.5 * model.gamma * model.epsilon * phi_jump + dt * model.alpha_bjs * bjs;
}

double phase_mass(const SimState& state) {
    const Mesh& mesh = *state.phi.space->mesh;
    return integrate(
        mesh, [&](int t, const std::array<double, 3>& b, const Vec2&) { return eval_scalar(state.phi, t, b); }, {},
        false);
}

double div_u_norm(const SimState& state) {
    const Mesh& mesh = *state.phi.space->mesh;
    const double v = integrate(
        mesh,
        [&](int t, const std::array<double, 3>& b, const Vec2&) {
            const double d = eval_vector_div(state.u_c, t, b);
            return d * d;
        },
        Region::conduit, false);
    return std::sqrt(v);
}

EnergyRecord make_record(const SimState* prev, const SimState& state, const ModelParams& model,
                         const SchemeParams& params, SchemeKind scheme) {
    EnergyRecord r;
    r.t = state.t;
    r.E = energy(state, model);
    r.E_mod = modified_energy(state, model, params);
    r.D = prev ? (scheme == SchemeKind::decoupled ? dissipation(*prev, state, model, params)
                                                  : dissipation_coupled(*prev, state, model, params))
               : 0.0;
    r.phase_mass = phase_mass(state);
    r.div_u = div_u_norm(state);
    return r;
}

namespace {

std::optional<Region> space_region_filter(const FunctionSpace& s, std::optional<Region> requested) {
    if (requested) return requested;
    if (s.region == SpaceRegion::conduit) return Region::conduit;
    if (s.region == SpaceRegion::matrix) return Region::matrix;
    return {};
}

} // namespace

double error_l2(const DiscreteField& f, const ExactScalar& exact, std::optional<Region> region) {
    const auto filt = space_region_filter(*f.space, region);
    const double v = integrate(*f.space->mesh, [&](int t, const std::array<double, 3>& b, const Vec2& x) {
        const double e = eval_scalar(f, t, b) - exact(x);
        return e * e;
    }, filt);
    return std::sqrt(v);
}

double error_h1(const DiscreteField& f, const ExactScalar& exact, const ExactVector& exact_grad,
                std::optional<Region> region) {
    const auto filt = space_region_filter(*f.space, region);
    const double v = integrate(*f.space->mesh, [&](int t, const std::array<double, 3>& b, const Vec2& x) {
        const double e = eval_scalar(f, t, b) - exact(x);
        const Vec2 g = eval_scalar_grad(f, t, b) - exact_grad(x);
        return e * e + g.squaredNorm();
    }, filt);
    return std::sqrt(v);
}

double error_l2_vec(const DiscreteField& f, const ExactVector& exact, std::optional<Region> region) {
    const auto filt = space_region_filter(*f.space, region);
    const double v = integrate(*f.space->mesh, [&](int t, const std::array<double, 3>& b, const Vec2& x) {
        return (eval_vector(f, t, b) - exact(x)).squaredNorm();
    }, filt);
    return std::sqrt(v);
}

double error_h1_vec(const DiscreteField& f, const ExactVector& exact, const ExactMatrix& exact_grad,
                    std::optional<Region> region) {
    const auto filt = space_region_filter(*f.space, region);
    const double v = integrate(*f.space->mesh, [&](int t, const std::array<double, 3>& b, const Vec2& x) {
        const Vec2 e = eval_vector(f, t, b) - exact(x);
        const Mat2 g = eval_vector_grad(f, t, b) - exact_grad(x);
        return e.squaredNorm() + g.squaredNorm();
    }, filt);
    return std::sqrt(v);
}

double l2_diff(const DiscreteField& a, const DiscreteField& b) {
    if (a.space != b.space) throw AssemblyError("l2_diff: fields on different spaces");
    const auto filt = space_region_filter(*a.space, {});
    const bool vec = a.space->is_vector_space();
    const double v = integrate(*a.space->mesh, [&](int t, const std::array<double, 3>& bc, const Vec2&) {
        if (vec) return (eval_vector(a, t, bc) - eval_vector(b, t, bc)).squaredNorm();
        const double e = eval_scalar(a, t, bc) - eval_scalar(b, t, bc);
        return e * e;
    }, filt);
    return std::sqrt(v);
}

} // namespace chnsd
