#include "scheme_detail.hpp"

namespace chnsd {

using detail::BcSet;
using detail::BlockMatrix;
using detail::PhaseCoeffs;
using detail::Timer;

struct DecoupledStepper::Impl {
    // constant operators
    CsrMatrix M_Y, S_Y;   // P2 mass / stiffness over the whole domain
    CsrMatrix S_mob;      // (M grad w, grad psi), layer-wise mobility
    CsrMatrix A_w_phi;    // -gamma*eps*S_Y - (gamma/eps)*M_Y
    CsrMatrix G;          // grad-div on Xc
    CsrMatrix B_div;      // (q, div v): rows Qc, cols Xc
    CsrMatrix B_div_T;    // transposed
    CsrMatrix N_int;      // <q, v.n_c>: rows Xc, cols Qm
    CsrMatrix N_int_T;
    CsrMatrix darcy_A;    // K-stiffness + beta*dt stiffness on Qm (unconstrained)
    CsrMatrix M_Qc;       // P1 mass on the conduit
    CsrMatrix M_Vm;       // P1 vector mass on the matrix
    Vector qm_weights;

    BcSet uc_bc, y_outer_bc, pm_bc;

    BlockMatrix ch_block;
    BlockMatrix mom_block;
    FrozenLuSolver ch_solver{1e-12};
    FrozenLuSolver mom_solver{1e-12};
    FrozenLuSolver darcy_solver{1e-12};
    FrozenLuSolver mass_qc_solver{1e-13};
    FrozenLuSolver mass_vm_solver{1e-13};
};

DecoupledStepper::~DecoupledStepper() = default;

DecoupledStepper::DecoupledStepper(const Spaces& spaces, const ModelParams& model, const SchemeParams& params)
    : spaces_(&spaces), model_(&model), params_(&params) {
    model.validate();
    params.validate(model);
    impl_ = std::make_unique<Impl>();
    Impl& s = *impl_;
    const FunctionSpace& Y = spaces.Y;
    const FunctionSpace& Xc = spaces.Xc;

    s.M_Y = assemble_operator(OperatorKind::mass, Y, Y);
    s.S_Y = assemble_operator(OperatorKind::stiffness, Y, Y);
    Coefficients mob;
    mob.tensor = [&model](const QuadCtx& c) {
        return Mat2(model.mobility(c.region == Region::conduit) * Mat2::Identity());
    };
    s.S_mob = assemble_operator(OperatorKind::stiffness, Y, Y, mob);
    s.A_w_phi = csr_sum({{&s.S_Y, -model.gamma * model.epsilon}, {&s.M_Y, -model.gamma / model.epsilon}});

    s.G = assemble_operator(OperatorKind::grad_div, Xc, Xc);
    s.B_div = assemble_operator(OperatorKind::divergence, Xc, spaces.Qc);
    s.B_div_T = s.B_div.transposed();
    s.N_int = assemble_operator(OperatorKind::interface_normal, spaces.Qm, Xc);
    s.N_int_T = s.N_int.transposed();

    Coefficients kcoef;
    kcoef.tensor = [&model](const QuadCtx&) { return model.K; };
    const CsrMatrix S_K = assemble_operator(OperatorKind::stiffness, spaces.Qm, spaces.Qm, kcoef);
    const CsrMatrix S_I = assemble_operator(OperatorKind::stiffness, spaces.Qm, spaces.Qm);
    s.darcy_A = csr_sum({{&S_K, 1.0}, {&S_I, params.beta * params.dt}});
    s.qm_weights = mean_weights(spaces.Qm);

    s.M_Qc = assemble_operator(OperatorKind::mass, spaces.Qc, spaces.Qc);
    s.M_Vm = assemble_operator(OperatorKind::mass, spaces.Vm, spaces.Vm);

    s.uc_bc = detail::vector_bc_set(Xc, boundary_scalar_dofs(Xc, BoundaryTag::gamma_c));
    s.y_outer_bc = detail::scalar_bc_set(Y, boundary_scalar_dofs(Y));
    s.pm_bc = detail::scalar_bc_set(spaces.Qm, boundary_scalar_dofs(spaces.Qm, BoundaryTag::gamma_m));

    s.ch_block.set_layout({Y.n_dofs, Y.n_dofs});
    s.mom_block.set_layout({Xc.n_dofs});
}

namespace {

/// Variable Step-1 block: the w-gradient terms produced by substituting the
/// starred conduit velocity and the new-time Darcy velocity into the
/// transport term.
CsrMatrix assemble_ch_wgrad(const Spaces& spaces, const ModelParams& model, const SchemeParams& params,
                            const DiscreteField& phi_n) {
    PhaseCoeffs pc{&phi_n, &model};
    Coefficients c;
    c.tensor = [&, pc](const QuadCtx& ctx) -> Mat2 {
        const double phi = pc.phi_at(ctx);
        if (ctx.region == Region::conduit)
            return Mat2((params.dt * phi * phi / pc.rho_of(phi)) * Mat2::Identity());
        return Mat2((phi * phi) * model.K);
    };
    return assemble_operator(OperatorKind::stiffness, spaces.Y, spaces.Y, c);
}

} // namespace

std::pair<DiscreteField, DiscreteField> DecoupledStepper::step_cahn_hilliard(const SimState& state,
                                                                             const SchemeForcing* forcing,
                                                                             SubstepReport* report) {
    Timer timer;
    Impl& s = *impl_;
    const Spaces& sp = *spaces_;
    const ModelParams& model = *model_;
    const double dt = params_->dt;
    const double t1 = state.t + dt;
    const int n = sp.Y.n_dofs;

    const CsrMatrix S_var = assemble_ch_wgrad(sp, model, *params_, state.phi);

    BlockMatrix& blk = s.ch_block;
    if (!blk.finalized()) {
        blk.proto_add(0, 0, s.M_Y, 1.0 / dt);
        blk.proto_add(0, 1, s.S_mob);
        blk.proto_add(0, 1, S_var);
        blk.proto_add(1, 0, s.A_w_phi);
        blk.proto_add(1, 1, s.M_Y);
        blk.finalize_pattern();
    } else {
        blk.clear_values();
        blk.add(0, 0, s.M_Y, 1.0 / dt);
        blk.add(0, 1, s.S_mob);
        blk.add(0, 1, S_var);
        blk.add(1, 0, s.A_w_phi);
        blk.add(1, 1, s.M_Y);
    }

    PhaseCoeffs pc{&state.phi, &model};
    // explicit transport: u_c^n in the conduit, -K grad p_m^n (+ K rho g) in the matrix
    VectorCoeff transport = [&](const QuadCtx& ctx) -> Vec2 {
        const double phi = pc.phi_at(ctx);
        if (ctx.region == Region::conduit) return Vec2(phi * eval_vector(state.u_c, ctx.tri, ctx.bary));
        Vec2 vel = -(model.K * eval_scalar_grad(state.p_m, ctx.tri, ctx.bary));
        if (!model.gravity.isZero()) vel += model.K * (pc.rho_of(phi) * model.gravity);
        return Vec2(phi * vel);
    };
    Vector rhs(2 * n);
    rhs.head(n) = s.M_Y.multiply(state.phi.coeffs) / dt + assemble_load_gradient(sp.Y, transport);
    ScalarCoeff f_of_phi = [&](const QuadCtx& ctx) {
        return model.gamma * double_well_f(pc.phi_at(ctx), model.epsilon);
    };
    rhs.tail(n) = s.M_Y.multiply(state.phi.coeffs) * (-model.gamma / model.epsilon) +
                  assemble_load_scalar(sp.Y, f_of_phi);
    if (forcing && forcing->phi_load) rhs.head(n) += forcing->phi_load(t1);
    if (forcing && forcing->w_load) rhs.tail(n) += forcing->w_load(t1);

    SolveStats stats;
    Vector x;
    if (forcing && forcing->mms_dirichlet) {
        SparseSystem sys{blk.matrix(), std::move(rhs)};
        std::vector<int> dofs;
        std::vector<double> vals;
        for (std::size_t i = 0; i < s.y_outer_bc.dofs.size(); ++i) {
            dofs.push_back(s.y_outer_bc.dofs[i]);
            vals.push_back(forcing->phi_bc(s.y_outer_bc.points[i], t1));
            dofs.push_back(n + s.y_outer_bc.dofs[i]);
            vals.push_back(forcing->w_bc(s.y_outer_bc.points[i], t1));
        }
        apply_dirichlet(sys, dofs, vals);
        x = s.ch_solver.solve(sys.A, sys.rhs, &stats);
    } else {
        x = s.ch_solver.solve(blk.matrix(), rhs, &stats);
    }
    detail::fill_report(report, "cahn_hilliard", timer, stats);

    DiscreteField phi_next = make_field(sp.Y), w_next = make_field(sp.Y);
    phi_next.coeffs = x.head(n);
    w_next.coeffs = x.tail(n);
    return {std::move(phi_next), std::move(w_next)};
}

DiscreteField DecoupledStepper::step_darcy_pressure(const SimState& state, const DiscreteField& w_next,
                                                    const SchemeForcing* forcing, SubstepReport* report) {
    Timer timer;
    Impl& s = *impl_;
    const Spaces& sp = *spaces_;
    const ModelParams& model = *model_;
    const double t1 = state.t + params_->dt;
    const int n = sp.Qm.n_dofs;

    PhaseCoeffs pc{&state.phi, &model};
    VectorCoeff g = [&](const QuadCtx& ctx) -> Vec2 {
        const double phi = pc.phi_at(ctx);
        Vec2 v = -(model.K * (phi * eval_scalar_grad(w_next, ctx.tri, ctx.bary)));
        if (!model.gravity.isZero()) v += model.K * (pc.rho_of(phi) * model.gravity);
        return v;
    };
    Vector rhs = assemble_load_gradient(sp.Qm, g) + s.N_int_T.multiply(state.u_c.coeffs);
    if (forcing && forcing->darcy_load) rhs += forcing->darcy_load(t1);

    SolveStats stats;
    Vector x;
    if (forcing && forcing->mms_dirichlet) {
        SparseSystem sys{s.darcy_A, std::move(rhs)};
        std::vector<double> vals;
        for (const Vec2& p : s.pm_bc.points) vals.push_back(forcing->pm_bc(p, t1));
        apply_dirichlet(sys, s.pm_bc.dofs, vals);
        x = s.darcy_solver.solve(sys.A, sys.rhs, &stats);
    } else {
        const SparseSystem bordered = impose_zero_mean({s.darcy_A, rhs}, s.qm_weights);
        x = s.darcy_solver.solve(bordered.A, bordered.rhs, &stats);
        x.conservativeResize(n);
    }
    detail::fill_report(report, "darcy_pressure", timer, stats);

    DiscreteField p_m_next = make_field(sp.Qm);
    p_m_next.coeffs = x.head(n);
    return p_m_next;
}

namespace {

/// Fused element kernel for the momentum left-hand side:
///   (rho_bar/dt) (u, v) + (rho^n (u^n . grad) u, v) + (1/2) (div(rho^n u^n) u, v)
///   + (2 nu^n D(u), D(v)) + (xi/dt) (div u, div v)
CsrMatrix assemble_momentum_domain(const Spaces& spaces, const ModelParams& model, const SchemeParams& params,
                                   const SimState& state, const DiscreteField& phi_next) {
    const FunctionSpace& Xc = spaces.Xc;
    const Mesh& mesh = *spaces.mesh;
    const QuadRule& rule = assembly_rule();
    const BasisTable tab = tabulate_basis(Xc.element, rule);
    const double dt = params.dt;
    const double xi_dt = params.xi / dt;

    auto cell = [&](int t, std::vector<Triplet>& out) {
        int dofs[12];
        Xc.cell_dofs(t, {dofs, 12});
        const Mat2& jt = mesh.jinv_t[t];
        double elem[12][12] = {};
        for (int q = 0; q < rule.n_points(); ++q) {
            const auto& bary = rule.points[q];
            const double w = 2.0 * mesh.tri_area[t] * rule.weights[q];
            const double phi_n = eval_scalar(state.phi, t, bary);
            const double phi_1 = eval_scalar(phi_next, t, bary);
            const double rho_n = mixture(phi_n, model.rho1, model.rho2);
            const double rho_bar = 0.5 * (mixture(phi_1, model.rho1, model.rho2) + rho_n);
            const double nu_n = mixture(phi_n, model.nu1, model.nu2);
            const Vec2 u_n = eval_vector(state.u_c, t, bary);
            const Mat2 grad_u = eval_vector_grad(state.u_c, t, bary);
            const Vec2 grad_phi = eval_scalar_grad(state.phi, t, bary);
            const double div_rho_u = rho_n * (grad_u(0, 0) + grad_u(1, 1)) +
                                     mixture_derivative(phi_n, model.rho1, model.rho2) * grad_phi.dot(u_n);

            Vec2 g[6];
            for (int k = 0; k < 6; ++k) g[k] = jt * tab.ref_grads[q][k];
            const auto& N = tab.values[q];
            for (int i = 0; i < 6; ++i)
                for (int j = 0; j < 6; ++j) {
                    const double same = w * (rho_bar / dt * N[i] * N[j] + rho_n * u_n.dot(g[j]) * N[i] +
                                             0.5 * div_rho_u * N[i] * N[j]);
                    const double gg = g[i].dot(g[j]);
                    for (int ci = 0; ci < 2; ++ci)
                        for (int cj = 0; cj < 2; ++cj) {
                            double v = w * (2.0 * nu_n) * 0.5 * ((ci == cj ? gg : 0.0) + g[j][ci] * g[i][cj]) +
                                       w * xi_dt * g[j][cj] * g[i][ci];
                            if (ci == cj) v += same;
                            elem[2 * i + ci][2 * j + cj] += v;
                        }
                }
        }
        for (int i = 0; i < 12; ++i)
            for (int j = 0; j < 12; ++j) out.push_back({dofs[i], dofs[j], elem[i][j]});
    };

    auto trips = assemble_cells(mesh, [&](int t) { return Xc.covers_tri(t); }, cell);
    return csr_from_triplets(Xc.n_dofs, Xc.n_dofs, std::move(trips));
}

} // namespace

DiscreteField DecoupledStepper::step_momentum(const SimState& state, const DiscreteField& phi_next,
                                              const DiscreteField& w_next, const DiscreteField& p_m_next,
                                              const SchemeForcing* forcing, SubstepReport* report) {
    Timer timer;
    Impl& s = *impl_;
    const Spaces& sp = *spaces_;
    const ModelParams& model = *model_;
    const double dt = params_->dt;
    const double t1 = state.t + dt;

    const CsrMatrix domain = assemble_momentum_domain(sp, model, *params_, state, phi_next);

    PhaseCoeffs pc{&state.phi, &model};
    Coefficients bjs;
    bjs.edge_scalar = [&](const EdgeQuadCtx& ctx) {
        return mixture(eval_scalar(state.phi, ctx.tri_c, ctx.bary_c), model.nu1, model.nu2);
    };
    const CsrMatrix B_bjs = assemble_operator(OperatorKind::interface_bjs, sp.Xc, sp.Xc, bjs);
    Coefficients ifs;
    ifs.edge_velocity = [&](const EdgeQuadCtx& ctx) -> Vec2 {
        const double rho = mixture(eval_scalar(state.phi, ctx.tri_c, ctx.bary_c), model.rho1, model.rho2);
        return Vec2(rho * eval_vector(state.u_c, ctx.tri_c, ctx.bary_c));
    };
    const CsrMatrix B_ifs = assemble_operator(OperatorKind::interface_scalar, sp.Xc, sp.Xc, ifs);

    BlockMatrix& blk = s.mom_block;
    if (!blk.finalized()) {
        blk.proto_add(0, 0, domain);
        blk.proto_add(0, 0, B_bjs, model.alpha_bjs);
        blk.proto_add(0, 0, B_ifs, -1.0);
        blk.finalize_pattern();
    } else {
        blk.clear_values();
        blk.add(0, 0, domain);
        blk.add(0, 0, B_bjs, model.alpha_bjs);
        blk.add(0, 0, B_ifs, -1.0);
    }

    VectorCoeff rhs_body = [&](const QuadCtx& ctx) -> Vec2 {
        const double rho_n = pc.rho(ctx);
        Vec2 v = (rho_n / dt) * eval_vector(state.u_c, ctx.tri, ctx.bary);
        v -= pc.phi_at(ctx) * eval_scalar_grad(w_next, ctx.tri, ctx.bary);
        if (!model.gravity.isZero()) v += rho_n * model.gravity;
        return v;
    };
    Vector rhs = assemble_load_vector(sp.Xc, rhs_body);
    rhs += s.B_div_T.multiply(Vector(2.0 * state.p_c.coeffs - state.p_c_prev.coeffs));
    rhs += (params_->xi / dt) * s.G.multiply(state.u_c.coeffs);
    rhs -= s.N_int.multiply(p_m_next.coeffs);
    if (forcing && forcing->momentum_load) rhs += forcing->momentum_load(t1);

    SparseSystem sys{blk.matrix(), std::move(rhs)};
    std::vector<double> vals(s.uc_bc.dofs.size(), 0.0);
    if (forcing && forcing->mms_dirichlet && forcing->u_bc) {
        for (std::size_t i = 0; i < s.uc_bc.dofs.size(); i += 2) {
            const Vec2 u = forcing->u_bc(s.uc_bc.points[i], t1);
            vals[i] = u.x();
            vals[i + 1] = u.y();
        }
    }
    apply_dirichlet(sys, s.uc_bc.dofs, vals);

    SolveStats stats;
    const Vector x = s.mom_solver.solve(sys.A, sys.rhs, &stats);
    detail::fill_report(report, "momentum", timer, stats);

    DiscreteField u_next = make_field(sp.Xc);
    u_next.coeffs = x;
    return u_next;
}

DiscreteField DecoupledStepper::step_pressure_update(const DiscreteField& u_c_next, const DiscreteField& p_c_current,
                                                     SubstepReport* report) {
    Timer timer;
    Impl& s = *impl_;
    const double zeta = params_->zeta_value(*model_);
    const Vector rhs =
        s.M_Qc.multiply(p_c_current.coeffs) - (zeta / params_->dt) * s.B_div.multiply(u_c_next.coeffs);
    SolveStats stats;
    DiscreteField p_next = make_field(spaces_->Qc);
    p_next.coeffs = s.mass_qc_solver.solve(s.M_Qc, rhs, &stats);
    detail::fill_report(report, "pressure_update", timer, stats);
    return p_next;
}

SimState DecoupledStepper::advance(const SimState& state, const SchemeForcing* forcing, StepReport* report) {
    Timer timer;
    SubstepReport r1, r2, r3, r4;
    auto [phi_next, w_next] = step_cahn_hilliard(state, forcing, &r1);
    DiscreteField p_m_next = step_darcy_pressure(state, w_next, forcing, &r2);
    DiscreteField u_next = step_momentum(state, phi_next, w_next, p_m_next, forcing, &r3);
    DiscreteField p_c_next = step_pressure_update(u_next, state.p_c, &r4);

    SimState next;
    next.t = state.t + params_->dt;
    next.phi = std::move(phi_next);
    next.w = std::move(w_next);
    next.p_m = std::move(p_m_next);
    next.u_c = std::move(u_next);
    next.p_c = std::move(p_c_next);
    next.p_c_prev = state.p_c;

    // visualization velocity from the current pressure
    PhaseCoeffs pc{&next.phi, model_};
    const ModelParams& model = *model_;
    VectorCoeff darcy_vel = [&](const QuadCtx& ctx) -> Vec2 {
        const double phi = pc.phi_at(ctx);
        Vec2 v = -(model.K * (eval_scalar_grad(next.p_m, ctx.tri, ctx.bary) +
                              phi * eval_scalar_grad(next.w, ctx.tri, ctx.bary)));
        if (!model.gravity.isZero()) v += model.K * (pc.rho_of(phi) * model.gravity);
        return v;
    };
    next.u_m = make_field(spaces_->Vm);
    next.u_m.coeffs = impl_->mass_vm_solver.solve(impl_->M_Vm, assemble_load_vector(spaces_->Vm, darcy_vel));

    if (report) {
        report->substeps = {r1, r2, r3, r4};
        report->seconds = timer.seconds();
    }
    return next;
}

DiscreteField recover_darcy_velocity(const Spaces& spaces, const ModelParams& model, const DiscreteField& phi,
                                     const DiscreteField& w, const DiscreteField& p_m) {
    const CsrMatrix M = assemble_operator(OperatorKind::mass, spaces.Vm, spaces.Vm);
    VectorCoeff g = [&](const QuadCtx& ctx) -> Vec2 {
        const double ph = eval_scalar(phi, ctx.tri, ctx.bary);
        Vec2 v = -(model.K *
                   (eval_scalar_grad(p_m, ctx.tri, ctx.bary) + ph * eval_scalar_grad(w, ctx.tri, ctx.bary)));
        if (!model.gravity.isZero()) v += model.K * (mixture(ph, model.rho1, model.rho2) * model.gravity);
        return v;
    };
    SparseSystem sys{M, assemble_load_vector(spaces.Vm, g)};
    DiscreteField out = make_field(spaces.Vm);
    out.coeffs = solve_sparse(sys, {SolveMethod::direct, 1e-11});
    return out;
}

} // namespace chnsd
