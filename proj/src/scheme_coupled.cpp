#include "scheme_detail.hpp"

#include <cstdio>
#include <cstdlib>

namespace chnsd {

using detail::BcSet;
using detail::BlockMatrix;
using detail::PhaseCoeffs;
using detail::Timer;

struct CoupledStepper::Impl {
    CsrMatrix M_Y, S_Y, S_mob, A_w_phi;
    CsrMatrix S_K;    // Darcy stiffness on Qm
    CsrMatrix B_div;  // (q, div v): rows Qc, cols Xc
    CsrMatrix N_int;  // <q, v.n_c>: rows Xc, cols Qm
    Vector qm_weights;
    BcSet uc_bc, y_outer_bc, pm_bc;
    BlockMatrix blk;
    FrozenLuSolver solver{1e-11};
    bool use_zero_mean = true;
    // block order: 0 = p_m, 1 = u_c, 2 = p_c, 3 = phi, 4 = w (+ multiplier)
    int o_pm = 0, o_u = 0, o_pc = 0, o_phi = 0, o_w = 0, n_total = 0;
};

CoupledStepper::~CoupledStepper() = default;

CoupledStepper::CoupledStepper(const Spaces& spaces, const ModelParams& model, const SchemeParams& params)
    : spaces_(&spaces), model_(&model), params_(&params) {
    model.validate();
    params.validate(model);
    impl_ = std::make_unique<Impl>();
    Impl& s = *impl_;

    s.M_Y = assemble_operator(OperatorKind::mass, spaces.Y, spaces.Y);
    s.S_Y = assemble_operator(OperatorKind::stiffness, spaces.Y, spaces.Y);
    Coefficients mob;
    mob.tensor = [&model](const QuadCtx& c) {
        return Mat2(model.mobility(c.region == Region::conduit) * Mat2::Identity());
    };
    s.S_mob = assemble_operator(OperatorKind::stiffness, spaces.Y, spaces.Y, mob);
    s.A_w_phi = csr_sum({{&s.S_Y, -model.gamma * model.epsilon}, {&s.M_Y, -model.gamma / model.epsilon}});
    Coefficients kcoef;
    kcoef.tensor = [&model](const QuadCtx&) { return model.K; };
    s.S_K = assemble_operator(OperatorKind::stiffness, spaces.Qm, spaces.Qm, kcoef);
    s.B_div = assemble_operator(OperatorKind::divergence, spaces.Xc, spaces.Qc);
    s.N_int = assemble_operator(OperatorKind::interface_normal, spaces.Qm, spaces.Xc);
    s.qm_weights = mean_weights(spaces.Qm);

    s.uc_bc = detail::vector_bc_set(spaces.Xc, boundary_scalar_dofs(spaces.Xc, BoundaryTag::gamma_c));
    s.y_outer_bc = detail::scalar_bc_set(spaces.Y, boundary_scalar_dofs(spaces.Y));
    s.pm_bc = detail::scalar_bc_set(spaces.Qm, boundary_scalar_dofs(spaces.Qm, BoundaryTag::gamma_m));

    s.use_zero_mean = spaces.Qm.constraint == Constraint::zero_mean;
    const int nm = spaces.Qm.n_dofs, nu = spaces.Xc.n_dofs, npc = spaces.Qc.n_dofs, ny = spaces.Y.n_dofs;
    s.o_pm = 0;
    s.o_u = nm;
    s.o_pc = nm + nu;
    s.o_phi = nm + nu + npc;
    s.o_w = nm + nu + npc + ny;
    std::vector<int> layout{nm, nu, npc, ny, ny};
    if (s.use_zero_mean) layout.push_back(1);
    s.blk.set_layout(layout);
    s.n_total = s.blk.size();
}

namespace {

struct StepMatrices {
    CsrMatrix S_phiK;   // (phi^n K grad p, grad q) over the matrix: rows Qm, cols Y
    CsrMatrix GC;       // (phi^n grad w, v) over the conduit: rows Xc, cols Y
    CsrMatrix S_phi2K;  // (phi^n)^2 K stiffness, matrix layer only: rows/cols Y
    CsrMatrix conv_adv; // convection + (1/2) div_advect + viscous terms on Xc
    CsrMatrix B_bjs, B_ifs;
};

StepMatrices assemble_step_matrices(const Spaces& sp, const ModelParams& model, const SimState& state) {
    StepMatrices m;
    PhaseCoeffs pc{&state.phi, &model};

    Coefficients phiK;
    phiK.tensor = [&, pc](const QuadCtx& ctx) { return Mat2(pc.phi_at(ctx) * model.K); };
    m.S_phiK = assemble_operator(OperatorKind::stiffness, sp.Y, sp.Qm, phiK);

    Coefficients gc;
    gc.scalar = [pc](const QuadCtx& ctx) { return pc.phi_at(ctx); };
    m.GC = assemble_operator(OperatorKind::gradient_coupling, sp.Y, sp.Xc, gc);

    Coefficients phi2K;
    phi2K.tensor = [&, pc](const QuadCtx& ctx) -> Mat2 {
        if (ctx.region == Region::conduit) return Mat2::Zero();
        const double phi = pc.phi_at(ctx);
        return Mat2(phi * phi * model.K);
    };
    m.S_phi2K = assemble_operator(OperatorKind::stiffness, sp.Y, sp.Y, phi2K);

    // fused convection + (1/2) div(rho^n u^n) + 2 nu^n D:D on the conduit
    {
        const FunctionSpace& Xc = sp.Xc;
        const Mesh& mesh = *sp.mesh;
        const QuadRule& rule = assembly_rule();
        const BasisTable tab = tabulate_basis(Xc.element, rule);
        auto cell = [&](int t, std::vector<Triplet>& out) {
            int dofs[12];
            Xc.cell_dofs(t, {dofs, 12});
            const Mat2& jt = mesh.jinv_t[t];
            double elem[12][12] = {};
            for (int q = 0; q < rule.n_points(); ++q) {
                const auto& bary = rule.points[q];
                const double w = 2.0 * mesh.tri_area[t] * rule.weights[q];
                const double phi_n = eval_scalar(state.phi, t, bary);
                const double rho_n = mixture(phi_n, model.rho1, model.rho2);
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
                        const double same = w * (rho_n * u_n.dot(g[j]) * N[i] + 0.5 * div_rho_u * N[i] * N[j]);
                        const double gg = g[i].dot(g[j]);
                        for (int ci = 0; ci < 2; ++ci)
                            for (int cj = 0; cj < 2; ++cj) {
                                double v = w * nu_n * ((ci == cj ? gg : 0.0) + g[j][ci] * g[i][cj]);
                                if (ci == cj) v += same;
                                elem[2 * i + ci][2 * j + cj] += v;
                            }
                    }
            }
            for (int i = 0; i < 12; ++i)
                for (int j = 0; j < 12; ++j) out.push_back({dofs[i], dofs[j], elem[i][j]});
        };
        auto trips = assemble_cells(mesh, [&](int t) { return Xc.covers_tri(t); }, cell);
        m.conv_adv = csr_from_triplets(Xc.n_dofs, Xc.n_dofs, std::move(trips));
    }

    Coefficients bjs;
    bjs.edge_scalar = [&](const EdgeQuadCtx& ctx) {
        return mixture(eval_scalar(state.phi, ctx.tri_c, ctx.bary_c), model.nu1, model.nu2);
    };
    m.B_bjs = assemble_operator(OperatorKind::interface_bjs, sp.Xc, sp.Xc, bjs);
    Coefficients ifs;
    ifs.edge_velocity = [&](const EdgeQuadCtx& ctx) -> Vec2 {
        const double rho = mixture(eval_scalar(state.phi, ctx.tri_c, ctx.bary_c), model.rho1, model.rho2);
        return Vec2(rho * eval_vector(state.u_c, ctx.tri_c, ctx.bary_c));
    };
    m.B_ifs = assemble_operator(OperatorKind::interface_scalar, sp.Xc, sp.Xc, ifs);
    return m;
}

} // namespace

SimState CoupledStepper::advance(const SimState& state, const SchemeForcing* forcing, StepReport* report) {
    Timer timer;
    Impl& s = *impl_;
    const Spaces& sp = *spaces_;
    const ModelParams& model = *model_;
    const double dt = params_->dt;
    const double t1 = state.t + dt;
    const int nm = sp.Qm.n_dofs, nu = sp.Xc.n_dofs, ny = sp.Y.n_dofs;

    const StepMatrices sm = assemble_step_matrices(sp, model, state);
    PhaseCoeffs pc{&state.phi, &model};

    // state-only right-hand side pieces
    Vector rhs_base = Vector::Zero(s.n_total);
    {
        if (!model.gravity.isZero()) {
            VectorCoeff g_pm = [&](const QuadCtx& ctx) { return Vec2(model.K * (pc.rho(ctx) * model.gravity)); };
            rhs_base.segment(s.o_pm, nm) += assemble_load_gradient(sp.Qm, g_pm);
            VectorCoeff g_phi = [&](const QuadCtx& ctx) {
                return Vec2(pc.phi_at(ctx) * (model.K * (pc.rho(ctx) * model.gravity)));
            };
            rhs_base.segment(s.o_phi, ny) += dt * assemble_load_gradient(sp.Y, g_phi, Region::matrix);
        }
        rhs_base.segment(s.o_phi, ny) += s.M_Y.multiply(state.phi.coeffs);
        ScalarCoeff f_of_phi = [&](const QuadCtx& ctx) {
            return model.gamma * double_well_f(pc.phi_at(ctx), model.epsilon);
        };
        rhs_base.segment(s.o_w, ny) += s.M_Y.multiply(state.phi.coeffs) * (-model.gamma / model.epsilon) +
                                       assemble_load_scalar(sp.Y, f_of_phi);
        if (forcing) {
            if (forcing->darcy_load) rhs_base.segment(s.o_pm, nm) += forcing->darcy_load(t1);
            if (forcing->momentum_load) rhs_base.segment(s.o_u, nu) += dt * forcing->momentum_load(t1);
            if (forcing->phi_load) rhs_base.segment(s.o_phi, ny) += dt * forcing->phi_load(t1);
            if (forcing->w_load) rhs_base.segment(s.o_w, ny) += forcing->w_load(t1);
        }
    }

    // boundary data
    std::vector<int> bc_dofs;
    std::vector<double> bc_vals;
    const bool mms = forcing && forcing->mms_dirichlet;
    for (std::size_t i = 0; i < s.uc_bc.dofs.size(); i += 2) {
        const Vec2 u = mms && forcing->u_bc ? forcing->u_bc(s.uc_bc.points[i], t1) : Vec2::Zero();
        bc_dofs.push_back(s.o_u + s.uc_bc.dofs[i]);
        bc_vals.push_back(u.x());
        bc_dofs.push_back(s.o_u + s.uc_bc.dofs[i + 1]);
        bc_vals.push_back(u.y());
    }
    if (mms) {
        for (std::size_t i = 0; i < s.pm_bc.dofs.size(); ++i) {
            bc_dofs.push_back(s.o_pm + s.pm_bc.dofs[i]);
            bc_vals.push_back(forcing->pm_bc(s.pm_bc.points[i], t1));
        }
        for (std::size_t i = 0; i < s.y_outer_bc.dofs.size(); ++i) {
            bc_dofs.push_back(s.o_phi + s.y_outer_bc.dofs[i]);
            bc_vals.push_back(forcing->phi_bc(s.y_outer_bc.points[i], t1));
            bc_dofs.push_back(s.o_w + s.y_outer_bc.dofs[i]);
            bc_vals.push_back(forcing->w_bc(s.y_outer_bc.points[i], t1));
        }
    }

    // fixed-point loop on the new-time density entering the time derivative
    Vector phi_iter = state.phi.coeffs;
    DiscreteField phi_iter_field = make_field(sp.Y);
    Vector x;
    SolveStats stats;
    int picard = 0;
    while (true) {
        phi_iter_field.coeffs = phi_iter;
        PhaseCoeffs pi{&phi_iter_field, &model};
        Coefficients rho_new;
        rho_new.scalar = [&, pi](const QuadCtx& ctx) { return pi.rho(ctx); };
        const CsrMatrix M_rho = assemble_operator(OperatorKind::mass, sp.Xc, sp.Xc, rho_new);

        // momentum and transport rows carry a dt factor: pure row scaling
        // that equilibrates the monolithic matrix for the factorization
        BlockMatrix& blk = s.blk;
        if (!blk.finalized()) {
            blk.proto_add(0, 0, s.S_K);
            blk.proto_add(0, 4, sm.S_phiK);
            blk.proto_add(0, 1, s.N_int, -1.0, true);
            blk.proto_add(1, 1, M_rho);
            blk.proto_add(1, 1, sm.conv_adv, dt);
            blk.proto_add(1, 1, sm.B_bjs, dt * model.alpha_bjs);
            blk.proto_add(1, 1, sm.B_ifs, -dt);
            blk.proto_add(1, 2, s.B_div, -dt, true);
            blk.proto_add(1, 0, s.N_int, dt);
            blk.proto_add(1, 4, sm.GC, dt);
            blk.proto_add(2, 1, s.B_div);
            blk.proto_add(3, 3, s.M_Y);
            blk.proto_add(3, 4, s.S_mob, dt);
            blk.proto_add(3, 4, sm.S_phi2K, dt);
            blk.proto_add(3, 1, sm.GC, -dt, true);
            blk.proto_add(3, 0, sm.S_phiK, dt, true);
            blk.proto_add(4, 3, s.A_w_phi);
            blk.proto_add(4, 4, s.M_Y);
            if (s.use_zero_mean) {
                const int last = s.n_total - 1;
                for (int i = 0; i < nm; ++i) {
                    blk.proto_entry(s.o_pm + i, last, s.qm_weights[i]);
                    blk.proto_entry(last, s.o_pm + i, s.qm_weights[i]);
                }
                blk.proto_entry(last, last, 0.0);
            }
            blk.finalize_pattern();
        }
        blk.clear_values();
        blk.add(0, 0, s.S_K);
        blk.add(0, 4, sm.S_phiK);
        blk.add(0, 1, s.N_int, -1.0, true);
        blk.add(1, 1, M_rho);
        blk.add(1, 1, sm.conv_adv, dt);
        blk.add(1, 1, sm.B_bjs, dt * model.alpha_bjs);
        blk.add(1, 1, sm.B_ifs, -dt);
        blk.add(1, 2, s.B_div, -dt, true);
        blk.add(1, 0, s.N_int, dt);
        blk.add(1, 4, sm.GC, dt);
        blk.add(2, 1, s.B_div);
        blk.add(3, 3, s.M_Y);
        blk.add(3, 4, s.S_mob, dt);
        blk.add(3, 4, sm.S_phi2K, dt);
        blk.add(3, 1, sm.GC, -dt, true);
        blk.add(3, 0, sm.S_phiK, dt, true);
        blk.add(4, 3, s.A_w_phi);
        blk.add(4, 4, s.M_Y);
        if (s.use_zero_mean) {
            const int last = s.n_total - 1;
            for (int i = 0; i < nm; ++i) {
                blk.entry(s.o_pm + i, last, s.qm_weights[i]);
                blk.entry(last, s.o_pm + i, s.qm_weights[i]);
            }
        }

        Vector rhs = rhs_base;
        VectorCoeff time_load = [&, pi](const QuadCtx& ctx) -> Vec2 {
            const double sig = std::sqrt(pi.rho(ctx) * pc.rho(ctx));
            Vec2 v = sig * eval_vector(state.u_c, ctx.tri, ctx.bary);
            if (!model.gravity.isZero()) v += dt * pc.rho(ctx) * model.gravity;
            return v;
        };
        rhs.segment(s.o_u, nu) += assemble_load_vector(sp.Xc, time_load);

        SparseSystem sys{blk.matrix(), std::move(rhs)};
        apply_dirichlet(sys, bc_dofs, bc_vals);
        x = s.solver.solve(sys.A, sys.rhs, &stats);
        ++picard;

        const Vector phi_new = x.segment(s.o_phi, ny);
        const double delta = (phi_new - phi_iter).lpNorm<Eigen::Infinity>();
        const double scale = std::max(1.0, phi_iter.lpNorm<Eigen::Infinity>());
        phi_iter = phi_new;
        if (std::getenv("CHNSD_DEBUG_PICARD"))
            std::fprintf(stderr, "picard %d: delta=%.3e resid=%.3e refac=%d\n", picard, delta, stats.rel_residual, stats.refactorizations);
        if (delta <= 1e-12 * scale) break;
        if (picard >= 12)
            throw SolverError("coupled step: density fixed point did not converge (delta " + std::to_string(delta) + ")");
    }

    SimState next;
    next.t = t1;
    next.p_m = make_field(sp.Qm);
    next.p_m.coeffs = x.segment(s.o_pm, nm);
    next.u_c = make_field(sp.Xc);
    next.u_c.coeffs = x.segment(s.o_u, nu);
    next.p_c = make_field(sp.Qc);
    next.p_c.coeffs = x.segment(s.o_pc, sp.Qc.n_dofs);
    next.phi = make_field(sp.Y);
    next.phi.coeffs = x.segment(s.o_phi, ny);
    next.w = make_field(sp.Y);
    next.w.coeffs = x.segment(s.o_w, ny);
    next.p_c_prev = state.p_c;
    next.u_m = recover_darcy_velocity(sp, model, next.phi, next.w, next.p_m);

    if (report) {
        SubstepReport rep;
        rep.name = "coupled_monolithic";
        rep.seconds = timer.seconds();
        rep.iterations = picard;
        rep.rel_residual = stats.rel_residual;
        rep.refactorizations = stats.refactorizations;
        report->substeps = {rep};
        report->seconds = timer.seconds();
    }
    return next;
}

} // namespace chnsd
