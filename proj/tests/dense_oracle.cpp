#include "dense_oracle.hpp"

#include "chnsd/quadrature.hpp"

namespace chnsd::oracle {

namespace {

using Eigen::MatrixXd;

std::array<Vec2, 6> support_points(const Mesh& mesh, int tri, bool quadratic) {
    const auto c = mesh.tri_coords(tri);
    std::array<Vec2, 6> pts{c[0], c[1], c[2], Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
    if (quadratic) {
        pts[3] = 0.5 * (c[0] + c[1]);
        pts[4] = 0.5 * (c[1] + c[2]);
        pts[5] = 0.5 * (c[2] + c[0]);
    }
    return pts;
}

} // namespace

void oracle_basis(const Mesh& mesh, int tri, bool quadratic, const std::array<double, 3>& bary,
                  std::array<double, 6>& values, std::array<Vec2, 6>& grads) {
    const int n = quadratic ? 6 : 3;
    const auto pts = support_points(mesh, tri, quadratic);
    auto monomials = [n](const Vec2& p, double* m) {
        m[0] = 1.0;
        m[1] = p.x();
        m[2] = p.y();
        if (n == 6) {
            m[3] = p.x() * p.x();
            m[4] = p.x() * p.y();
            m[5] = p.y() * p.y();
        }
    };
    MatrixXd V(n, n);
    double mono[6];
    for (int k = 0; k < n; ++k) {
        monomials(pts[k], mono);
        for (int j = 0; j < n; ++j) V(k, j) = mono[j];
    }
    const MatrixXd C = V.transpose().fullPivLu().inverse(); // N_i = sum_j C(i, j) m_j

    const Vec2 x = mesh.point_of(tri, bary);
    monomials(x, mono);
    double dmx[6] = {0, 1, 0, 2 * x.x(), x.y(), 0};
    double dmy[6] = {0, 0, 1, 0, x.x(), 2 * x.y()};
    for (int i = 0; i < n; ++i) {
        values[i] = 0.0;
        grads[i] = Vec2::Zero();
        for (int j = 0; j < n; ++j) {
            values[i] += C(i, j) * mono[j];
            grads[i] += C(i, j) * Vec2(dmx[j], dmy[j]);
        }
    }
}

namespace {

struct FieldAt {
    double value = 0.0;
    Vec2 grad = Vec2::Zero();
};

FieldAt eval_scalar_oracle(const DiscreteField& f, int tri, const std::array<double, 3>& bary) {
    const bool quad = scalar_shape_count(f.space->element) == 6;
    std::array<double, 6> N;
    std::array<Vec2, 6> G;
    oracle_basis(*f.space->mesh, tri, quad, bary, N, G);
    int dofs[6];
    const int n = quad ? 6 : 3;
    f.space->cell_dofs(tri, {dofs, static_cast<std::size_t>(n)});
    FieldAt out;
    for (int i = 0; i < n; ++i) {
        out.value += f.coeffs[dofs[i]] * N[i];
        out.grad += f.coeffs[dofs[i]] * G[i];
    }
    return out;
}

struct VecFieldAt {
    Vec2 value = Vec2::Zero();
    Mat2 grad = Mat2::Zero(); // (du_i/dx_j)
};

VecFieldAt eval_vector_oracle(const DiscreteField& f, int tri, const std::array<double, 3>& bary) {
    const bool quad = scalar_shape_count(f.space->element) == 6;
    std::array<double, 6> N;
    std::array<Vec2, 6> G;
    oracle_basis(*f.space->mesh, tri, quad, bary, N, G);
    const int n = quad ? 6 : 3;
    int dofs[12];
    f.space->cell_dofs(tri, {dofs, static_cast<std::size_t>(2 * n)});
    VecFieldAt out;
    for (int i = 0; i < n; ++i) {
        const Vec2 u(f.coeffs[dofs[2 * i]], f.coeffs[dofs[2 * i + 1]]);
        out.value += N[i] * u;
        out.grad.row(0) += u.x() * G[i].transpose();
        out.grad.row(1) += u.y() * G[i].transpose();
    }
    return out;
}

std::array<double, 3> bary_of(const Mesh& mesh, int tri, const Vec2& x) {
    const auto c = mesh.tri_coords(tri);
    Mat2 J;
    J << c[1].x() - c[0].x(), c[2].x() - c[0].x(), c[1].y() - c[0].y(), c[2].y() - c[0].y();
    const Vec2 r = J.fullPivLu().solve(x - c[0]);
    return {1.0 - r.x() - r.y(), r.x(), r.y()};
}

/// Runs fn(tri, bary, physical weight) over quadrature points of triangles in
/// the given region (or everywhere).
template <typename Fn>
void for_quad(const Mesh& mesh, std::optional<Region> region, Fn fn) {
    const QuadRule& rule = assembly_rule();
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        if (region && mesh.region[t] != *region) continue;
        for (int q = 0; q < rule.n_points(); ++q) fn(t, rule.points[q], 2.0 * mesh.tri_area[t] * rule.weights[q]);
    }
}

template <typename Fn>
void for_edge_quad(const Mesh& mesh, Fn fn) {
    const QuadRule& rule = assembly_rule();
    for (const auto& e : mesh.interface_edges) {
        const double len = (mesh.nodes[e.b] - mesh.nodes[e.a]).norm();
        for (int q = 0; q < rule.n_edge_points(); ++q) {
            const Vec2 x = mesh.nodes[e.a] + rule.edge_points[q] * (mesh.nodes[e.b] - mesh.nodes[e.a]);
            fn(e, x, rule.edge_weights[q] * len);
        }
    }
}

void scatter(MatrixXd& A, const int* rows, int nr, const int* cols, int nc, const MatrixXd& elem) {
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nc; ++j) A(rows[i], cols[j]) += elem(i, j);
}

std::vector<int> gamma_c_vector_dofs(const Spaces& sp) {
    std::vector<int> out;
    for (int d : boundary_scalar_dofs(sp.Xc, BoundaryTag::gamma_c)) {
        out.push_back(2 * d);
        out.push_back(2 * d + 1);
    }
    return out;
}

void dirichlet_zero(MatrixXd& A, Vector& b, const std::vector<int>& dofs) {
    for (int d : dofs) {
        A.row(d).setZero();
        A.col(d).setZero();
        A(d, d) = 1.0;
        b[d] = 0.0;
    }
}

} // namespace

Vector dense_step_cahn_hilliard(const Spaces& sp, const ModelParams& m, const SchemeParams& p, const SimState& st) {
    const Mesh& mesh = *sp.mesh;
    const int n = sp.Y.n_dofs;
    const double dt = p.dt;
    MatrixXd A = MatrixXd::Zero(2 * n, 2 * n);
    Vector b = Vector::Zero(2 * n);

    for_quad(mesh, {}, [&](int t, const std::array<double, 3>& bc, double w) {
        std::array<double, 6> N;
        std::array<Vec2, 6> G;
        oracle_basis(mesh, t, true, bc, N, G);
        int dofs[6];
        sp.Y.cell_dofs(t, {dofs, 6});
        const auto phi = eval_scalar_oracle(st.phi, t, bc);
        const bool conduit = mesh.region[t] == Region::conduit;
        const double mob = m.mobility(conduit);
        const double rho = mixture(phi.value, m.rho1, m.rho2);
        const Mat2 wgrad_coef = conduit ? Mat2((mob + dt * phi.value * phi.value / rho) * Mat2::Identity())
                                        : Mat2(mob * Mat2::Identity() + phi.value * phi.value * m.K);
        Vec2 transport;
        if (conduit) {
            transport = eval_vector_oracle(st.u_c, t, bc).value;
        } else {
            transport = -(m.K * eval_scalar_oracle(st.p_m, t, bc).grad);
            if (!m.gravity.isZero()) transport += m.K * (rho * m.gravity);
        }
        for (int i = 0; i < 6; ++i) {
            b[dofs[i]] += w * (phi.value / dt) * N[i] + w * phi.value * transport.dot(G[i]);
            b[n + dofs[i]] +=
                w * N[i] * (m.gamma * double_well_f(phi.value, m.epsilon) - m.gamma / m.epsilon * phi.value);
            for (int j = 0; j < 6; ++j) {
                A(dofs[i], dofs[j]) += w / dt * N[i] * N[j];
                A(dofs[i], n + dofs[j]) += w * G[i].dot(wgrad_coef * G[j]);
                A(n + dofs[i], dofs[j]) +=
                    -m.gamma * m.epsilon * w * G[i].dot(G[j]) - m.gamma / m.epsilon * w * N[i] * N[j];
                A(n + dofs[i], n + dofs[j]) += w * N[i] * N[j];
            }
        }
    });
    return A.fullPivLu().solve(b);
}

Vector dense_step_darcy(const Spaces& sp, const ModelParams& m, const SchemeParams& p, const SimState& st,
                        const DiscreteField& w_next) {
    const Mesh& mesh = *sp.mesh;
    const int n = sp.Qm.n_dofs;
    MatrixXd A = MatrixXd::Zero(n + 1, n + 1);
    Vector b = Vector::Zero(n + 1);

    for_quad(mesh, Region::matrix, [&](int t, const std::array<double, 3>& bc, double w) {
        std::array<double, 6> N;
        std::array<Vec2, 6> G;
        oracle_basis(mesh, t, false, bc, N, G);
        int dofs[3];
        sp.Qm.cell_dofs(t, {dofs, 3});
        const auto phi = eval_scalar_oracle(st.phi, t, bc);
        Vec2 rhs_flux = -(m.K * (phi.value * eval_scalar_oracle(w_next, t, bc).grad));
        if (!m.gravity.isZero()) rhs_flux += m.K * (mixture(phi.value, m.rho1, m.rho2) * m.gravity);
        for (int i = 0; i < 3; ++i) {
            b[dofs[i]] += w * rhs_flux.dot(G[i]);
            A(n, dofs[i]) += w * N[i];
            A(dofs[i], n) += w * N[i];
            for (int j = 0; j < 3; ++j)
                A(dofs[i], dofs[j]) += w * G[i].dot((m.K + p.beta * p.dt * Mat2::Identity()) * G[j]);
        }
    });
    for_edge_quad(mesh, [&](const InterfaceEdge& e, const Vec2& x, double w) {
        std::array<double, 6> N;
        std::array<Vec2, 6> G;
        oracle_basis(mesh, e.tri_m, false, bary_of(mesh, e.tri_m, x), N, G);
        int dofs[3];
        sp.Qm.cell_dofs(e.tri_m, {dofs, 3});
        const Vec2 u = eval_vector_oracle(st.u_c, e.tri_c, bary_of(mesh, e.tri_c, x)).value;
        for (int i = 0; i < 3; ++i) b[dofs[i]] += w * u.dot(e.normal_c) * N[i];
    });
    const Vector x = A.fullPivLu().solve(b);
    return x.head(n);
}

Vector dense_step_momentum(const Spaces& sp, const ModelParams& m, const SchemeParams& p, const SimState& st,
                           const DiscreteField& phi_next, const DiscreteField& w_next,
                           const DiscreteField& p_m_next) {
    const Mesh& mesh = *sp.mesh;
    const int n = sp.Xc.n_dofs;
    const double dt = p.dt;
    MatrixXd A = MatrixXd::Zero(n, n);
    Vector b = Vector::Zero(n);

    for_quad(mesh, Region::conduit, [&](int t, const std::array<double, 3>& bc, double w) {
        std::array<double, 6> N;
        std::array<Vec2, 6> G;
        oracle_basis(mesh, t, true, bc, N, G);
        int dofs[12];
        sp.Xc.cell_dofs(t, {dofs, 12});
        const auto phi0 = eval_scalar_oracle(st.phi, t, bc);
        const auto phi1 = eval_scalar_oracle(phi_next, t, bc);
        const double rho0 = mixture(phi0.value, m.rho1, m.rho2);
        const double rho_bar = 0.5 * (rho0 + mixture(phi1.value, m.rho1, m.rho2));
        const double nu0 = mixture(phi0.value, m.nu1, m.nu2);
        const auto u0 = eval_vector_oracle(st.u_c, t, bc);
        const double div_rho_u = rho0 * u0.grad.trace() +
                                 mixture_derivative(phi0.value, m.rho1, m.rho2) * phi0.grad.dot(u0.value);
        const auto wn = eval_scalar_oracle(w_next, t, bc);
        const double pc_ext = 2.0 * eval_scalar_oracle(st.p_c, t, bc).value -
                              eval_scalar_oracle(st.p_c_prev, t, bc).value;
        const double div_u0 = u0.grad.trace();

        for (int i = 0; i < 6; ++i)
            for (int ci = 0; ci < 2; ++ci) {
                const int row = dofs[2 * i + ci];
                Vec2 body = (rho0 / dt) * u0.value - phi0.value * wn.grad;
                if (!m.gravity.isZero()) body += rho0 * m.gravity;
                b[row] += w * body[ci] * N[i];
                b[row] += w * pc_ext * G[i][ci];
                b[row] += w * (p.xi / dt) * div_u0 * G[i][ci];
                for (int j = 0; j < 6; ++j)
                    for (int cj = 0; cj < 2; ++cj) {
                        double v = 0.0;
                        if (ci == cj)
                            v += (rho_bar / dt) * N[i] * N[j] + rho0 * u0.value.dot(G[j]) * N[i] +
                                 0.5 * div_rho_u * N[i] * N[j];
                        const double dij = 0.5 * ((ci == cj ? G[i].dot(G[j]) : 0.0) + G[j][ci] * G[i][cj]);
                        v += 2.0 * nu0 * dij;
                        v += (p.xi / dt) * G[j][cj] * G[i][ci];
                        A(row, dofs[2 * j + cj]) += w * v;
                    }
            }
    });
    for_edge_quad(mesh, [&](const InterfaceEdge& e, const Vec2& x, double w) {
        std::array<double, 6> N;
        std::array<Vec2, 6> G;
        const auto bc = bary_of(mesh, e.tri_c, x);
        oracle_basis(mesh, e.tri_c, true, bc, N, G);
        int dofs[12];
        sp.Xc.cell_dofs(e.tri_c, {dofs, 12});
        const double phi0 = eval_scalar_oracle(st.phi, e.tri_c, bc).value;
        const double rho0 = mixture(phi0, m.rho1, m.rho2);
        const double nu0 = mixture(phi0, m.nu1, m.nu2);
        const Vec2 u0 = eval_vector_oracle(st.u_c, e.tri_c, bc).value;
        const double pm1 = eval_scalar_oracle(p_m_next, e.tri_m, bary_of(mesh, e.tri_m, x)).value;
        for (int i = 0; i < 6; ++i)
            for (int ci = 0; ci < 2; ++ci) {
                const int row = dofs[2 * i + ci];
                b[row] -= w * pm1 * N[i] * e.normal_c[ci];
                for (int j = 0; j < 6; ++j) {
                    // BJS: tau = (1, 0)
                    if (ci == 0) A(row, dofs[2 * j]) += w * m.alpha_bjs * nu0 * N[i] * N[j];
                    for (int cj = 0; cj < 2; ++cj)
                        A(row, dofs[2 * j + cj]) -= w * 0.5 * rho0 * u0[cj] * N[j] * N[i] * e.normal_c[ci];
                }
            }
    });
    dirichlet_zero(A, b, gamma_c_vector_dofs(sp));
    return A.fullPivLu().solve(b);
}

Vector dense_step_pressure_update(const Spaces& sp, const ModelParams& m, const SchemeParams& p,
                                  const DiscreteField& u_next, const DiscreteField& p_current) {
    const Mesh& mesh = *sp.mesh;
    const int n = sp.Qc.n_dofs;
    MatrixXd M = MatrixXd::Zero(n, n);
    Vector b = Vector::Zero(n);
    const double zeta = p.zeta_value(m);
    for_quad(mesh, Region::conduit, [&](int t, const std::array<double, 3>& bc, double w) {
        std::array<double, 6> N;
        std::array<Vec2, 6> G;
        oracle_basis(mesh, t, false, bc, N, G);
        int dofs[3];
        sp.Qc.cell_dofs(t, {dofs, 3});
        const double pc = eval_scalar_oracle(p_current, t, bc).value;
        const double ddiv = eval_vector_oracle(u_next, t, bc).grad.trace();
        for (int i = 0; i < 3; ++i) {
            b[dofs[i]] += w * (pc - zeta / p.dt * ddiv) * N[i];
            for (int j = 0; j < 3; ++j) M(dofs[i], dofs[j]) += w * N[i] * N[j];
        }
    });
    return M.fullPivLu().solve(b);
}

DenseStepResult dense_coupled_step(const Spaces& sp, const ModelParams& m, const SchemeParams& p,
                                   const SimState& st) {
    const Mesh& mesh = *sp.mesh;
    const int nm = sp.Qm.n_dofs, nu = sp.Xc.n_dofs, npc = sp.Qc.n_dofs, ny = sp.Y.n_dofs;
    const int o_pm = 0, o_u = nm, o_pc = nm + nu, o_phi = nm + nu + npc, o_w = nm + nu + npc + ny;
    const int n = nm + nu + npc + 2 * ny + 1; // + zero-mean multiplier
    const double dt = p.dt;

    Vector phi_iter = st.phi.coeffs;
    DiscreteField phi_field = make_field(sp.Y);
    Vector x;
    for (int picard = 0; picard < 12; ++picard) {
        phi_field.coeffs = phi_iter;
        MatrixXd A = MatrixXd::Zero(n, n);
        Vector b = Vector::Zero(n);

        for_quad(mesh, {}, [&](int t, const std::array<double, 3>& bc, double w) {
            std::array<double, 6> N2, N1;
            std::array<Vec2, 6> G2, G1;
            oracle_basis(mesh, t, true, bc, N2, G2);
            oracle_basis(mesh, t, false, bc, N1, G1);
            int ydofs[6];
            sp.Y.cell_dofs(t, {ydofs, 6});
            const auto phi0 = eval_scalar_oracle(st.phi, t, bc);
            const double mob = m.mobility(mesh.region[t] == Region::conduit);

            // transport and chemical potential rows (whole domain)
            for (int i = 0; i < 6; ++i) {
                b[o_phi + ydofs[i]] += w / dt * phi0.value * N2[i];
                b[o_w + ydofs[i]] +=
                    w * N2[i] * (m.gamma * double_well_f(phi0.value, m.epsilon) - m.gamma / m.epsilon * phi0.value);
                for (int j = 0; j < 6; ++j) {
                    A(o_phi + ydofs[i], o_phi + ydofs[j]) += w / dt * N2[i] * N2[j];
                    A(o_phi + ydofs[i], o_w + ydofs[j]) += w * mob * G2[i].dot(G2[j]);
                    A(o_w + ydofs[i], o_phi + ydofs[j]) +=
                        -m.gamma * m.epsilon * w * G2[i].dot(G2[j]) - m.gamma / m.epsilon * w * N2[i] * N2[j];
                    A(o_w + ydofs[i], o_w + ydofs[j]) += w * N2[i] * N2[j];
                }
            }

            if (mesh.region[t] == Region::matrix) {
                int qm[3];
                sp.Qm.cell_dofs(t, {qm, 3});
                for (int i = 0; i < 3; ++i) {
                    if (!m.gravity.isZero())
                        b[o_pm + qm[i]] +=
                            w * (m.K * (mixture(phi0.value, m.rho1, m.rho2) * m.gravity)).dot(G1[i]);
                    A(n - 1, o_pm + qm[i]) += w * N1[i];
                    A(o_pm + qm[i], n - 1) += w * N1[i];
                    for (int j = 0; j < 3; ++j) A(o_pm + qm[i], o_pm + qm[j]) += w * G1[i].dot(m.K * G1[j]);
                    for (int j = 0; j < 6; ++j) {
                        A(o_pm + qm[i], o_w + ydofs[j]) += w * phi0.value * G1[i].dot(m.K * G2[j]);
                        // transport by the Darcy velocity
                        A(o_phi + ydofs[j], o_pm + qm[i]) += w * phi0.value * G2[j].dot(m.K * G1[i]);
                    }
                }
                for (int i = 0; i < 6; ++i)
                    for (int j = 0; j < 6; ++j)
                        A(o_phi + ydofs[i], o_w + ydofs[j]) +=
                            w * phi0.value * phi0.value * G2[i].dot(m.K * G2[j]);
                if (!m.gravity.isZero())
                    for (int i = 0; i < 6; ++i)
                        b[o_phi + ydofs[i]] +=
                            w * phi0.value * (m.K * (mixture(phi0.value, m.rho1, m.rho2) * m.gravity)).dot(G2[i]);
            } else {
                int xdofs[12], qc[3];
                sp.Xc.cell_dofs(t, {xdofs, 12});
                sp.Qc.cell_dofs(t, {qc, 3});
                const double rho0 = mixture(phi0.value, m.rho1, m.rho2);
                const double rho1 = mixture(eval_scalar_oracle(phi_field, t, bc).value, m.rho1, m.rho2);
                const double sig = std::sqrt(rho0 * rho1);
                const double nu0 = mixture(phi0.value, m.nu1, m.nu2);
                const auto u0 = eval_vector_oracle(st.u_c, t, bc);
                const double div_rho_u =
                    rho0 * u0.grad.trace() + mixture_derivative(phi0.value, m.rho1, m.rho2) * phi0.grad.dot(u0.value);

                for (int i = 0; i < 6; ++i)
                    for (int ci = 0; ci < 2; ++ci) {
                        const int row = o_u + xdofs[2 * i + ci];
                        Vec2 body = sig * u0.value;
                        if (!m.gravity.isZero()) body += dt * rho0 * m.gravity;
                        b[row] += w * body[ci] * N2[i];
                        for (int j = 0; j < 6; ++j) {
                            for (int cj = 0; cj < 2; ++cj) {
                                double v = 0.0;
                                if (ci == cj)
                                    v += rho1 * N2[i] * N2[j] +
                                         dt * (rho0 * u0.value.dot(G2[j]) * N2[i] + 0.5 * div_rho_u * N2[i] * N2[j]);
                                v += dt * 2.0 * nu0 * 0.5 * ((ci == cj ? G2[i].dot(G2[j]) : 0.0) + G2[j][ci] * G2[i][cj]);
                                A(row, o_u + xdofs[2 * j + cj]) += w * v;
                            }
                            // (phi grad w, v), scaled by dt with the row
                            A(row, o_w + ydofs[j]) += w * dt * phi0.value * G2[j][ci] * N2[i];
                        }
                        for (int j = 0; j < 3; ++j) A(row, o_pc + qc[j]) -= w * dt * N1[j] * G2[i][ci];
                    }
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 6; ++j)
                        for (int cj = 0; cj < 2; ++cj)
                            A(o_pc + qc[i], o_u + xdofs[2 * j + cj]) += w * N1[i] * G2[j][cj];
                // conduit transport: -(u phi, grad psi)
                for (int i = 0; i < 6; ++i)
                    for (int j = 0; j < 6; ++j)
                        for (int cj = 0; cj < 2; ++cj)
                            A(o_phi + ydofs[i], o_u + xdofs[2 * j + cj]) -= w * phi0.value * N2[j] * G2[i][cj];
            }
        });

        for_edge_quad(mesh, [&](const InterfaceEdge& e, const Vec2& x_pt, double w) {
            std::array<double, 6> Nc, Nm;
            std::array<Vec2, 6> Gc, Gm;
            const auto bcc = bary_of(mesh, e.tri_c, x_pt);
            oracle_basis(mesh, e.tri_c, true, bcc, Nc, Gc);
            oracle_basis(mesh, e.tri_m, false, bary_of(mesh, e.tri_m, x_pt), Nm, Gm);
            int xdofs[12], qm[3];
            sp.Xc.cell_dofs(e.tri_c, {xdofs, 12});
            sp.Qm.cell_dofs(e.tri_m, {qm, 3});
            const double phi0 = eval_scalar_oracle(st.phi, e.tri_c, bcc).value;
            const double rho0 = mixture(phi0, m.rho1, m.rho2);
            const double nu0 = mixture(phi0, m.nu1, m.nu2);
            const Vec2 u0 = eval_vector_oracle(st.u_c, e.tri_c, bcc).value;
            for (int i = 0; i < 6; ++i)
                for (int ci = 0; ci < 2; ++ci) {
                    const int row = o_u + xdofs[2 * i + ci];
                    for (int j = 0; j < 3; ++j) {
                        A(row, o_pm + qm[j]) += w * dt * Nm[j] * Nc[i] * e.normal_c[ci];
                        A(o_pm + qm[j], o_u + xdofs[2 * i + ci]) -= w * Nm[j] * Nc[i] * e.normal_c[ci];
                    }
                    for (int j = 0; j < 6; ++j) {
                        if (ci == 0) A(row, o_u + xdofs[2 * j]) += w * dt * m.alpha_bjs * nu0 * Nc[i] * Nc[j];
                        for (int cj = 0; cj < 2; ++cj)
                            A(row, o_u + xdofs[2 * j + cj]) -=
                                w * dt * 0.5 * rho0 * u0[cj] * Nc[j] * Nc[i] * e.normal_c[ci];
                    }
                }
        });

        std::vector<int> bc_dofs;
        for (int d : gamma_c_vector_dofs(sp)) bc_dofs.push_back(o_u + d);
        dirichlet_zero(A, b, bc_dofs);
        x = A.fullPivLu().solve(b);

        const Vector phi_new = x.segment(o_phi, ny);
        const double delta = (phi_new - phi_iter).lpNorm<Eigen::Infinity>();
        const double scale = std::max(1.0, phi_iter.lpNorm<Eigen::Infinity>());
        phi_iter = phi_new;
        if (delta <= 1e-12 * scale) break;
    }

    DenseStepResult out;
    out.p_m = x.segment(o_pm, nm);
    out.u_c = x.segment(o_u, nu);
    out.p_c = x.segment(o_pc, npc);
    out.phi = x.segment(o_phi, ny);
    out.w = x.segment(o_w, ny);
    return out;
}

} // namespace chnsd::oracle
