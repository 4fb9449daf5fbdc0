#include "chnsd/assembly.hpp"
#include "chnsd/solver.hpp"

#include <Eigen/Dense>
#include <doctest.h>

#include <random>

using namespace chnsd;

namespace {

double exact_tri_monomial(int a, int b) {
    // integral of x^a y^b over the reference triangle = a! b! / (a + b + 2)!
    auto fact = [](int n) { double f = 1; for (int k = 2; k <= n; ++k) f *= k; return f; };
    return fact(a) * fact(b) / fact(a + b + 2);
}

Mesh two_layer(int nx, int ny, ConduitPosition pos = ConduitPosition::top) {
    return build_layered_mesh(nx, ny, DomainLayout{0, 1, 0, 2, 1, pos});
}

} // namespace

TEST_CASE("triangle quadrature is exact to its stated degree") {
    auto check_rule = [](const QuadRule& rule, int degree) {
        for (int a = 0; a + 0 <= degree; ++a)
            for (int b = 0; a + b <= degree; ++b) {
                double sum = 0.0;
                for (int q = 0; q < rule.n_points(); ++q) {
                    const double x = rule.points[q][1], y = rule.points[q][2];
                    sum += rule.weights[q] * std::pow(x, a) * std::pow(y, b);
                }
                CHECK(sum == doctest::Approx(exact_tri_monomial(a, b)).epsilon(1e-13));
            }
    };
    check_rule(assembly_rule(), 5);
    check_rule(norm_rule(), 8);
}

TEST_CASE("edge quadrature is exact to degree 5") {
    for (int a = 0; a <= 5; ++a) {
        double sum = 0.0;
        const QuadRule& rule = assembly_rule();
        for (int q = 0; q < rule.n_edge_points(); ++q)
            sum += rule.edge_weights[q] * std::pow(rule.edge_points[q], a);
        CHECK(sum == doctest::Approx(1.0 / (a + 1)).epsilon(1e-14));
    }
}

TEST_CASE("Lagrange property and partition of unity") {
    std::array<double, 6> vals;
    std::array<Vec2, 6> grads;
    eval_basis(ElementKind::p1_scalar, {1, 0, 0}, vals, grads);
    CHECK(vals[0] == 1.0);
    CHECK(vals[1] == 0.0);
    CHECK(vals[2] == 0.0);

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        double b1 = uni(rng), b2 = uni(rng) * (1.0 - b1);
        eval_basis(ElementKind::p2_scalar, {1.0 - b1 - b2, b1, b2}, vals, grads);
        double sum = 0.0;
        Vec2 gsum = Vec2::Zero();
        for (int i = 0; i < 6; ++i) {
            sum += vals[i];
            gsum += grads[i];
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(gsum.norm() <= 1e-13);
    }
}

TEST_CASE("P1 mass matrix of the unit right triangle") {
    Mesh mesh;
    mesh.layout = DomainLayout{0, 1, 0, 2, 1, ConduitPosition::top};
    mesh.nodes = {Vec2(0, 1), Vec2(1, 1), Vec2(0, 2)};
    mesh.triangles = {{0, 1, 2}};
    mesh.region = {Region::conduit};
    finalize_mesh(mesh);
    const FunctionSpace Q = make_space(mesh, ElementKind::p1_scalar, SpaceRegion::conduit);
    const CsrMatrix M = assemble_operator(OperatorKind::mass, Q, Q);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(M.coeff(i, j) == doctest::Approx(i == j ? 1.0 / 12.0 : 1.0 / 24.0).epsilon(1e-14));
}

TEST_CASE("stiffness row sums vanish for constant coefficient") {
    const Mesh mesh = two_layer(3, 4);
    const FunctionSpace Y = make_space(mesh, ElementKind::p2_scalar, SpaceRegion::whole);
    const CsrMatrix S = assemble_operator(OperatorKind::stiffness, Y, Y);
    for (int r = 0; r < S.rows; ++r) {
        double sum = 0.0;
        for (int k = S.row_ptr[r]; k < S.row_ptr[r + 1]; ++k) sum += S.vals[k];
        CHECK(std::abs(sum) <= 1e-12);
    }
}

TEST_CASE("grad-div residual of a divergence-free interpolant decays at second order") {
    auto residual = [](int n) {
        const Mesh mesh = two_layer(n, 2 * n);
        const FunctionSpace Xc = make_space(mesh, ElementKind::p2_vector2, SpaceRegion::conduit);
        const DiscreteField u = interpolate_vector(Xc, [](const Vec2& p) {
            const double ym = p.y() - 1.0;
            return Vec2(p.x() * p.x() * ym * ym, -(2.0 / 3.0) * p.x() * ym * ym * ym);
        });
        const CsrMatrix G = assemble_operator(OperatorKind::grad_div, Xc, Xc);
        return std::sqrt(u.coeffs.dot(G.multiply(u.coeffs))); // = ||div u_h||
    };
    const double r4 = residual(4), r8 = residual(8), r16 = residual(16);
    CHECK(r4 / r8 >= 3.5);
    CHECK(r8 / r16 >= 3.5);
}

TEST_CASE("dirichlet elimination") {
    const Mesh mesh = two_layer(1, 2);
    const FunctionSpace Q = make_space(mesh, ElementKind::p1_scalar, SpaceRegion::whole);
    const CsrMatrix S = assemble_operator(OperatorKind::stiffness, Q, Q);

    SUBCASE("empty list leaves the system unchanged") {
        SparseSystem sys{S, Vector::Ones(Q.n_dofs)};
        const SparseSystem before = sys;
        apply_dirichlet(sys, {}, {});
        CHECK(sys.A.vals == before.A.vals);
        CHECK(sys.rhs == before.rhs);
    }
    SUBCASE("all dofs constrained reproduces the data exactly") {
        SparseSystem sys{S, Vector::Zero(Q.n_dofs)};
        std::vector<int> dofs;
        std::vector<double> vals;
        for (int d = 0; d < Q.n_dofs; ++d) {
            dofs.push_back(d);
            vals.push_back(0.5 * d);
        }
        apply_dirichlet(sys, dofs, vals);
        const Vector x = solve_sparse(sys);
        for (int d = 0; d < Q.n_dofs; ++d) CHECK(x[d] == doctest::Approx(0.5 * d).epsilon(1e-14));
    }
    SUBCASE("conflicting duplicate is rejected") {
        SparseSystem sys{S, Vector::Zero(Q.n_dofs)};
        CHECK_THROWS_AS(apply_dirichlet(sys, {0, 0}, {1.0, 2.0}), AssemblyError);
    }
    SUBCASE("linear exact data is reproduced to 1e-12") {
        // Laplace problem with boundary data 2x - 3y + 1 on every boundary dof
        Mesh small;
        small.layout = mesh.layout;
        small.nodes = {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};
        small.triangles = {{0, 1, 2}, {0, 2, 3}};
        small.region = {Region::matrix, Region::matrix};
        small.layout.y_interface = 2.0; // keep everything on one side
        small.layout.y_max = 3.0;
        finalize_mesh(small);
        const FunctionSpace Qs = make_space(small, ElementKind::p1_scalar, SpaceRegion::matrix);
        SparseSystem sys{assemble_operator(OperatorKind::stiffness, Qs, Qs), Vector::Zero(Qs.n_dofs)};
        auto lin = [](const Vec2& p) { return 2.0 * p.x() - 3.0 * p.y() + 1.0; };
        std::vector<int> dofs{0, 1, 2, 3};
        std::vector<double> vals;
        for (int d : dofs) vals.push_back(lin(Qs.dof_points[d]));
        apply_dirichlet(sys, dofs, vals);
        const Vector x = solve_sparse(sys);
        for (int d = 0; d < Qs.n_dofs; ++d) CHECK(std::abs(x[d] - lin(Qs.dof_points[d])) <= 1e-12);
    }
}

TEST_CASE("solve_sparse basics") {
    SUBCASE("identity") {
        std::vector<Triplet> trips{{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}};
        SparseSystem sys{csr_from_triplets(3, 3, std::move(trips)), Vector::Zero(3)};
        sys.rhs << 3, -1, 7;
        const Vector x = solve_sparse(sys);
        CHECK((x - sys.rhs).norm() <= 1e-14);
    }
    SUBCASE("symmetric 2x2") {
        std::vector<Triplet> trips{{0, 0, 2.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 2.0}};
        SparseSystem sys{csr_from_triplets(2, 2, std::move(trips)), Vector::Zero(2)};
        sys.rhs << 3, 3;
        const Vector x = solve_sparse(sys);
        CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(x[1] == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("random SPD system matches the dense factorization") {
        std::mt19937 rng(11);
        std::normal_distribution<double> gauss;
        Eigen::MatrixXd B(50, 50);
        for (int i = 0; i < 50; ++i)
            for (int j = 0; j < 50; ++j) B(i, j) = gauss(rng);
        const Eigen::MatrixXd A = B.transpose() * B + 50.0 * Eigen::MatrixXd::Identity(50, 50);
        std::vector<Triplet> trips;
        for (int i = 0; i < 50; ++i)
            for (int j = 0; j < 50; ++j) trips.push_back({i, j, A(i, j)});
        SparseSystem sys{csr_from_triplets(50, 50, std::move(trips)), Vector::Zero(50)};
        for (int i = 0; i < 50; ++i) sys.rhs[i] = gauss(rng);
        const Vector x = solve_sparse(sys);
        const Vector x_dense = A.ldlt().solve(sys.rhs);
        CHECK((x - x_dense).lpNorm<Eigen::Infinity>() <= 1e-9);
    }
    SUBCASE("singular matrix is reported") {
        std::vector<Triplet> trips{{0, 0, 1.0}, {1, 1, 0.0}};
        SparseSystem sys{csr_from_triplets(2, 2, std::move(trips)), Vector::Ones(2)};
        CHECK_THROWS_AS((void)solve_sparse(sys), SolverError);
    }
    SUBCASE("iterative path hits the tolerance") {
        const Mesh mesh = two_layer(4, 8);
        const FunctionSpace Y = make_space(mesh, ElementKind::p2_scalar, SpaceRegion::whole);
        const CsrMatrix S = assemble_operator(OperatorKind::stiffness, Y, Y);
        const CsrMatrix M = assemble_operator(OperatorKind::mass, Y, Y);
        SparseSystem sys{csr_sum({{&S, 1.0}, {&M, 1.0}}), Vector::Ones(Y.n_dofs)};
        SolveStats stats;
        (void)solve_sparse(sys, {SolveMethod::iterative, 1e-10}, &stats);
        CHECK(stats.rel_residual <= 1e-10);
    }
}

TEST_CASE("zero-mean constraint") {
    const Mesh mesh = two_layer(2, 4);
    const FunctionSpace Qm = make_space(mesh, ElementKind::p1_scalar, SpaceRegion::matrix, Constraint::zero_mean);
    const CsrMatrix S = assemble_operator(OperatorKind::stiffness, Qm, Qm);
    const Vector weights = mean_weights(Qm);

    Vector load = Vector::Zero(Qm.n_dofs);
    for (int i = 0; i < Qm.n_dofs; ++i) load[i] = std::sin(2.5 * i);
    load -= weights * (weights.dot(load) / weights.sum()); // compatible data

    SUBCASE("solution mean vanishes and constant shifts land in the multiplier") {
        const SparseSystem sys = impose_zero_mean({S, load}, weights);
        const Vector x = solve_sparse(sys);
        CHECK(std::abs(weights.dot(x.head(Qm.n_dofs))) <= 1e-12);

        const SparseSystem shifted = impose_zero_mean({S, Vector(load + 3.0 * weights)}, weights);
        const Vector y = solve_sparse(shifted);
        CHECK((y.head(Qm.n_dofs) - x.head(Qm.n_dofs)).lpNorm<Eigen::Infinity>() <= 1e-10);
    }
    SUBCASE("matches the pin-one-dof-then-shift oracle") {
        const SparseSystem sys = impose_zero_mean({S, load}, weights);
        const Vector x = solve_sparse(sys).head(Qm.n_dofs);

        SparseSystem pinned{S, load};
        apply_dirichlet(pinned, {0}, {0.0});
        Vector y = solve_sparse(pinned);
        y -= Vector::Ones(Qm.n_dofs) * (weights.dot(y) / weights.sum());
        CHECK((x - y).lpNorm<Eigen::Infinity>() <= 1e-9);
    }
}

TEST_CASE("mass matrices are symmetric positive definite") {
    const Mesh mesh = two_layer(5, 10); // 100 triangles
    for (auto kind : {ElementKind::p1_scalar, ElementKind::p2_scalar}) {
        const FunctionSpace V = make_space(mesh, kind, SpaceRegion::whole);
        const CsrMatrix M = assemble_operator(OperatorKind::mass, V, V);
        const Eigen::MatrixXd Md = Eigen::MatrixXd(M.to_eigen());
        CHECK((Md - Md.transpose()).lpNorm<Eigen::Infinity>() <= 1e-14);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Md);
        CHECK(eig.eigenvalues().minCoeff() > 0.0);
    }
}

TEST_CASE("convection plus half div_advect reduces to the interface integral") {
    const Mesh mesh = two_layer(3, 6);
    const FunctionSpace Xc = make_space(mesh, ElementKind::p2_vector2, SpaceRegion::conduit);
    const double rho = 1.7;
    const Vec2 a(0.4, -0.9);
    Coefficients conv;
    conv.scalar = [&](const QuadCtx&) { return rho; };
    conv.velocity = [&](const QuadCtx&) { return a; };
    const CsrMatrix C = assemble_operator(OperatorKind::convection, Xc, Xc, conv);
    // constant rho and a: div(rho a) = 0, so the D part vanishes
    std::mt19937 rng(3);
    std::normal_distribution<double> gauss;
    DiscreteField v = make_field(Xc);
    for (int i = 0; i < Xc.n_dofs; ++i) v.coeffs[i] = gauss(rng);
    for (int d : boundary_scalar_dofs(Xc, BoundaryTag::gamma_c)) {
        v.coeffs[2 * d] = 0.0;
        v.coeffs[2 * d + 1] = 0.0;
    }
    const double lhs = v.coeffs.dot(C.multiply(v.coeffs));

    double rhs = 0.0; // (1/2) <rho a . n_c, |v|^2> over the interface
    const QuadRule& rule = assembly_rule();
    for (const auto& e : mesh.interface_edges) {
        const double len = (mesh.nodes[e.b] - mesh.nodes[e.a]).norm();
        for (int q = 0; q < rule.n_edge_points(); ++q) {
            const Vec2 x = mesh.nodes[e.a] + rule.edge_points[q] * (mesh.nodes[e.b] - mesh.nodes[e.a]);
            const Vec2 val = eval_vector(v, e.tri_c, barycentric_of(mesh, e.tri_c, x));
            rhs += rule.edge_weights[q] * len * 0.5 * rho * a.dot(e.normal_c) * val.squaredNorm();
        }
    }
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("BJS operator is symmetric positive semidefinite with the right kernel") {
    const Mesh mesh = two_layer(3, 6);
    const FunctionSpace Xc = make_space(mesh, ElementKind::p2_vector2, SpaceRegion::conduit);
    const CsrMatrix B = assemble_operator(OperatorKind::interface_bjs, Xc, Xc);
    const Eigen::MatrixXd Bd = Eigen::MatrixXd(B.to_eigen());
    CHECK((Bd - Bd.transpose()).lpNorm<Eigen::Infinity>() <= 1e-14);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Bd);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-12);

    // zero tangential trace: x-components on the interface zeroed
    std::mt19937 rng(5);
    std::normal_distribution<double> gauss;
    Vector v(Xc.n_dofs);
    for (int i = 0; i < Xc.n_dofs; ++i) v[i] = gauss(rng);
    for (int d : interface_scalar_dofs(Xc)) v[2 * d] = 0.0;
    CHECK(std::abs(v.dot(B.multiply(v))) <= 1e-13 * v.squaredNorm());
}

TEST_CASE("assembly is deterministic") {
    const Mesh mesh = two_layer(4, 8);
    const FunctionSpace Y = make_space(mesh, ElementKind::p2_scalar, SpaceRegion::whole);
    Coefficients c;
    c.tensor = [](const QuadCtx& ctx) { return Mat2((1.0 + ctx.x.squaredNorm()) * Mat2::Identity()); };
    const CsrMatrix A = assemble_operator(OperatorKind::stiffness, Y, Y, c);
    const CsrMatrix B = assemble_operator(OperatorKind::stiffness, Y, Y, c);
    CHECK(A.vals == B.vals);
    CHECK(A.col_idx == B.col_idx);
}

TEST_CASE("space and region mismatches are rejected") {
    const Mesh mesh = two_layer(2, 4);
    const FunctionSpace Xc = make_space(mesh, ElementKind::p2_vector2, SpaceRegion::conduit);
    const FunctionSpace Qm = make_space(mesh, ElementKind::p1_scalar, SpaceRegion::matrix);
    const FunctionSpace Qc = make_space(mesh, ElementKind::p1_scalar, SpaceRegion::conduit);
    CHECK_THROWS_AS((void)assemble_operator(OperatorKind::mass, Qm, Qc), AssemblyError);
    CHECK_THROWS_AS((void)assemble_operator(OperatorKind::stiffness, Xc, Xc), AssemblyError);
    CHECK_THROWS_AS((void)assemble_operator(OperatorKind::interface_normal, Qc, Qm), AssemblyError);
    CHECK_THROWS_AS((void)assemble_operator(OperatorKind::convection, Xc, Xc), AssemblyError);
}
