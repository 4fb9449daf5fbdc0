#include "chnsd/solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include <cmath>
#include <cstdio>

namespace chnsd {

namespace {

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

double pow2_round(double v) {
    if (v <= 0.0 || !std::isfinite(v)) return 1.0;
    return std::exp2(std::round(std::log2(v)));
}

} // namespace

struct DirectSolver::Impl {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    Vector row_scale, col_scale; // power-of-two equilibration, exact in FP
    bool analyzed = false;
    bool ok = false;
};

DirectSolver::DirectSolver() : impl_(std::make_unique<Impl>()) {}
DirectSolver::~DirectSolver() = default;
DirectSolver::DirectSolver(DirectSolver&&) noexcept = default;
DirectSolver& DirectSolver::operator=(DirectSolver&&) noexcept = default;

void DirectSolver::factorize(const CsrMatrix& A) {
    Impl& im = *impl_;
    const int n = A.rows;
    // Ruiz equilibration on inf-norms; rounding to powers of two keeps the
    // scaled entries bit-exact multiples of the originals
    im.row_scale = Vector::Ones(n);
    im.col_scale = Vector::Ones(A.cols);
    std::vector<double> work(std::max(A.rows, A.cols));
    for (int sweep = 0; sweep < 3; ++sweep) {
        std::fill(work.begin(), work.end(), 0.0);
        for (int r = 0; r < n; ++r)
            for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k) {
                const double v = std::abs(im.row_scale[r] * A.vals[k] * im.col_scale[A.col_idx[k]]);
                if (v > work[r]) work[r] = v;
            }
        for (int r = 0; r < n; ++r) im.row_scale[r] /= pow2_round(std::sqrt(work[r] > 0 ? work[r] : 1.0));
        std::fill(work.begin(), work.end(), 0.0);
        for (int r = 0; r < n; ++r)
            for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k) {
                const int c = A.col_idx[k];
                const double v = std::abs(im.row_scale[r] * A.vals[k] * im.col_scale[c]);
                if (v > work[c]) work[c] = v;
            }
        for (int c = 0; c < A.cols; ++c) im.col_scale[c] /= pow2_round(std::sqrt(work[c] > 0 ? work[c] : 1.0));
    }

    Eigen::SparseMatrix<double> m(A.rows, A.cols);
    {
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(A.vals.size());
        for (int r = 0; r < A.rows; ++r)
            for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k)
                trips.emplace_back(r, A.col_idx[k], im.row_scale[r] * A.vals[k] * im.col_scale[A.col_idx[k]]);
        m.setFromTriplets(trips.begin(), trips.end());
    }
    if (!im.analyzed) {
        im.lu.analyzePattern(m);
        im.analyzed = true;
    }
    im.lu.factorize(m);
    im.ok = im.lu.info() == Eigen::Success;
    if (!im.ok) throw SolverError("sparse LU factorization failed (singular matrix?)");
}

Vector DirectSolver::solve(const Vector& rhs) const {
    const Impl& im = *impl_;
    if (!im.ok) throw SolverError("solve before successful factorization");
    const Vector scaled = im.row_scale.cwiseProduct(rhs);
    return im.col_scale.cwiseProduct(Vector(im.lu.solve(scaled)));
}

bool DirectSolver::ready() const { return impl_->ok; }

namespace {

/// x = A^-1 b via the factorization plus iterative refinement until the true
/// residual meets tol (or max_iters refinement steps elapse).
Vector refined_solve(const DirectSolver& lu, const CsrMatrix& A, const Vector& rhs, double tol, int max_iters,
                     int* iters_out, double* res_out) {
    const double bn = rhs.norm();
    Vector x = lu.solve(rhs);
    Vector r = rhs - A.multiply(x);
    int it = 1;
    while (bn > 0.0 && r.norm() > tol * bn && it < max_iters) {
        x += lu.solve(r);
        r = rhs - A.multiply(x);
        ++it;
    }
    if (iters_out) *iters_out = it;
    if (res_out) *res_out = bn > 0.0 ? r.norm() / bn : r.norm();
    return x;
}

} // namespace

Vector solve_sparse(const SparseSystem& system, const SolveOptions& opts, SolveStats* stats) {
    if (system.A.rows != system.A.cols) throw SolverError("matrix is not square");
    if (system.rhs.size() != system.A.rows) throw SolverError("rhs size mismatch");

    Vector x;
    int iters = 1;
    double res = 0.0;
    if (opts.method == SolveMethod::direct) {
        DirectSolver lu;
        lu.factorize(system.A);
        x = refined_solve(lu, system.A, system.rhs, 0.01 * opts.rel_tol, 4, &iters, &res);
    } else {
        const Eigen::SparseMatrix<double> m = system.A.to_eigen();
        Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> krylov;
        krylov.preconditioner().setDroptol(1e-6);
        krylov.preconditioner().setFillfactor(20);
        krylov.setTolerance(0.1 * opts.rel_tol);
        krylov.setMaxIterations(2000);
        krylov.compute(m);
        if (krylov.info() != Eigen::Success) throw SolverError("iterative setup failed");
        x = krylov.solve(system.rhs);
        iters = static_cast<int>(krylov.iterations());
        const double bn = system.rhs.norm();
        res = bn > 0.0 ? (system.A.multiply(x) - system.rhs).norm() / bn : 0.0;
    }

    if (stats) {
        stats->iterations = iters;
        stats->rel_residual = res;
    }
    if (!(res <= opts.rel_tol) && system.rhs.norm() > 0.0)
        throw SolverError("relative residual " + sci(res) + " exceeds tolerance");
    return x;
}

Vector FrozenLuSolver::solve(const CsrMatrix& A, const Vector& rhs, SolveStats* stats) {
    const double bn = rhs.norm();
    int refactor = 0;
    if (!fresh_ || last_iters_ > refresh_after_) {
        lu_.factorize(A);
        fresh_ = true;
        ++refactor;
    }

    Vector x = lu_.solve(rhs);
    Vector r = rhs - A.multiply(x);
    double prev = r.norm();
    int iters = 1;
    bool stalled = false;
    while (bn > 0.0 && prev > rel_tol_ * bn && iters < max_iters_ && !stalled) {
        x += lu_.solve(r);
        r = rhs - A.multiply(x);
        const double now = r.norm();
        stalled = now > 0.3 * prev;
        prev = now;
        ++iters;
    }

    if (bn > 0.0 && prev > rel_tol_ * bn) {
        lu_.factorize(A);
        ++refactor;
        double res = 0.0;
        x = refined_solve(lu_, A, rhs, rel_tol_, 8, &iters, &res);
        prev = res * bn;
        if (res > rel_tol_) throw SolverError("direct solve residual " + sci(res) + " above tolerance");
    }

    last_iters_ = refactor > 0 ? 0 : iters;
    if (stats) {
        stats->iterations = iters;
        stats->rel_residual = bn > 0.0 ? prev / bn : 0.0;
        stats->refactorizations = refactor;
    }
    return x;
}

} // namespace chnsd
