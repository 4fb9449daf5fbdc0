#pragma once

#include "chnsd/sparse.hpp"

#include <memory>

namespace chnsd {

struct SolveOptions {
    SolveMethod method = SolveMethod::direct;
    double rel_tol = 1e-10;
};

struct SolveStats {
    int iterations = 1;
    double rel_residual = 0.0;
    int refactorizations = 0;
};

/// Solves A x = rhs. Direct path is a sparse LU factorization; iterative is
/// BiCGSTAB/ILUT. The relative residual is always verified against rel_tol;
/// a singular factorization or a missed tolerance raises SolverError.
Vector solve_sparse(const SparseSystem& system, const SolveOptions& opts = {}, SolveStats* stats = nullptr);

/// Sparse LU with pattern reuse: the symbolic analysis runs once, repeated
/// factorize() calls only redo numerics. Not copyable.
class DirectSolver {
  public:
    DirectSolver();
    ~DirectSolver();
    DirectSolver(DirectSolver&&) noexcept;
    DirectSolver& operator=(DirectSolver&&) noexcept;

    void factorize(const CsrMatrix& A);
    Vector solve(const Vector& rhs) const;
    bool ready() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Direct solver for sequences of slowly varying systems with a fixed
/// pattern: reuses the last factorization as a defect-correction
/// preconditioner and refactorizes when the correction stalls. Residuals are
/// driven below rel_tol of the true current matrix, so accuracy matches a
/// fresh factorization.
class FrozenLuSolver {
  public:
    explicit FrozenLuSolver(double rel_tol = 1e-12, int max_defect_iters = 30)
        : rel_tol_(rel_tol), max_iters_(max_defect_iters) {}

    Vector solve(const CsrMatrix& A, const Vector& rhs, SolveStats* stats = nullptr);
    void invalidate() { fresh_ = false; }

  private:
    DirectSolver lu_;
    double rel_tol_;
    int max_iters_;
    int refresh_after_ = 8; // refactorize eagerly once corrections get slow
    int last_iters_ = 0;
    bool fresh_ = false;
};

} // namespace chnsd
