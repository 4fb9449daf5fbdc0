#pragma once

// Internal helpers shared by the two steppers.

#include "chnsd/assembly.hpp"
#include "chnsd/physics.hpp"
#include "chnsd/scheme.hpp"

#include <chrono>

namespace chnsd::detail {

/// Block matrix composed from per-field operators. The pattern is built once
/// from a prototype set of blocks; later steps only overwrite values, so the
/// surrounding factorization caches see a fixed pattern.
class BlockMatrix {
  public:
    void set_layout(std::vector<int> block_sizes);
    int offset(int b) const { return offsets_[b]; }
    int size() const { return offsets_.back(); }

    /// Declares + accumulates a block in the prototype pass.
    void proto_add(int bi, int bj, const CsrMatrix& m, double scale = 1.0, bool transposed = false);
    /// Extra scalar entry (used by the zero-mean border).
    void proto_entry(int row, int col, double value);
    void finalize_pattern();

    void clear_values();
    void add(int bi, int bj, const CsrMatrix& m, double scale = 1.0, bool transposed = false);
    void entry(int row, int col, double value);

    const CsrMatrix& matrix() const { return a_; }
    bool finalized() const { return finalized_; }

  private:
    std::vector<int> offsets_;
    std::vector<Triplet> proto_;
    CsrMatrix a_;
    bool finalized_ = false;
};

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
};

inline void fill_report(SubstepReport* rep, const char* name, const Timer& timer, const SolveStats& stats) {
    if (!rep) return;
    rep->name = name;
    rep->seconds = timer.seconds();
    rep->iterations = stats.iterations;
    rep->rel_residual = stats.rel_residual;
    rep->refactorizations = stats.refactorizations;
}

/// Pointwise material state evaluated from the lagged phase field.
struct PhaseCoeffs {
    const DiscreteField* phi = nullptr;
    const ModelParams* model = nullptr;

    double phi_at(const QuadCtx& c) const { return eval_scalar(*phi, c.tri, c.bary); }
    Vec2 grad_phi(const QuadCtx& c) const { return eval_scalar_grad(*phi, c.tri, c.bary); }
    double rho(const QuadCtx& c) const { return mixture(phi_at(c), model->rho1, model->rho2); }
    double nu(const QuadCtx& c) const { return mixture(phi_at(c), model->nu1, model->nu2); }
    double rho_of(double p) const { return mixture(p, model->rho1, model->rho2); }
};

/// Dirichlet dof lists (expanded to vector components where needed) plus the
/// matching boundary values at a given time.
struct BcSet {
    std::vector<int> dofs;
    std::vector<Vec2> points;
};

inline BcSet scalar_bc_set(const FunctionSpace& space, const std::vector<int>& scalar_dofs) {
    BcSet out;
    out.dofs = scalar_dofs;
    for (int d : scalar_dofs) out.points.push_back(space.dof_points[d]);
    return out;
}

inline BcSet vector_bc_set(const FunctionSpace& space, const std::vector<int>& scalar_dofs) {
    BcSet out;
    for (int d : scalar_dofs) {
        out.dofs.push_back(2 * d);
        out.dofs.push_back(2 * d + 1);
        out.points.push_back(space.dof_points[d]);
        out.points.push_back(space.dof_points[d]);
    }
    return out;
}

} // namespace chnsd::detail
