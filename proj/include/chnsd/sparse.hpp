#pragma once

#include "chnsd/common.hpp"

#include <Eigen/SparseCore>
#include <vector>

namespace chnsd {

struct Triplet {
    int row = 0, col = 0;
    double value = 0.0;
};

/// Compressed sparse rows with sorted, duplicate-free column indices per row.
struct CsrMatrix {
    int rows = 0, cols = 0;
    std::vector<int> row_ptr;
    std::vector<int> col_idx;
    std::vector<double> vals;

    int nnz() const { return static_cast<int>(vals.size()); }
    double& coeff_ref(int r, int c);           // throws if (r, c) is not in the pattern
    double coeff(int r, int c) const;          // 0 when outside the pattern
    Vector multiply(const Vector& x) const;
    Eigen::SparseMatrix<double> to_eigen() const;

    CsrMatrix transposed() const;
    void scale(double s);
    /// this += s * other; other's pattern must be a subset of this one's.
    void add_scaled(const CsrMatrix& other, double s);
};

/// Deterministic triplet compression: stable order, duplicates summed in
/// insertion order, so identical inputs give bit-identical values.
CsrMatrix csr_from_triplets(int rows, int cols, std::vector<Triplet>&& triplets);

/// Union of patterns, values summed (scale factors applied per matrix).
CsrMatrix csr_sum(const std::vector<std::pair<const CsrMatrix*, double>>& terms);

/// Assembled linear system A x = rhs.
struct SparseSystem {
    CsrMatrix A;
    Vector rhs;
};

/// Constrains the listed dofs to the given values: constrained rows become
/// identity rows and the columns are eliminated symmetrically onto the rhs.
/// Throws on a dof listed twice with conflicting values.
void apply_dirichlet(SparseSystem& system, const std::vector<int>& dofs, const std::vector<double>& values);

/// Appends one Lagrange-multiplier row/column enforcing sum_i w_i x_i = 0.
SparseSystem impose_zero_mean(const SparseSystem& system, const Vector& weights);

} // namespace chnsd
