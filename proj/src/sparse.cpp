#include "chnsd/sparse.hpp"

#include <algorithm>
#include <cmath>

namespace chnsd {

double& CsrMatrix::coeff_ref(int r, int c) {
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
        if (col_idx[k] == c) return vals[k];
    throw AssemblyError("entry (" + std::to_string(r) + ", " + std::to_string(c) + ") not in sparsity pattern");
}

double CsrMatrix::coeff(int r, int c) const {
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
        if (col_idx[k] == c) return vals[k];
    return 0.0;
}

Vector CsrMatrix::multiply(const Vector& x) const {
    Vector y = Vector::Zero(rows);
    for (int r = 0; r < rows; ++r) {
        double s = 0.0;
        for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += vals[k] * x[col_idx[k]];
        y[r] = s;
    }
    return y;
}

Eigen::SparseMatrix<double> CsrMatrix::to_eigen() const {
    Eigen::SparseMatrix<double> m(rows, cols);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(vals.size());
    for (int r = 0; r < rows; ++r)
        for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) trips.emplace_back(r, col_idx[k], vals[k]);
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

CsrMatrix CsrMatrix::transposed() const {
    CsrMatrix t;
    t.rows = cols;
    t.cols = rows;
    t.row_ptr.assign(cols + 1, 0);
    for (int c : col_idx) t.row_ptr[c + 1]++;
    for (int r = 0; r < cols; ++r) t.row_ptr[r + 1] += t.row_ptr[r];
    t.col_idx.resize(vals.size());
    t.vals.resize(vals.size());
    std::vector<int> fill(t.row_ptr.begin(), t.row_ptr.end() - 1);
    for (int r = 0; r < rows; ++r)
        for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
            const int pos = fill[col_idx[k]]++;
            t.col_idx[pos] = r;
            t.vals[pos] = vals[k];
        }
    return t;
}

void CsrMatrix::scale(double s) {
    for (double& v : vals) v *= s;
}

void CsrMatrix::add_scaled(const CsrMatrix& other, double s) {
    if (other.rows != rows || other.cols != cols) throw AssemblyError("add_scaled: shape mismatch");
    for (int r = 0; r < rows; ++r) {
        int k = row_ptr[r];
        for (int ko = other.row_ptr[r]; ko < other.row_ptr[r + 1]; ++ko) {
            const int c = other.col_idx[ko];
            while (k < row_ptr[r + 1] && col_idx[k] < c) ++k;
            if (k >= row_ptr[r + 1] || col_idx[k] != c)
                throw AssemblyError("add_scaled: pattern not a subset");
            vals[k] += s * other.vals[ko];
        }
    }
}

CsrMatrix csr_from_triplets(int rows, int cols, std::vector<Triplet>&& triplets) {
    std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    CsrMatrix m;
    m.rows = rows;
    m.cols = cols;
    m.row_ptr.assign(rows + 1, 0);
    m.col_idx.reserve(triplets.size());
    m.vals.reserve(triplets.size());
    std::size_t i = 0;
    for (int r = 0; r < rows; ++r) {
        while (i < triplets.size() && triplets[i].row == r) {
            const int c = triplets[i].col;
            double v = 0.0;
            while (i < triplets.size() && triplets[i].row == r && triplets[i].col == c) v += triplets[i++].value;
            m.col_idx.push_back(c);
            m.vals.push_back(v);
        }
        m.row_ptr[r + 1] = static_cast<int>(m.col_idx.size());
    }
    if (i != triplets.size()) throw AssemblyError("triplet row index out of range");
    return m;
}

CsrMatrix csr_sum(const std::vector<std::pair<const CsrMatrix*, double>>& terms) {
    if (terms.empty()) throw AssemblyError("csr_sum of nothing");
    const int rows = terms[0].first->rows, cols = terms[0].first->cols;
    std::vector<Triplet> trips;
    for (const auto& [m, s] : terms) {
        if (m->rows != rows || m->cols != cols) throw AssemblyError("csr_sum: shape mismatch");
        for (int r = 0; r < rows; ++r)
            for (int k = m->row_ptr[r]; k < m->row_ptr[r + 1]; ++k)
                trips.push_back({r, m->col_idx[k], s * m->vals[k]});
    }
    return csr_from_triplets(rows, cols, std::move(trips));
}

void apply_dirichlet(SparseSystem& system, const std::vector<int>& dofs, const std::vector<double>& values) {
    if (dofs.size() != values.size()) throw AssemblyError("apply_dirichlet: dof/value count mismatch");
    CsrMatrix& A = system.A;
    std::vector<char> fixed(A.rows, 0);
    std::vector<double> val(A.rows, 0.0);
    for (std::size_t i = 0; i < dofs.size(); ++i) {
        const int d = dofs[i];
        if (d < 0 || d >= A.rows) throw AssemblyError("apply_dirichlet: dof out of range");
        if (fixed[d] && val[d] != values[i])
            throw AssemblyError("apply_dirichlet: dof " + std::to_string(d) + " constrained twice with conflicting values");
        fixed[d] = 1;
        val[d] = values[i];
    }

    for (int r = 0; r < A.rows; ++r) {
        if (fixed[r]) {
            for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k)
                A.vals[k] = (A.col_idx[k] == r) ? 1.0 : 0.0;
            system.rhs[r] = val[r];
        } else {
            for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k) {
                const int c = A.col_idx[k];
                if (fixed[c]) {
                    system.rhs[r] -= A.vals[k] * val[c];
                    A.vals[k] = 0.0;
                }
            }
        }
    }
}

SparseSystem impose_zero_mean(const SparseSystem& system, const Vector& weights) {
    const int n = system.A.rows;
    if (weights.size() != n) throw AssemblyError("impose_zero_mean: weight size mismatch");
    std::vector<Triplet> trips;
    trips.reserve(system.A.vals.size() + 2 * n);
    for (int r = 0; r < n; ++r)
        for (int k = system.A.row_ptr[r]; k < system.A.row_ptr[r + 1]; ++k)
            trips.push_back({r, system.A.col_idx[k], system.A.vals[k]});
    for (int i = 0; i < n; ++i) {
        trips.push_back({i, n, weights[i]});
        trips.push_back({n, i, weights[i]});
    }
    SparseSystem out;
    out.A = csr_from_triplets(n + 1, n + 1, std::move(trips));
    out.rhs = Vector::Zero(n + 1);
    out.rhs.head(n) = system.rhs;
    return out;
}

} // namespace chnsd
