#include "scheme_detail.hpp"

#include <algorithm>

namespace chnsd::detail {

void BlockMatrix::set_layout(std::vector<int> block_sizes) {
    offsets_.assign(1, 0);
    for (int s : block_sizes) offsets_.push_back(offsets_.back() + s);
}

void BlockMatrix::proto_add(int bi, int bj, const CsrMatrix& m, double scale, bool transposed) {
    const int ro = offsets_[bi], co = offsets_[bj];
    for (int r = 0; r < m.rows; ++r)
        for (int k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) {
            if (!transposed)
                proto_.push_back({ro + r, co + m.col_idx[k], scale * m.vals[k]});
            else
                proto_.push_back({ro + m.col_idx[k], co + r, scale * m.vals[k]});
        }
}

void BlockMatrix::proto_entry(int row, int col, double value) { proto_.push_back({row, col, value}); }

void BlockMatrix::finalize_pattern() {
    a_ = csr_from_triplets(size(), size(), std::move(proto_));
    proto_.clear();
    finalized_ = true;
}

void BlockMatrix::clear_values() { std::fill(a_.vals.begin(), a_.vals.end(), 0.0); }

namespace {

inline double& locate(CsrMatrix& a, int r, int c) {
    const int* base = a.col_idx.data();
    const int* lo = base + a.row_ptr[r];
    const int* hi = base + a.row_ptr[r + 1];
    const int* it = std::lower_bound(lo, hi, c);
    if (it == hi || *it != c) throw AssemblyError("block entry outside the prototype pattern");
    return a.vals[it - base];
}

} // namespace

void BlockMatrix::add(int bi, int bj, const CsrMatrix& m, double scale, bool transposed) {
    const int ro = offsets_[bi], co = offsets_[bj];
    for (int r = 0; r < m.rows; ++r)
        for (int k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) {
            if (!transposed)
                locate(a_, ro + r, co + m.col_idx[k]) += scale * m.vals[k];
            else
                locate(a_, ro + m.col_idx[k], co + r) += scale * m.vals[k];
        }
}

void BlockMatrix::entry(int row, int col, double value) { locate(a_, row, col) += value; }

} // namespace chnsd::detail
