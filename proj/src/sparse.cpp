#include "edgegcn/sparse.hpp"

#include "edgegcn/errors.hpp"

#include <algorithm>
#include <string>

namespace edgegcn {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<Entry> entries)
    : rows_(rows), cols_(cols) {
    for (const auto& e : entries) {
        if (e.row >= rows || e.col >= cols) {
            throw DimensionError("SparseMatrix: entry (" + std::to_string(e.row) + "," +
                                 std::to_string(e.col) + ") outside " + std::to_string(rows) + "x" +
                                 std::to_string(cols));
        }
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    row_ptr_.assign(rows + 1, 0);
    for (std::size_t k = 0; k < entries.size(); ++k) {
        if (!col_index_.empty() && k > 0 && entries[k].row == entries[k - 1].row &&
            entries[k].col == entries[k - 1].col) {
            values_.back() += entries[k].value;
            continue;
        }
        col_index_.push_back(entries[k].col);
        values_.push_back(entries[k].value);
        ++row_ptr_[entries[k].row + 1];
    }
    for (std::size_t r = 0; r < rows; ++r) row_ptr_[r + 1] += row_ptr_[r];
}

SparseMatrix SparseMatrix::from_dense(std::size_t rows, std::size_t cols, const std::vector<double>& dense) {
    if (dense.size() != rows * cols) throw DimensionError("SparseMatrix::from_dense: size mismatch");
    std::vector<Entry> entries;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (dense[r * cols + c] != 0.0) entries.push_back({r, c, dense[r * cols + c]});
        }
    }
    return SparseMatrix(rows, cols, std::move(entries));
}

SparseMatrix SparseMatrix::transpose() const {
    std::vector<Entry> entries;
    entries.reserve(nnz());
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            entries.push_back({col_index_[k], r, values_[k]});
        }
    }
    return SparseMatrix(cols_, rows_, std::move(entries));
}

std::vector<double> SparseMatrix::to_dense() const {
    std::vector<double> dense(rows_ * cols_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            dense[r * cols_ + col_index_[k]] = values_[k];
        }
    }
    return dense;
}

double SparseMatrix::row_sum(std::size_t row) const {
    double s = 0.0;
    for (std::size_t k = row_ptr_[row]; k < row_ptr_[row + 1]; ++k) s += values_[k];
    return s;
}

} // namespace edgegcn
