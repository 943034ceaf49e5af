#pragma once

#include <cstddef>
#include <vector>

namespace edgegcn {

/// Constant compressed-sparse-row matrix used for graph propagation (Â·X).
/// It never carries gradients itself.
class SparseMatrix {
public:
    struct Entry {
        std::size_t row;
        std::size_t col;
        double value;
    };

    SparseMatrix() = default;
    /// Duplicate (row, col) entries are summed.
    SparseMatrix(std::size_t rows, std::size_t cols, std::vector<Entry> entries);

    static SparseMatrix from_dense(std::size_t rows, std::size_t cols, const std::vector<double>& dense);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t nnz() const { return values_.size(); }

    const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
    const std::vector<std::size_t>& col_index() const { return col_index_; }
    const std::vector<double>& values() const { return values_; }

    SparseMatrix transpose() const;
    std::vector<double> to_dense() const;
    double row_sum(std::size_t row) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::size_t> col_index_;
    std::vector<double> values_;
};

} // namespace edgegcn
