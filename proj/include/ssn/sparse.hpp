#ifndef SSN_SPARSE_HPP
#define SSN_SPARSE_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ssn/error.hpp"

namespace ssn {

using DenseVector = std::vector<double>;

/// One stored entry of a sparse row, 0-based column.
struct Entry {
  std::size_t col;
  double value;
};

/// Immutable CSR matrix.  Rows are samples, columns are features.
///
/// Invariants (checked on construction):
///   row_ptr non-decreasing, row_ptr[0] = 0, row_ptr[rows] = nnz;
///   column indices strictly increasing within a row and < cols;
///   every value finite.
class SparseMatrix {
 public:
  SparseMatrix() : row_ptr_{0} {}

  SparseMatrix(std::size_t rows, std::size_t cols,
               std::vector<std::size_t> row_ptr,
               std::vector<std::size_t> col_idx, std::vector<double> values)
      : rows_(rows),
        cols_(cols),
        row_ptr_(std::move(row_ptr)),
        col_idx_(std::move(col_idx)),
        values_(std::move(values)) {
    validate();
  }

  /// Builds from per-row entry lists (each row sorted by column).
  static SparseMatrix from_rows(const std::vector<std::vector<Entry>>& rows,
                                std::size_t cols) {
    std::vector<std::size_t> ptr{0};
    std::vector<std::size_t> idx;
    std::vector<double> val;
    ptr.reserve(rows.size() + 1);
    for (const auto& row : rows) {
      for (const auto& e : row) {
        idx.push_back(e.col);
        val.push_back(e.value);
      }
      ptr.push_back(idx.size());
    }
    return SparseMatrix(rows.size(), cols, std::move(ptr), std::move(idx),
                        std::move(val));
  }

  /// Builds from a dense row-major array, dropping exact zeros.
  static SparseMatrix from_dense(std::size_t rows, std::size_t cols,
                                 std::span<const double> dense) {
    if (dense.size() != rows * cols)
      throw UsageError("from_dense: size does not match rows*cols");
    std::vector<std::vector<Entry>> r(rows);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j)
        if (double v = dense[i * cols + j]; v != 0.0) r[i].push_back({j, v});
    return from_rows(r, cols);
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  const std::vector<std::size_t>& row_ptr() const noexcept { return row_ptr_; }
  const std::vector<std::size_t>& col_idx() const noexcept { return col_idx_; }
  const std::vector<double>& values() const noexcept { return values_; }

  std::span<const std::size_t> row_cols(std::size_t i) const {
    check_row(i);
    return {col_idx_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }
  std::span<const double> row_values(std::size_t i) const {
    check_row(i);
    return {values_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }

  /// x_i^T v over the stored entries of row i.
  double row_dot(std::size_t i, std::span<const double> v) const {
    check_row(i);
    if (v.size() != cols_) throw UsageError("row_dot: vector length != cols");
    return row_dot_unchecked(i, v);
  }

  /// out += alpha * x_i.
  void row_axpy(std::size_t i, double alpha, std::span<double> out) const {
    check_row(i);
    if (out.size() != cols_) throw UsageError("row_axpy: vector length != cols");
    row_axpy_unchecked(i, alpha, out);
  }

  /// Returns X v (length rows()).
  DenseVector matvec(std::span<const double> v) const {
    if (v.size() != cols_) throw UsageError("matvec: vector length != cols");
    DenseVector out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = row_dot_unchecked(i, v);
    return out;
  }

  double row_dot_unchecked(std::size_t i, std::span<const double> v) const {
    double s = 0.0;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      s += values_[k] * v[col_idx_[k]];
    return s;
  }

  void row_axpy_unchecked(std::size_t i, double alpha,
                          std::span<double> out) const {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      out[col_idx_[k]] += alpha * values_[k];
  }

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

 private:
  void check_row(std::size_t i) const {
    if (i >= rows_)
      throw UsageError("row index " + std::to_string(i) + " out of range (" +
                       std::to_string(rows_) + " rows)");
  }

  void validate() const {
    if (row_ptr_.size() != rows_ + 1)
      throw UsageError("row_ptr must have rows+1 entries");
    if (row_ptr_.front() != 0) throw UsageError("row_ptr[0] must be 0");
    if (row_ptr_.back() != col_idx_.size())
      throw UsageError("row_ptr[rows] must equal nnz");
    if (col_idx_.size() != values_.size())
      throw UsageError("col_idx and values differ in length");
    for (std::size_t i = 0; i < rows_; ++i) {
      if (row_ptr_[i] > row_ptr_[i + 1])
        throw UsageError("row_ptr decreases at row " + std::to_string(i));
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
        if (col_idx_[k] >= cols_)
          throw UsageError("column index out of range in row " +
                           std::to_string(i));
        if (k > row_ptr_[i] && col_idx_[k] <= col_idx_[k - 1])
          throw UsageError("column indices not strictly increasing in row " +
                           std::to_string(i));
        if (!std::isfinite(values_[k]))
          throw UsageError("non-finite value in row " + std::to_string(i));
      }
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// y += alpha * x
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace ssn

#endif  // SSN_SPARSE_HPP
