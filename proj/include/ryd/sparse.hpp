#pragma once
// Sparse complex operator in compressed-row form with a canonical entry order.
//
// Entries are stored row-major with strictly increasing columns inside each
// row and duplicates merged, so two builds from the same triplet multiset are
// bit-identical regardless of insertion order.

#include <algorithm>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace ryd {

using Complex = std::complex<double>;

struct Triplet {
  std::int64_t row = 0;
  std::int64_t col = 0;
  Complex value;
};

class SparseOperator {
 public:
  SparseOperator() = default;

  // Sorts (row, col), merges duplicates by summation in sorted order and
  // drops entries that merged to exactly zero.
  static SparseOperator from_triplets(std::int64_t rows, std::int64_t cols,
                                      std::vector<Triplet> ts) {
    if (rows < 0 || cols < 0)
      throw std::invalid_argument("SparseOperator: negative shape");
    for (const auto& t : ts)
      if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
        throw std::invalid_argument("SparseOperator: triplet out of range");
    std::stable_sort(ts.begin(), ts.end(), [](const Triplet& a, const Triplet& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    SparseOperator op;
    op.rows_ = rows;
    op.cols_ = cols;
    op.row_ptr_.assign(static_cast<std::size_t>(rows) + 1, 0);
    for (std::size_t k = 0; k < ts.size();) {
      std::size_t j = k;
      Complex v = 0.0;
      while (j < ts.size() && ts[j].row == ts[k].row && ts[j].col == ts[k].col)
        v += ts[j++].value;
      if (v != Complex(0.0, 0.0)) {
        op.col_.push_back(static_cast<std::int32_t>(ts[k].col));
        op.val_.push_back(v);
        ++op.row_ptr_[static_cast<std::size_t>(ts[k].row) + 1];
      }
      k = j;
    }
    for (std::size_t r = 0; r < static_cast<std::size_t>(rows); ++r)
      op.row_ptr_[r + 1] += op.row_ptr_[r];
    return op;
  }

  std::int64_t rows() const { return rows_; }
  std::int64_t cols() const { return cols_; }
  std::int64_t nnz() const { return static_cast<std::int64_t>(val_.size()); }

  // y = A x.  y is resized; aliasing x is not allowed.
  void apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const {
    if (x.size() != cols_)
      throw std::invalid_argument("SparseOperator::apply: size mismatch");
    y.resize(rows_);
    for (std::int64_t r = 0; r < rows_; ++r) {
      Complex acc = 0.0;
      for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
        acc += val_[k] * x[col_[k]];
      y[r] = acc;
    }
  }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const {
    Eigen::VectorXcd y;
    apply(x, y);
    return y;
  }

  Eigen::MatrixXcd dense() const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(rows_, cols_);
    for (std::int64_t r = 0; r < rows_; ++r)
      for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
        m(r, col_[k]) += val_[k];
    return m;
  }

  SparseOperator adjoint() const {
    std::vector<Triplet> ts;
    ts.reserve(val_.size());
    for (std::int64_t r = 0; r < rows_; ++r)
      for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
        ts.push_back({col_[k], r, std::conj(val_[k])});
    return from_triplets(cols_, rows_, std::move(ts));
  }

  // Entry lookup; returns 0 for absent entries.
  Complex entry(std::int64_t row, std::int64_t col) const {
    const auto lo = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row]);
    const auto hi = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row + 1]);
    const auto it = std::lower_bound(lo, hi, static_cast<std::int32_t>(col));
    if (it == hi || *it != col) return Complex(0.0, 0.0);
    return val_[static_cast<std::size_t>(it - col_.begin())];
  }

  bool is_hermitian(double tol) const {
    if (rows_ != cols_) return false;
    for (std::int64_t r = 0; r < rows_; ++r)
      for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
        if (std::abs(val_[k] - std::conj(entry(col_[k], r))) > tol) return false;
    return true;
  }

  // Canonical entry stream (row-major, columns ascending).
  std::vector<Triplet> triplets() const {
    std::vector<Triplet> ts;
    ts.reserve(val_.size());
    for (std::int64_t r = 0; r < rows_; ++r)
      for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
        ts.push_back({r, col_[k], val_[k]});
    return ts;
  }

  bool operator==(const SparseOperator& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && row_ptr_ == o.row_ptr_ &&
           col_ == o.col_ && val_ == o.val_;
  }

  // Largest absolute row sum; cheap upper bound on the spectral norm.
  double norm_inf() const {
    double m = 0.0;
    for (std::int64_t r = 0; r < rows_; ++r) {
      double s = 0.0;
      for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
        s += std::abs(val_[k]);
      m = std::max(m, s);
    }
    return m;
  }

 private:
  std::int64_t rows_ = 0, cols_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::int32_t> col_;
  std::vector<Complex> val_;
};

}  // namespace ryd
