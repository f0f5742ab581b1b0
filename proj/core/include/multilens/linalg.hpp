#ifndef MULTILENS_LINALG_HPP
#define MULTILENS_LINALG_HPP

#include <cstddef>
#include <vector>

#include "multilens/vec2.hpp"

namespace multilens {

inline double det2(const Mat2& m) { return m.det(); }

/// Small dense real matrix. Systems here are at most 2K x 2K with K <= ~10,
/// so storage is a flat row-major vector and the determinant is plain LU.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  void set_block2(std::size_t i0, std::size_t j0, const Mat2& m) {
    at(i0, j0) = m.a;
    at(i0, j0 + 1) = m.b;
    at(i0 + 1, j0) = m.c;
    at(i0 + 1, j0 + 1) = m.d;
  }

  /// Determinant by LU with partial pivoting; requires a square matrix.
  double determinant() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> a_;
};

/// Grid of dense blocks with prescribed per-block-row and per-block-column
/// sizes. Unset blocks are zero.
class BlockMatrix {
 public:
  BlockMatrix(std::vector<std::size_t> row_sizes,
              std::vector<std::size_t> col_sizes);

  std::size_t block_rows() const { return row_sizes_.size(); }
  std::size_t block_cols() const { return col_sizes_.size(); }
  std::size_t row_size(std::size_t i) const { return row_sizes_[i]; }
  std::size_t col_size(std::size_t j) const { return col_sizes_[j]; }

  /// Stores block (i, j); dimensions must match the declared sizes.
  void set_block(std::size_t i, std::size_t j, DenseMatrix block);
  bool has_block(std::size_t i, std::size_t j) const;
  const DenseMatrix& block(std::size_t i, std::size_t j) const;

  DenseMatrix to_dense() const;

 private:
  std::vector<std::size_t> row_sizes_;
  std::vector<std::size_t> col_sizes_;
  std::vector<DenseMatrix> blocks_;
  std::vector<char> present_;
};

/// Determinant of a block upper-triangular matrix as the product of the
/// diagonal-block determinants. Rejects matrices with nonzero blocks below
/// the diagonal or non-square diagonal blocks.
double block_triangular_det(const BlockMatrix& m);

}  // namespace multilens

#endif
