#include "multilens/linalg.hpp"

#include <cmath>
#include <cstdlib>
#include <utility>

#include "multilens/errors.hpp"

namespace multilens {

double DenseMatrix::determinant() const {
  if (rows_ != cols_) {
    throw ValidationError("determinant of non-square matrix");
  }
  const std::size_t n = rows_;
  if (n == 0) return 1.0;
  std::vector<double> lu(a_);
  auto e = [&](std::size_t i, std::size_t j) -> double& {
    return lu[i * n + j];
  };
  double det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(e(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(e(i, k)) > best) {
        best = std::abs(e(i, k));
        piv = i;
      }
    }
    if (best == 0.0) return 0.0;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(e(piv, j), e(k, j));
      det = -det;
    }
    det *= e(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = e(i, k) / e(k, k);
      for (std::size_t j = k + 1; j < n; ++j) e(i, j) -= f * e(k, j);
    }
  }
  return det;
}

BlockMatrix::BlockMatrix(std::vector<std::size_t> row_sizes,
                         std::vector<std::size_t> col_sizes)
    : row_sizes_(std::move(row_sizes)),
      col_sizes_(std::move(col_sizes)),
      blocks_(row_sizes_.size() * col_sizes_.size()),
      present_(row_sizes_.size() * col_sizes_.size(), 0) {}

void BlockMatrix::set_block(std::size_t i, std::size_t j, DenseMatrix block) {
  if (i >= block_rows() || j >= block_cols()) {
    throw ValidationError("block index out of range");
  }
  if (block.rows() != row_sizes_[i] || block.cols() != col_sizes_[j]) {
    throw ValidationError("block dimensions do not match declared sizes");
  }
  blocks_[i * block_cols() + j] = std::move(block);
  present_[i * block_cols() + j] = 1;
}

bool BlockMatrix::has_block(std::size_t i, std::size_t j) const {
  return present_[i * block_cols() + j] != 0;
}

const DenseMatrix& BlockMatrix::block(std::size_t i, std::size_t j) const {
  return blocks_[i * block_cols() + j];
}

DenseMatrix BlockMatrix::to_dense() const {
  std::size_t nr = 0, nc = 0;
  for (auto s : row_sizes_) nr += s;
  for (auto s : col_sizes_) nc += s;
  DenseMatrix out(nr, nc);
  std::size_t r0 = 0;
  for (std::size_t i = 0; i < block_rows(); ++i) {
    std::size_t c0 = 0;
    for (std::size_t j = 0; j < block_cols(); ++j) {
      if (has_block(i, j)) {
        const DenseMatrix& b = block(i, j);
        for (std::size_t r = 0; r < b.rows(); ++r)
          for (std::size_t c = 0; c < b.cols(); ++c)
            out.at(r0 + r, c0 + c) = b.at(r, c);
      }
      c0 += col_sizes_[j];
    }
    r0 += row_sizes_[i];
  }
  return out;
}

double block_triangular_det(const BlockMatrix& m) {
  if (m.block_rows() != m.block_cols()) {
    throw ValidationError("block-triangular determinant needs a square grid");
  }
  const std::size_t k = m.block_rows();
  for (std::size_t i = 0; i < k; ++i) {
    if (m.row_size(i) != m.col_size(i)) {
      throw ValidationError("non-square diagonal block");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (!m.has_block(i, j)) continue;
      const DenseMatrix& b = m.block(i, j);
      for (std::size_t r = 0; r < b.rows(); ++r)
        for (std::size_t c = 0; c < b.cols(); ++c)
          if (b.at(r, c) != 0.0) {
            throw ValidationError("nonzero block below the diagonal");
          }
    }
  }
  double det = 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    det *= m.has_block(i, i) ? m.block(i, i).determinant() : 0.0;
  }
  return det;
}

}  // namespace multilens
