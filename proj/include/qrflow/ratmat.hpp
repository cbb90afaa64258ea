#pragma once

#include <vector>

#include "qrflow/errors.hpp"
#include "qrflow/rational.hpp"

namespace qrflow {

// Dense exact-rational matrix, row major.
struct RatMat {
  int rows = 0, cols = 0;
  std::vector<Rat> a;

  RatMat() = default;
  RatMat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * static_cast<std::size_t>(c)) {
    if (r < 0 || c < 0) throw input_error("negative matrix dimension");
  }

  Rat& at(int i, int j) { return a[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(j)]; }
  const Rat& at(int i, int j) const { return a[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(j)]; }

  static RatMat identity(int n) {
    RatMat m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  bool operator==(const RatMat& o) const { return rows == o.rows && cols == o.cols && a == o.a; }
  bool operator!=(const RatMat& o) const { return !(*this == o); }
};

inline RatMat mat_mul(const RatMat& x, const RatMat& y) {
  if (x.cols != y.rows) throw input_error("matrix product shape mismatch");
  RatMat out(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      if (x.at(i, k) == 0) continue;
      for (int j = 0; j < y.cols; ++j) out.at(i, j) += x.at(i, k) * y.at(k, j);
    }
  return out;
}

inline RatMat mat_add(const RatMat& x, const RatMat& y) {
  if (x.rows != y.rows || x.cols != y.cols) throw input_error("matrix sum shape mismatch");
  RatMat out(x.rows, x.cols);
  for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] = x.a[i] + y.a[i];
  return out;
}

inline RatMat mat_sub(const RatMat& x, const RatMat& y) {
  if (x.rows != y.rows || x.cols != y.cols) throw input_error("matrix difference shape mismatch");
  RatMat out(x.rows, x.cols);
  for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] = x.a[i] - y.a[i];
  return out;
}

inline RatMat mat_scale(const Rat& s, const RatMat& x) {
  RatMat out = x;
  for (auto& v : out.a) v *= s;
  return out;
}

inline RatMat mat_transpose(const RatMat& x) {
  RatMat out(x.cols, x.rows);
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < x.cols; ++j) out.at(j, i) = x.at(i, j);
  return out;
}

// Stacks blocks vertically; all must share the column count.
inline RatMat mat_vstack(const std::vector<RatMat>& blocks) {
  if (blocks.empty()) throw input_error("empty stack");
  int cols = blocks[0].cols, rows = 0;
  for (const auto& b : blocks) {
    if (b.cols != cols) throw input_error("stack column mismatch");
    rows += b.rows;
  }
  RatMat out(rows, cols);
  int r = 0;
  for (const auto& b : blocks) {
    for (int i = 0; i < b.rows; ++i)
      for (int j = 0; j < cols; ++j) out.at(r + i, j) = b.at(i, j);
    r += b.rows;
  }
  return out;
}

// In-place reduced row echelon form; returns the pivot column of each pivot
// row, in row order.
inline std::vector<int> rref(RatMat& m) {
  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < m.cols && row < m.rows; ++col) {
    int piv = -1;
    for (int r = row; r < m.rows; ++r)
      if (m.at(r, col) != 0) { piv = r; break; }
    if (piv < 0) continue;
    if (piv != row)
      for (int j = 0; j < m.cols; ++j) std::swap(m.at(piv, j), m.at(row, j));
    Rat inv = Rat(1) / m.at(row, col);
    for (int j = col; j < m.cols; ++j) m.at(row, j) *= inv;
    for (int r = 0; r < m.rows; ++r) {
      if (r == row || m.at(r, col) == 0) continue;
      Rat f = m.at(r, col);
      for (int j = col; j < m.cols; ++j) m.at(r, j) -= f * m.at(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

inline int mat_rank(RatMat m) { return static_cast<int>(rref(m).size()); }

// Basis of the right nullspace, one kernel vector per column. Free variables
// are taken in ascending column order and set to 1, so the basis is canonical
// for a given input.
inline RatMat nullspace(RatMat m) {
  int n = m.cols;
  auto pivots = rref(m);
  std::vector<bool> is_pivot(static_cast<std::size_t>(n), false);
  for (int p : pivots) is_pivot[static_cast<std::size_t>(p)] = true;
  std::vector<int> free_cols;
  for (int j = 0; j < n; ++j)
    if (!is_pivot[static_cast<std::size_t>(j)]) free_cols.push_back(j);
  RatMat basis(n, static_cast<int>(free_cols.size()));
  for (std::size_t k = 0; k < free_cols.size(); ++k) {
    int fc = free_cols[k];
    basis.at(fc, static_cast<int>(k)) = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r)
      basis.at(pivots[r], static_cast<int>(k)) = -m.at(static_cast<int>(r), fc);
  }
  return basis;
}

inline RatMat mat_inverse(const RatMat& m) {
  if (m.rows != m.cols) throw input_error("inverse of a non-square matrix");
  int n = m.rows;
  RatMat aug(n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) aug.at(i, j) = m.at(i, j);
    aug.at(i, n + i) = 1;
  }
  auto pivots = rref(aug);
  if (static_cast<int>(pivots.size()) != n || pivots.back() >= n)
    throw domain_error("matrix is singular");
  RatMat out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.at(i, j) = aug.at(i, n + j);
  return out;
}

// Column vector with the listed entries.
inline RatMat mat_col(const std::vector<Rat>& v) {
  RatMat out(static_cast<int>(v.size()), 1);
  for (std::size_t i = 0; i < v.size(); ++i) out.at(static_cast<int>(i), 0) = v[i];
  return out;
}

// True iff v lies in the column span of basis.
inline bool in_column_span(const RatMat& basis, const RatMat& v) {
  if (v.cols != 1 || v.rows != basis.rows) throw input_error("span test shape mismatch");
  RatMat aug(basis.rows, basis.cols + 1);
  for (int i = 0; i < basis.rows; ++i) {
    for (int j = 0; j < basis.cols; ++j) aug.at(i, j) = basis.at(i, j);
    aug.at(i, basis.cols) = v.at(i, 0);
  }
  RatMat b = basis;
  return mat_rank(aug) == mat_rank(b);
}

}  // namespace qrflow
