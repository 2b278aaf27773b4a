#pragma once

// Dense linear algebra over Z/q for word-size primes q, used by the
// multi-modular eigenspace solver (solve mod q, CRT, reconstruct, then
// verify exactly — the exact step lives with the caller).

#include <cstdint>
#include <vector>

#include "mtel/arith.hpp"

namespace mtel {

struct ModMatrix {
  int64_t q = 0;
  int32_t rows = 0, cols = 0;
  std::vector<int64_t> a;  // row-major, entries in [0, q)

  ModMatrix() = default;
  ModMatrix(int32_t r, int32_t c, int64_t q_)
      : q(q_), rows(r), cols(c), a(static_cast<size_t>(r) * c, 0) {}
  int64_t& at(int32_t i, int32_t j) { return a[static_cast<size_t>(i) * cols + j]; }
  int64_t at(int32_t i, int32_t j) const { return a[static_cast<size_t>(i) * cols + j]; }
};

inline ModMatrix matmul(const ModMatrix& A, const ModMatrix& B) {
  if (A.cols != B.rows || A.q != B.q) fail(errc::internal, "matmul shape/modulus");
  ModMatrix C(A.rows, B.cols, A.q);
  for (int32_t i = 0; i < A.rows; ++i)
    for (int32_t k = 0; k < A.cols; ++k) {
      const int64_t aik = A.at(i, k);
      if (aik == 0) continue;
      const int64_t* brow = &B.a[static_cast<size_t>(k) * B.cols];
      int64_t* crow = &C.a[static_cast<size_t>(i) * C.cols];
      for (int32_t j = 0; j < B.cols; ++j) {
        crow[j] = (crow[j] + mulmod64(aik, brow[j], A.q)) % A.q;
      }
    }
  return C;
}

// In-place reduced row echelon form; returns the pivot column of each
// pivot row (deterministic: first nonzero column scan).
inline std::vector<int32_t> rref_mod(ModMatrix& M) {
  std::vector<int32_t> pivots;
  int32_t r = 0;
  for (int32_t c = 0; c < M.cols && r < M.rows; ++c) {
    int32_t sel = -1;
    for (int32_t i = r; i < M.rows; ++i)
      if (M.at(i, c) != 0) {
        sel = i;
        break;
      }
    if (sel < 0) continue;
    if (sel != r)
      for (int32_t j = 0; j < M.cols; ++j) std::swap(M.at(sel, j), M.at(r, j));
    const int64_t inv = invmod64(M.at(r, c), M.q);
    for (int32_t j = c; j < M.cols; ++j) M.at(r, j) = mulmod64(M.at(r, j), inv, M.q);
    for (int32_t i = 0; i < M.rows; ++i) {
      if (i == r) continue;
      const int64_t f = M.at(i, c);
      if (f == 0) continue;
      for (int32_t j = c; j < M.cols; ++j) {
        int64_t t = M.at(i, j) - mulmod64(f, M.at(r, j), M.q);
        if (t < 0) t += M.q;
        M.at(i, j) = t;
      }
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

// Kernel of M as columns of a (M.cols × k) matrix, k = nullity.
inline ModMatrix kernel_mod(ModMatrix M) {
  const int64_t q = M.q;
  const int32_t n = M.cols;
  std::vector<int32_t> pivots = rref_mod(M);
  std::vector<int32_t> pivot_row_of_col(n, -1);
  for (size_t r = 0; r < pivots.size(); ++r) pivot_row_of_col[pivots[r]] = static_cast<int32_t>(r);
  std::vector<int32_t> free_cols;
  for (int32_t c = 0; c < n; ++c)
    if (pivot_row_of_col[c] < 0) free_cols.push_back(c);
  ModMatrix K(n, static_cast<int32_t>(free_cols.size()), q);
  for (size_t j = 0; j < free_cols.size(); ++j) {
    const int32_t f = free_cols[j];
    K.at(f, static_cast<int32_t>(j)) = 1;
    for (int32_t c = 0; c < n; ++c) {
      const int32_t r = pivot_row_of_col[c];
      if (r < 0) continue;
      const int64_t v = M.at(r, f);
      if (v != 0) K.at(c, static_cast<int32_t>(j)) = q - v;
    }
  }
  return K;
}

// Reduce a rational mod q; false when q divides the denominator.
inline bool rat_mod(const Rat& r, int64_t q, int64_t& out) {
  const int64_t d = mod_i64(Int(r.get_den()), q);
  if (d == 0) return false;
  const int64_t n = mod_i64(Int(r.get_num()), q);
  out = mulmod64(n, invmod64(d, q), q);
  return true;
}

}  // namespace mtel
