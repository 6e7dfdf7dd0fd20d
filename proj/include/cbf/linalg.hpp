#pragma once

#include "cbf/rational.hpp"

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace cbf::linalg {

using QMatrix = std::vector<std::vector<Rational>>;

inline QMatrix identity(std::size_t n) {
  QMatrix id(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) id[i][i] = 1;
  return id;
}

inline QMatrix transpose(const QMatrix& a) {
  if (a.empty()) return {};
  QMatrix t(a[0].size(), std::vector<Rational>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) t[j][i] = a[i][j];
  return t;
}

/// Row-reduces in place; returns the rank and the sign-tracked determinant product of pivots.
inline std::pair<std::size_t, Rational> eliminate(QMatrix& a) {
  const std::size_t rows = a.size();
  const std::size_t cols = rows ? a[0].size() : 0;
  std::size_t rank = 0;
  Rational det = 1;
  for (std::size_t col = 0; col < cols && rank < rows; ++col) {
    std::size_t pivot = rank;
    while (pivot < rows && a[pivot][col] == 0) ++pivot;
    if (pivot == rows) {
      det = 0;
      continue;
    }
    if (pivot != rank) {
      std::swap(a[pivot], a[rank]);
      det = -det;
    }
    det *= a[rank][col];
    for (std::size_t r = rank + 1; r < rows; ++r) {
      if (a[r][col] == 0) continue;
      Rational f = a[r][col] / a[rank][col];
      for (std::size_t c = col; c < cols; ++c) a[r][c] -= f * a[rank][c];
    }
    ++rank;
  }
  if (rank < rows || rank < cols) det = 0;
  return {rank, det};
}

inline std::size_t rank(QMatrix a) { return eliminate(a).first; }

inline Rational determinant(QMatrix a) {
  if (a.empty()) return 1;
  return eliminate(a).second;
}

/// Gauss-Jordan inverse; nullopt when singular.
inline std::optional<QMatrix> inverse(const QMatrix& a) {
  const std::size_t n = a.size();
  QMatrix work = a;
  QMatrix inv = identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && work[pivot][col] == 0) ++pivot;
    if (pivot == n) return std::nullopt;
    std::swap(work[pivot], work[col]);
    std::swap(inv[pivot], inv[col]);
    Rational p = work[col][col];
    for (std::size_t c = 0; c < n; ++c) {
      work[col][c] /= p;
      inv[col][c] /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || work[r][col] == 0) continue;
      Rational f = work[r][col];
      for (std::size_t c = 0; c < n; ++c) {
        work[r][c] -= f * work[col][c];
        inv[r][c] -= f * inv[col][c];
      }
    }
  }
  return inv;
}

inline std::vector<Rational> multiply(const QMatrix& a, const std::vector<Rational>& x) {
  std::vector<Rational> y(a.size(), Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) y[i] += a[i][j] * x[j];
  return y;
}

}  // namespace cbf::linalg
