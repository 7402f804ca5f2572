#pragma once

// Dense linear algebra on small matrices with generic (jet-valued) entries.
// Matrices are row-major std::vector<T>.  Pivoting compares the double value
// part only, which keeps the elimination order independent of derivative
// payloads.

#include <vector>

#include "kosmann/error.hpp"
#include "kosmann/jet.hpp"

namespace kosmann {

template <class T>
std::vector<T> matmul(const std::vector<T>& A, const std::vector<T>& B,
                      int n, int m, int k) {
  std::vector<T> C(static_cast<std::size_t>(n) * k, T{});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      const T& a = A[i * m + j];
      for (int c = 0; c < k; ++c) C[i * k + c] = C[i * k + c] + a * B[j * k + c];
    }
  return C;
}

// Solves A X = B for X (B holds `cols` right-hand sides, row-major n x cols).
template <class T>
std::vector<T> gauss_solve(std::vector<T> A, std::vector<T> B, int n, int cols) {
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::abs(jet_value(A[col * n + col]));
    for (int r = col + 1; r < n; ++r) {
      const double m = std::abs(jet_value(A[r * n + col]));
      if (m > best) {
        best = m;
        piv = r;
      }
    }
    if (!(best > 1e-300))
      throw DomainError("singular matrix in pointwise solve");
    if (piv != col) {
      for (int c = 0; c < n; ++c) std::swap(A[col * n + c], A[piv * n + c]);
      for (int c = 0; c < cols; ++c) std::swap(B[col * cols + c], B[piv * cols + c]);
    }
    const T inv = T(1.0) / A[col * n + col];
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const T f = A[r * n + col] * inv;
      if (jet_value(f) == 0.0 && jet_is_const(f)) continue;
      for (int c = col; c < n; ++c) A[r * n + c] = A[r * n + c] - f * A[col * n + c];
      for (int c = 0; c < cols; ++c)
        B[r * cols + c] = B[r * cols + c] - f * B[col * cols + c];
    }
  }
  for (int r = 0; r < n; ++r) {
    const T inv = T(1.0) / A[r * n + r];
    for (int c = 0; c < cols; ++c) B[r * cols + c] = B[r * cols + c] * inv;
  }
  return B;
}

template <class T>
std::vector<T> mat_inverse(const std::vector<T>& A, int n) {
  std::vector<T> I(static_cast<std::size_t>(n) * n, T{});
  for (int i = 0; i < n; ++i) I[i * n + i] = T(1.0);
  return gauss_solve(A, std::move(I), n, n);
}

template <class T>
T mat_det(std::vector<T> A, int n) {
  T det(1.0);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::abs(jet_value(A[col * n + col]));
    for (int r = col + 1; r < n; ++r) {
      const double m = std::abs(jet_value(A[r * n + col]));
      if (m > best) { best = m; piv = r; }
    }
    if (!(best > 0.0)) return T(0.0);
    if (piv != col) {
      for (int c = 0; c < n; ++c) std::swap(A[col * n + c], A[piv * n + c]);
      det = -det;
    }
    det = det * A[col * n + col];
    const T inv = T(1.0) / A[col * n + col];
    for (int r = col + 1; r < n; ++r) {
      const T f = A[r * n + col] * inv;
      for (int c = col; c < n; ++c) A[r * n + c] = A[r * n + c] - f * A[col * n + c];
    }
  }
  return det;
}

}  // namespace kosmann
