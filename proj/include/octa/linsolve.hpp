#pragma once

#include <array>
#include <cmath>

#include "octa/errors.hpp"

namespace octa {

/// Solve A x = b in place for small dense systems (Gaussian elimination with
/// partial pivoting). Throws SolveError on a numerically singular pivot.
template <int N>
std::array<double, N> linsolve(std::array<std::array<double, N>, N> a,
                               std::array<double, N> b) {
  for (int col = 0; col < N; ++col) {
    int piv = col;
    for (int r = col + 1; r < N; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    if (std::fabs(a[piv][col]) < 1e-300)
      throw SolveError("linsolve: singular pivot");
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (int r = col + 1; r < N; ++r) {
      double m = a[r][col] / a[col][col];
      for (int c = col; c < N; ++c) a[r][c] -= m * a[col][c];
      b[r] -= m * b[col];
    }
  }
  std::array<double, N> x{};
  for (int r = N - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < N; ++c) s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }
  return x;
}

}  // namespace octa
