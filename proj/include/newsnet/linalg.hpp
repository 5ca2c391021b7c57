#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "newsnet/errors.hpp"

namespace newsnet {

// Eigenvalues of a real symmetric matrix by the cyclic Jacobi method,
// returned in descending order. Sizes here are at most a few hundred.
inline std::vector<double> symmetric_eigenvalues(std::vector<std::vector<double>> a,
                                                 double tol = 1e-12, int max_sweeps = 100) {
  const std::size_t n = a.size();
  if (n == 0) return {};
  for (const auto& row : a)
    if (row.size() != n) throw ComputationError("symmetric_eigenvalues: matrix not square");

  auto off_diag = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += a[i][j] * a[i][j];
    return std::sqrt(s);
  };

  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(a[i][j]));
  if (scale == 0.0) return std::vector<double>(n, 0.0);

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (off_diag() <= tol * scale * static_cast<double>(n)) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) <= tol * scale * 1e-4) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }

  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a[i][i];
  std::sort(eig.begin(), eig.end(), std::greater<double>());
  return eig;
}

}  // namespace newsnet
