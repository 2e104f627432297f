#pragma once

// Exact rank computations over the rationals for the singular-space oracle.

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <vector>

namespace oracle {

using rational = boost::multiprecision::cpp_rational;
using RMatrix = std::vector<std::vector<rational>>;

inline RMatrix multiply(const RMatrix& a, const RMatrix& b) {
  const std::size_t n = a.size(), m = b[0].size(), k = b.size();
  RMatrix out(n, std::vector<rational>(m, rational(0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < k; ++l)
      if (a[i][l] != 0)
        for (std::size_t j = 0; j < m; ++j) out[i][j] += a[i][l] * b[l][j];
  return out;
}

inline std::size_t rank(RMatrix a) {
  if (a.empty()) return 0;
  const std::size_t rows = a.size(), cols = a[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t pivot = r;
    while (pivot < rows && a[pivot][c] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(a[pivot], a[r]);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      const rational f = a[i][c] / a[r][c];
      for (std::size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
    }
    ++r;
  }
  return r;
}

struct SingularOracle {
  int dimS = 0;
  std::optional<int> k0;
};

/// q(X) = X^T (A + iB) X with A, B rational symmetric 2n x 2n.
/// F = J^{-1} Q for sigma(X, Z) = X^T J Z, sigma((x,xi),(y,eta)) = xi.y - x.eta.
inline SingularOracle singular_space(const RMatrix& A, const RMatrix& B) {
  const std::size_t d = A.size(), n = d / 2;
  RMatrix Jinv(d, std::vector<rational>(d, rational(0)));
  for (std::size_t i = 0; i < n; ++i) {
    Jinv[i][n + i] = 1;
    Jinv[n + i][i] = -1;
  }
  const RMatrix re = multiply(Jinv, A);
  const RMatrix im = multiply(Jinv, B);
  RMatrix stacked;
  RMatrix power = re;
  SingularOracle out;
  for (std::size_t j = 0; j < d; ++j) {
    for (const auto& row : power) stacked.push_back(row);
    const std::size_t r = rank(stacked);
    if (r == d && !out.k0) out.k0 = static_cast<int>(j);
    power = multiply(power, im);
  }
  out.dimS = static_cast<int>(d - rank(stacked));
  return out;
}

}  // namespace oracle
