#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace deepens {

using Rational = mpq_class;

/// Exact conversion; every finite double is a dyadic rational.
inline Rational to_rational(double v) { return Rational(v); }

using RationalMatrix = std::vector<std::vector<Rational>>;

/// Rank by Gaussian elimination over Q. Rows may be ragged only if empty.
inline std::size_t exact_rank(RationalMatrix m) {
  if (m.empty()) return 0;
  const std::size_t rows = m.size();
  const std::size_t cols = m.front().size();
  std::size_t rank = 0;
  for (std::size_t col = 0; col < cols && rank < rows; ++col) {
    std::size_t pivot = rank;
    while (pivot < rows && m[pivot][col] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(m[pivot], m[rank]);
    const Rational inv = 1 / m[rank][col];
    for (std::size_t r = rank + 1; r < rows; ++r) {
      if (m[r][col] == 0) continue;
      const Rational factor = m[r][col] * inv;
      for (std::size_t c = col; c < cols; ++c) {
        if (m[rank][c] != 0) m[r][c] -= factor * m[rank][c];
      }
    }
    ++rank;
  }
  return rank;
}

}  // namespace deepens
