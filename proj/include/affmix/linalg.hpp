#ifndef AFFMIX_LINALG_HPP
#define AFFMIX_LINALG_HPP

#include <algorithm>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "affmix/matrix.hpp"

namespace affmix {

/// Exact determinant by Bareiss fraction-free elimination. Every division
/// inside the elimination is exact, so intermediate values stay integral.
inline BigInt det_int(const IntMatrix& a) {
  const std::size_t k = a.dim();
  if (k == 0) return BigInt(1);
  IntMatrix m = a;
  BigInt prev(1);
  int sign = 1;
  for (std::size_t c = 0; c + 1 < k; ++c) {
    if (m(c, c) == 0) {
      std::size_t r = c + 1;
      while (r < k && m(r, c) == 0) ++r;
      if (r == k) return BigInt(0);
      for (std::size_t j = 0; j < k; ++j) std::swap(m(c, j), m(r, j));
      sign = -sign;
    }
    for (std::size_t i = c + 1; i < k; ++i) {
      for (std::size_t j = c + 1; j < k; ++j) {
        BigInt v = m(i, j) * m(c, c) - m(i, c) * m(c, j);
        m(i, j) = v / prev;
      }
      m(i, c) = 0;
    }
    prev = m(c, c);
  }
  BigInt d = m(k - 1, k - 1);
  return sign < 0 ? BigInt(-d) : d;
}

/// Rank over Q of a rectangular integer matrix given as a list of rows.
inline std::size_t rank_int(std::vector<IntVector> rows) {
  if (rows.empty()) return 0;
  const std::size_t cols = rows.front().size();
  std::size_t rank = 0;
  BigInt prev(1);
  for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
    std::size_t piv = rank;
    while (piv < rows.size() && rows[piv][c] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[rank]);
    for (std::size_t i = rank + 1; i < rows.size(); ++i) {
      for (std::size_t j = c + 1; j < cols; ++j) {
        BigInt v = rows[i][j] * rows[rank][c] - rows[i][c] * rows[rank][j];
        rows[i][j] = v / prev;
      }
      rows[i][c] = 0;
    }
    prev = rows[rank][c];
    ++rank;
  }
  return rank;
}

/// Reduced row echelon form over Q. Returns the pivot column of each
/// nonzero row.
inline std::vector<std::size_t> rref(std::vector<std::vector<BigRational>>& m) {
  std::vector<std::size_t> pivots;
  if (m.empty()) return pivots;
  const std::size_t cols = m.front().size();
  std::size_t row = 0;
  for (std::size_t c = 0; c < cols && row < m.size(); ++c) {
    std::size_t piv = row;
    while (piv < m.size() && m[piv][c] == 0) ++piv;
    if (piv == m.size()) continue;
    std::swap(m[piv], m[row]);
    const BigRational inv = 1 / m[row][c];
    for (auto& v : m[row]) v *= inv;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == row || m[i][c] == 0) continue;
      const BigRational f = m[i][c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[row][j];
    }
    pivots.push_back(c);
    ++row;
  }
  return pivots;
}

/// Solves M x = b exactly over Q, with M given column by column. Returns
/// one solution (free variables zero) or nullopt when inconsistent.
inline std::optional<std::vector<BigRational>> solve_rational(
    const std::vector<IntVector>& columns, const IntVector& rhs) {
  const std::size_t rows = rhs.size();
  const std::size_t n = columns.size();
  std::vector<std::vector<BigRational>> aug(rows, std::vector<BigRational>(n + 1));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug[i][j] = BigRational(columns[j][i]);
    aug[i][n] = BigRational(rhs[i]);
  }
  const auto pivots = rref(aug);
  if (!pivots.empty() && pivots.back() == n) return std::nullopt;
  std::vector<BigRational> x(n, BigRational(0));
  for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug[r][n];
  return x;
}

/// Clears denominators and divides by the content: gcd of the entries is 1
/// and the first nonzero entry is positive.
inline IntVector primitive_integer_vector(const std::vector<BigRational>& v) {
  BigInt lcm(1);
  for (const auto& q : v) {
    const BigInt den = boost::multiprecision::denominator(q);
    lcm = lcm / gcd(lcm, den) * den;
  }
  IntVector out(v.size());
  BigInt g(0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = boost::multiprecision::numerator(v[i]) * (lcm / boost::multiprecision::denominator(v[i]));
    g = gcd(g, out[i]);
  }
  if (g == 0) return out;
  const auto first = std::find_if(out.begin(), out.end(), [](const BigInt& e) { return e != 0; });
  if (*first < 0) g = -g;
  for (auto& e : out) e /= g;
  return out;
}

/// Basis of the rational kernel of a square integer matrix, each vector
/// made primitive. Vectors are ordered by their free column.
inline std::vector<IntVector> kernel_basis(const IntMatrix& a) {
  const std::size_t k = a.dim();
  std::vector<std::vector<BigRational>> m(k, std::vector<BigRational>(k));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) m[i][j] = BigRational(a(i, j));
  const auto pivots = rref(m);
  std::vector<bool> is_pivot(k, false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<IntVector> basis;
  for (std::size_t free = 0; free < k; ++free) {
    if (is_pivot[free]) continue;
    std::vector<BigRational> v(k, BigRational(0));
    v[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m[r][free];
    basis.push_back(primitive_integer_vector(v));
  }
  return basis;
}

}  // namespace affmix

#endif  // AFFMIX_LINALG_HPP
