#ifndef AFFMIX_MATRIX_HPP
#define AFFMIX_MATRIX_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "affmix/errors.hpp"

namespace affmix {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;
using IntVector = std::vector<BigInt>;

/// Dense square matrix over an arbitrary ring, row-major.
///
/// Instantiated with BigInt for the exact paths and with
/// std::complex<double> for the eigenvalue identities.
template <class T>
class Matrix {
 public:
  using value_type = T;

  Matrix() = default;
  explicit Matrix(std::size_t k) : k_(k), entries_(k * k, T(0)) {}

  Matrix(std::initializer_list<std::initializer_list<long long>> rows)
      : k_(rows.size()), entries_() {
    entries_.reserve(k_ * k_);
    for (const auto& row : rows) {
      if (row.size() != k_) {
        throw Error(ErrorCode::InvalidArgument, "matrix must be square");
      }
      for (long long v : row) entries_.push_back(T(v));
    }
  }

  static Matrix identity(std::size_t k) {
    Matrix m(k);
    for (std::size_t i = 0; i < k; ++i) m(i, i) = T(1);
    return m;
  }

  template <class Rows>
  static Matrix from_rows(const Rows& rows) {
    Matrix m(rows.size());
    for (std::size_t i = 0; i < m.k_; ++i) {
      if (rows[i].size() != m.k_) {
        throw Error(ErrorCode::InvalidArgument, "matrix must be square");
      }
      for (std::size_t j = 0; j < m.k_; ++j) m(i, j) = T(rows[i][j]);
    }
    return m;
  }

  /// Converts entry-wise, e.g. an integer matrix into a complex one.
  template <class U, class F>
  static Matrix convert(const Matrix<U>& other, F&& cast) {
    Matrix m(other.dim());
    for (std::size_t i = 0; i < m.k_; ++i)
      for (std::size_t j = 0; j < m.k_; ++j) m(i, j) = cast(other(i, j));
    return m;
  }

  std::size_t dim() const noexcept { return k_; }

  T& operator()(std::size_t i, std::size_t j) { return entries_[i * k_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const {
    return entries_[i * k_ + j];
  }

  const std::vector<T>& entries() const noexcept { return entries_; }

  Matrix transpose() const {
    Matrix t(k_);
    for (std::size_t i = 0; i < k_; ++i)
      for (std::size_t j = 0; j < k_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Matrix& operator+=(const Matrix& o) {
    check_same(o);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += o.entries_[i];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same(o);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= o.entries_[i];
    return *this;
  }
  Matrix& operator*=(const T& s) {
    for (auto& e : entries_) e *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, const T& s) { return a *= s; }
  friend Matrix operator*(const T& s, Matrix a) { return a *= s; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    a.check_same(b);
    Matrix c(a.k_);
    for (std::size_t i = 0; i < a.k_; ++i)
      for (std::size_t l = 0; l < a.k_; ++l) {
        const T& ail = a(i, l);
        if (ail == T(0)) continue;
        for (std::size_t j = 0; j < a.k_; ++j) c(i, j) += ail * b(l, j);
      }
    return c;
  }

  template <class V>
  V apply(const V& x) const {
    if (x.size() != k_) {
      throw Error(ErrorCode::InvalidArgument, "vector dimension mismatch");
    }
    V y(k_, typename V::value_type(0));
    for (std::size_t i = 0; i < k_; ++i)
      for (std::size_t j = 0; j < k_; ++j) y[i] += (*this)(i, j) * x[j];
    return y;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.k_ == b.k_ && a.entries_ == b.entries_;
  }

  bool is_zero() const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [](const T& e) { return e == T(0); });
  }

  friend std::ostream& operator<<(std::ostream& os, const Matrix& m) {
    os << '[';
    for (std::size_t i = 0; i < m.k_; ++i) {
      os << (i ? ", [" : "[");
      for (std::size_t j = 0; j < m.k_; ++j) os << (j ? ", " : "") << m(i, j);
      os << ']';
    }
    return os << ']';
  }

 private:
  void check_same(const Matrix& o) const {
    if (o.k_ != k_) throw Error(ErrorCode::InvalidArgument, "dimension mismatch");
  }

  std::size_t k_ = 0;
  std::vector<T> entries_;
};

using IntMatrix = Matrix<BigInt>;

template <class T>
Matrix<T> mat_pow(Matrix<T> base, std::uint64_t e) {
  Matrix<T> result = Matrix<T>::identity(base.dim());
  while (e) {
    if (e & 1U) result = result * base;
    e >>= 1U;
    if (e) base = base * base;
  }
  return result;
}

/// Mathematical residue in [0, p).
inline BigInt mod_floor(const BigInt& a, const BigInt& p) {
  BigInt r = a % p;
  if (r < 0) r += p;
  return r;
}

inline std::uint64_t mod_u64(const BigInt& a, std::uint64_t p) {
  return static_cast<std::uint64_t>(mod_floor(a, BigInt(p)));
}

inline BigInt gcd(const BigInt& a, const BigInt& b) {
  return boost::multiprecision::gcd(a, b);
}

/// Lexicographic comparison for integer vectors (first component most
/// significant).
inline bool lex_less(const IntVector& a, const IntVector& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

inline IntVector to_int_vector(const std::vector<long long>& v) {
  return IntVector(v.begin(), v.end());
}

}  // namespace affmix

#endif  // AFFMIX_MATRIX_HPP
