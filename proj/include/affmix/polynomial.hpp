#ifndef AFFMIX_POLYNOMIAL_HPP
#define AFFMIX_POLYNOMIAL_HPP

#include <algorithm>
#include <cstddef>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "affmix/linalg.hpp"
#include "affmix/matrix.hpp"

namespace affmix {

/// Polynomial with arbitrary-precision integer coefficients, lowest degree
/// first. The zero polynomial has no coefficients and degree -1.
class IntPolynomial {
 public:
  IntPolynomial() = default;
  explicit IntPolynomial(std::vector<BigInt> coeffs) : c_(std::move(coeffs)) { trim(); }
  IntPolynomial(std::initializer_list<long long> coeffs) : c_(coeffs.begin(), coeffs.end()) {
    trim();
  }

  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const noexcept { return c_.empty(); }
  const std::vector<BigInt>& coeffs() const noexcept { return c_; }
  BigInt coeff(std::size_t i) const { return i < c_.size() ? c_[i] : BigInt(0); }
  const BigInt& leading() const { return c_.back(); }
  bool is_monic() const { return !c_.empty() && c_.back() == 1; }

  friend bool operator==(const IntPolynomial& a, const IntPolynomial& b) { return a.c_ == b.c_; }

  friend IntPolynomial operator*(const IntPolynomial& a, const IntPolynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<BigInt> r(a.c_.size() + b.c_.size() - 1, BigInt(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    return IntPolynomial(std::move(r));
  }

  /// Exact substitution of a square matrix (Horner).
  IntMatrix evaluate(const IntMatrix& a) const {
    IntMatrix acc(a.dim());
    const IntMatrix id = IntMatrix::identity(a.dim());
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * a + id * (*it);
    return acc;
  }

  std::string to_string() const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = c_.size(); i-- > 0;) {
      const BigInt& c = c_[i];
      if (c == 0) continue;
      BigInt mag = c < 0 ? BigInt(-c) : c;
      if (first) {
        if (c < 0) os << '-';
      } else {
        os << (c < 0 ? " - " : " + ");
      }
      if (mag != 1 || i == 0) os << mag;
      if (i >= 1) os << 'x';
      if (i >= 2) os << '^' << i;
      first = false;
    }
    return os.str();
  }

  friend std::ostream& operator<<(std::ostream& os, const IntPolynomial& p) {
    return os << p.to_string();
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<BigInt> c_;
};

namespace detail {

using RatPoly = std::vector<BigRational>;

inline void trim(RatPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

inline RatPoly to_rat(const IntPolynomial& f) {
  RatPoly r;
  for (const auto& c : f.coeffs()) r.emplace_back(c);
  return r;
}

/// Quotient and remainder over Q; divisor must be nonzero.
inline std::pair<RatPoly, RatPoly> divmod(RatPoly a, const RatPoly& b) {
  trim(a);
  if (b.empty()) throw Error(ErrorCode::InvalidArgument, "division by zero polynomial");
  if (a.size() < b.size()) return {RatPoly{}, a};
  RatPoly q(a.size() - b.size() + 1, BigRational(0));
  const BigRational lead = b.back();
  while (!a.empty() && a.size() >= b.size()) {
    const std::size_t shift = a.size() - b.size();
    const BigRational f = a.back() / lead;
    q[shift] = f;
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= f * b[i];
    a.pop_back();
    trim(a);
  }
  trim(q);
  return {q, a};
}

inline RatPoly make_monic(RatPoly p) {
  trim(p);
  if (p.empty()) return p;
  const BigRational lead = p.back();
  for (auto& c : p) c /= lead;
  return p;
}

inline RatPoly gcd(RatPoly a, RatPoly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    RatPoly r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return make_monic(a);
}

inline RatPoly derivative(const RatPoly& p) {
  RatPoly d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * BigRational(static_cast<long long>(i)));
  trim(d);
  return d;
}

inline RatPoly sub(RatPoly a, const RatPoly& b) {
  if (a.size() < b.size()) a.resize(b.size(), BigRational(0));
  for (std::size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
  trim(a);
  return a;
}

/// Primitive integer polynomial with positive leading coefficient.
inline IntPolynomial to_primitive(const RatPoly& p) {
  if (p.empty()) return {};
  IntVector v = primitive_integer_vector(RatPoly(p.rbegin(), p.rend()));
  if (v.front() < 0)
    for (auto& e : v) e = -e;
  return IntPolynomial(std::vector<BigInt>(v.rbegin(), v.rend()));
}

}  // namespace detail

/// Square-free decomposition (Yun): pairs (s_i, i) with f = c * prod s_i^i,
/// each s_i primitive and square-free, pairwise coprime.
inline std::vector<std::pair<IntPolynomial, int>> square_free_decomposition(const IntPolynomial& f) {
  using namespace detail;
  std::vector<std::pair<IntPolynomial, int>> out;
  if (f.degree() < 1) return out;
  const RatPoly fr = make_monic(to_rat(f));
  const RatPoly fd = derivative(fr);
  RatPoly a0 = gcd(fr, fd);
  RatPoly b = divmod(fr, a0).first;
  RatPoly c = divmod(fd, a0).first;
  RatPoly d = sub(c, derivative(b));
  int i = 1;
  while (b.size() > 1) {
    RatPoly a = gcd(b, d);
    b = divmod(b, a).first;
    c = divmod(d, a).first;
    d = sub(c, derivative(b));
    if (a.size() > 1) out.emplace_back(to_primitive(a), i);
    ++i;
  }
  return out;
}

/// One factor of an integer polynomial. `irreducible` is false only for a
/// residual block the factorizer could not split.
struct PolyFactor {
  IntPolynomial poly;
  int multiplicity = 1;
  bool irreducible = true;
};

struct Factorization {
  std::vector<PolyFactor> factors;
  bool complete = true;
};

namespace detail {

inline std::vector<BigInt> positive_divisors(BigInt n) {
  if (n < 0) n = -n;
  std::vector<BigInt> small, large;
  for (BigInt d = 1; d * d <= n; ++d) {
    if (n % d == 0) {
      small.push_back(d);
      if (d * d != n) large.push_back(n / d);
    }
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  return small;
}

inline bool is_root(const IntPolynomial& f, const BigRational& x) {
  BigRational acc(0);
  for (std::size_t i = f.coeffs().size(); i-- > 0;) acc = acc * x + BigRational(f.coeffs()[i]);
  return acc == 0;
}

/// Exact integer square root if n is a perfect square.
inline std::optional<BigInt> exact_sqrt(const BigInt& n) {
  if (n < 0) return std::nullopt;
  BigInt r = boost::multiprecision::sqrt(n);
  if (r * r == n) return r;
  return std::nullopt;
}

/// Splits a monic quartic without rational roots into two integer quadratics.
inline std::optional<std::pair<IntPolynomial, IntPolynomial>> split_quartic(const IntPolynomial& f) {
  if (f.degree() != 4 || !f.is_monic()) return std::nullopt;
  const BigInt a = f.coeff(3), b = f.coeff(2), c = f.coeff(1), d = f.coeff(0);
  // (x^2 + p x + q)(x^2 + r x + s): qs = d, p + r = a, pr + q + s = b, ps + qr = c.
  for (const BigInt& pos : positive_divisors(d)) {
    for (const BigInt& q : {pos, BigInt(-pos)}) {
      const BigInt s = d / q;
      std::vector<std::pair<BigInt, BigInt>> candidates;
      if (s != q) {
        const BigInt num = c - q * a;
        const BigInt den = s - q;
        if (num % den != 0) continue;
        const BigInt p = num / den;
        candidates.emplace_back(p, a - p);
      } else {
        if (q * a != c) continue;
        // p, r roots of t^2 - a t + (b - 2q).
        const BigInt disc = a * a - 4 * (b - 2 * q);
        const auto root = exact_sqrt(disc);
        if (!root || ((a + *root) % 2) != 0) continue;
        const BigInt p = (a + *root) / 2;
        candidates.emplace_back(p, a - p);
      }
      for (const auto& [p, r] : candidates) {
        if (p * r + q + s == b && p * s + q * r == c) {
          return std::make_pair(IntPolynomial(std::vector<BigInt>{q, p, 1}),
                                IntPolynomial(std::vector<BigInt>{s, r, 1}));
        }
      }
    }
  }
  return std::nullopt;
}

/// Factors a square-free primitive polynomial with rational-root extraction
/// and quartic splitting. Degree >= 5 leftovers are returned unsplit.
inline void factor_square_free(IntPolynomial g, int multiplicity, Factorization& out) {
  if (g.coeff(0) == 0) {
    out.factors.push_back({IntPolynomial{0, 1}, multiplicity, true});
    g = IntPolynomial(std::vector<BigInt>(g.coeffs().begin() + 1, g.coeffs().end()));
  }
  if (g.degree() >= 2) {
    const auto lead_divs = positive_divisors(g.leading());
    const auto const_divs = positive_divisors(g.coeff(0));
    for (const BigInt& num : const_divs) {
      for (const BigInt& den : lead_divs) {
        if (gcd(num, den) != 1) continue;
        for (const BigInt& sn : {num, BigInt(-num)}) {
          if (g.degree() < 1) break;
          const BigRational x(sn, den);
          if (!is_root(g, x)) continue;
          const IntPolynomial lin(std::vector<BigInt>{BigInt(-sn), den});
          out.factors.push_back({lin, multiplicity, true});
          g = to_primitive(divmod(to_rat(g), to_rat(lin)).first);
        }
      }
    }
  }
  if (g.degree() < 1) return;
  if (g.degree() <= 3) {
    out.factors.push_back({g, multiplicity, true});
    return;
  }
  if (g.degree() == 4) {
    if (auto split = split_quartic(g)) {
      out.factors.push_back({split->first, multiplicity, true});
      out.factors.push_back({split->second, multiplicity, true});
    } else {
      out.factors.push_back({g, multiplicity, true});
    }
    return;
  }
  out.factors.push_back({g, multiplicity, false});
  out.complete = false;
}

}  // namespace detail

/// Factorization into irreducibles over Z. Complete for every square-free
/// part of degree <= 4 (after removing rational roots); larger irreducible
/// candidates are flagged and `complete` is false.
inline Factorization factor(const IntPolynomial& f) {
  Factorization out;
  for (const auto& [part, mult] : square_free_decomposition(f)) {
    detail::factor_square_free(part, mult, out);
  }
  return out;
}

}  // namespace affmix

#endif  // AFFMIX_POLYNOMIAL_HPP
