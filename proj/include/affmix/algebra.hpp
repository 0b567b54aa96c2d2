#ifndef AFFMIX_ALGEBRA_HPP
#define AFFMIX_ALGEBRA_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string_view>
#include <vector>

#include "affmix/errors.hpp"
#include "affmix/linalg.hpp"
#include "affmix/matrix.hpp"
#include "affmix/polynomial.hpp"

namespace affmix {

using Complex = std::complex<double>;
using ComplexMatrix = Matrix<Complex>;

inline constexpr double kUnitModulusTolerance = 1e-9;
inline constexpr std::uint64_t kDefaultLMax = 24;

/// A^e mod p by repeated squaring; entries land in [0, p).
inline IntMatrix mat_pow_mod(const IntMatrix& a, std::uint64_t e, const BigInt& p) {
  const auto reduce = [&p](IntMatrix m) {
    IntMatrix r(m.dim());
    for (std::size_t i = 0; i < m.dim(); ++i)
      for (std::size_t j = 0; j < m.dim(); ++j) r(i, j) = mod_floor(m(i, j), p);
    return r;
  };
  IntMatrix base = reduce(a);
  IntMatrix result = reduce(IntMatrix::identity(a.dim()));
  while (e) {
    if (e & 1U) result = reduce(result * base);
    e >>= 1U;
    if (e) base = reduce(base * base);
  }
  return result;
}

/// det(xI - A) by Faddeev-LeVerrier. The trace divisions are exact over Z.
inline IntPolynomial char_poly(const IntMatrix& a) {
  const std::size_t k = a.dim();
  std::vector<BigInt> c(k + 1, BigInt(0));
  c[k] = 1;
  const IntMatrix id = IntMatrix::identity(k);
  IntMatrix m(k);
  for (std::size_t step = 1; step <= k; ++step) {
    m = a * m + id * c[k - step + 1];
    const IntMatrix am = a * m;
    BigInt trace(0);
    for (std::size_t i = 0; i < k; ++i) trace += am(i, i);
    c[k - step] = -trace / static_cast<long long>(step);
  }
  return IntPolynomial(std::move(c));
}

/// Least-degree monic annihilator, found from the first linear dependency
/// among I, A, A^2, ... over Q. For integer A the result has integer
/// coefficients; annihilation is re-checked exactly.
inline IntPolynomial minimal_poly(const IntMatrix& a) {
  const std::size_t k = a.dim();
  std::vector<IntVector> powers;
  IntMatrix current = IntMatrix::identity(k);
  for (std::size_t d = 0; d <= k; ++d) {
    IntVector flat(current.entries().begin(), current.entries().end());
    if (d > 0) {
      if (auto coeffs = solve_rational(powers, flat)) {
        std::vector<BigRational> poly(d + 1);
        for (std::size_t i = 0; i < d; ++i) poly[i] = -(*coeffs)[i];
        poly[d] = 1;
        IntPolynomial result = detail::to_primitive(poly);
        if (!result.evaluate(a).is_zero()) {
          throw Error(ErrorCode::NonConvergence, "minimal polynomial failed exact annihilation");
        }
        return result;
      }
    }
    powers.push_back(std::move(flat));
    current = current * a;
  }
  throw Error(ErrorCode::NonConvergence, "no annihilating polynomial up to degree k");
}

namespace detail {

inline Complex horner(const std::vector<Complex>& c, Complex z) {
  Complex acc(0.0);
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * z + c[i];
  return acc;
}

inline double coefficient_scale(const std::vector<Complex>& c, double r) {
  double acc = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * r + std::abs(c[i]);
  return acc;
}

/// Aberth-Ehrlich simultaneous iteration for a square-free polynomial.
inline std::vector<Complex> aberth(const std::vector<Complex>& coeffs) {
  const std::size_t n = coeffs.size() - 1;
  std::vector<Complex> deriv(n);
  for (std::size_t i = 1; i <= n; ++i) deriv[i - 1] = coeffs[i] * static_cast<double>(i);
  if (n == 1) return {-coeffs[0] / coeffs[1]};

  double radius = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const double ratio = std::abs(coeffs[n - i] / coeffs[n]);
    radius = std::max(radius, std::pow(ratio, 1.0 / static_cast<double>(i)));
  }
  radius = std::max(radius, 1e-3);
  const Complex center = -coeffs[n - 1] / (static_cast<double>(n) * coeffs[n]);
  std::vector<Complex> z(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n) + 0.4;
    z[j] = center + radius * Complex(std::cos(theta), std::sin(theta));
  }
  for (int iter = 0; iter < 2000; ++iter) {
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const Complex pz = horner(coeffs, z[j]);
      if (pz == Complex(0.0)) continue;
      const Complex ratio = pz / horner(deriv, z[j]);
      Complex repulsion(0.0);
      for (std::size_t l = 0; l < n; ++l)
        if (l != j) repulsion += 1.0 / (z[j] - z[l]);
      const Complex step = ratio / (1.0 - ratio * repulsion);
      z[j] -= step;
      worst = std::max(worst, std::abs(step) / std::max(1.0, std::abs(z[j])));
    }
    if (worst < 1e-15) break;
  }
  for (auto& root : z) {
    for (int polish = 0; polish < 2; ++polish) {
      const Complex d = horner(deriv, root);
      if (d == Complex(0.0)) break;
      root -= horner(coeffs, root) / d;
    }
  }
  return z;
}

/// Snaps near-real roots to the real axis and makes complex roots exact
/// conjugate pairs.
inline std::vector<Complex> pair_conjugates(std::vector<Complex> roots) {
  std::vector<Complex> real, upper, lower;
  for (auto z : roots) {
    if (std::abs(z.imag()) <= 1e-10 * std::max(1.0, std::abs(z))) {
      real.emplace_back(z.real(), 0.0);
    } else if (z.imag() > 0) {
      upper.push_back(z);
    } else {
      lower.push_back(z);
    }
  }
  if (upper.size() != lower.size()) return roots;
  std::vector<Complex> out = real;
  for (auto z : upper) {
    out.push_back(z);
    out.push_back(std::conj(z));
  }
  return out;
}

inline bool eigen_order(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() > b.imag();
}

inline std::vector<Complex> to_complex(const IntPolynomial& f) {
  std::vector<Complex> c;
  for (const auto& v : f.coeffs()) c.emplace_back(static_cast<double>(v), 0.0);
  return c;
}

}  // namespace detail

/// All complex roots of `f` with multiplicity, sorted by real part then
/// imaginary part, both descending. Repeated roots are found through the
/// square-free decomposition so that the iteration only sees simple roots.
inline std::vector<Complex> eigenvalues(const IntPolynomial& f) {
  if (f.is_zero()) throw Error(ErrorCode::InvalidArgument, "zero polynomial has no roots");
  std::vector<Complex> roots;
  for (const auto& [part, mult] : square_free_decomposition(f)) {
    const auto simple = detail::pair_conjugates(detail::aberth(detail::to_complex(part)));
    for (int m = 0; m < mult; ++m) roots.insert(roots.end(), simple.begin(), simple.end());
  }
  const auto full = detail::to_complex(f);
  for (const auto& z : roots) {
    const double residual = std::abs(detail::horner(full, z));
    if (residual > 1e-9 * detail::coefficient_scale(full, std::abs(z))) {
      throw Error(ErrorCode::NonConvergence, "root refinement failed residual bound for " + f.to_string());
    }
  }
  std::sort(roots.begin(), roots.end(), detail::eigen_order);
  return roots;
}

/// Pair (l, m) with lambda^l = m for every root of an irreducible factor.
struct RootOrder {
  std::uint64_t l = 0;
  BigInt m;
};

/// Smallest l <= l_max such that x^l reduced modulo f is a positive integer
/// constant m. Exact rational arithmetic in Q[x]/(f).
inline std::optional<RootOrder> root_of_integer_order(const IntPolynomial& f, std::uint64_t l_max) {
  if (f.degree() < 1) throw Error(ErrorCode::InvalidArgument, "polynomial must have positive degree");
  const detail::RatPoly modulus = detail::to_rat(f);
  detail::RatPoly r{BigRational(1)};
  for (std::uint64_t l = 1; l <= l_max; ++l) {
    r.insert(r.begin(), BigRational(0));
    r = detail::divmod(r, modulus).second;
    if (r.size() == 1 && r[0] > 0 && boost::multiprecision::denominator(r[0]) == 1) {
      return RootOrder{l, boost::multiprecision::numerator(r[0])};
    }
  }
  return std::nullopt;
}

enum class Regime {
  NonUnitModulus,
  RootsOfIntegerExpanding,
  UnitRootMixed,
  UnitRootTorsion,
  Unknown,
};

inline std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::NonUnitModulus: return "NonUnitModulus";
    case Regime::RootsOfIntegerExpanding: return "RootsOfIntegerExpanding";
    case Regime::UnitRootMixed: return "UnitRootMixed";
    case Regime::UnitRootTorsion: return "UnitRootTorsion";
    case Regime::Unknown: return "Unknown";
  }
  return "Unknown";
}

struct SpectralFactor {
  IntPolynomial poly;
  int multiplicity = 1;
  bool irreducible = true;
  std::optional<RootOrder> order;
  std::vector<Complex> roots;
};

struct SpectralProfile {
  BigInt det;
  IntPolynomial char_poly;
  IntPolynomial min_poly;
  int d = 0;
  std::vector<Complex> eigenvalues;
  std::vector<SpectralFactor> factors;
  bool factorization_complete = true;
  Regime regime = Regime::Unknown;
};

/// Spectral classification of A. Branches, first match wins:
///   every factor has (l, m) with m >= 2          -> RootsOfIntegerExpanding
///   every factor has (l, m), some m = 1, some m >= 2,
///     m = 1 factors on the unit circle, others outside -> UnitRootMixed
///   some factor has (l, 1)                       -> UnitRootTorsion
///   all |lambda| differ from 1 by > 1e-9         -> NonUnitModulus
///   otherwise (or factorization incomplete)      -> Unknown
inline SpectralProfile classify_regime(const IntMatrix& a, std::uint64_t l_max = kDefaultLMax) {
  SpectralProfile prof;
  prof.det = det_int(a);
  if (prof.det == 0) throw Error(ErrorCode::SingularMatrix, "det(A) = 0");
  prof.char_poly = char_poly(a);
  prof.min_poly = minimal_poly(a);
  prof.d = prof.min_poly.degree();
  prof.eigenvalues = eigenvalues(prof.char_poly);

  const Factorization fac = factor(prof.char_poly);
  prof.factorization_complete = fac.complete;
  for (const auto& f : fac.factors) {
    SpectralFactor sf{f.poly, f.multiplicity, f.irreducible, std::nullopt, eigenvalues(f.poly)};
    if (f.irreducible) sf.order = root_of_integer_order(f.poly, l_max);
    prof.factors.push_back(std::move(sf));
  }
  if (!prof.factorization_complete) {
    prof.regime = Regime::Unknown;
    return prof;
  }

  const auto& fs = prof.factors;
  const bool all_ordered = std::all_of(fs.begin(), fs.end(), [](const auto& f) { return f.order.has_value(); });
  const auto is_torsion = [](const SpectralFactor& f) { return f.order && f.order->m == 1; };
  const auto on_unit_circle = [](const SpectralFactor& f) {
    return std::all_of(f.roots.begin(), f.roots.end(), [](Complex z) {
      return std::abs(std::abs(z) - 1.0) <= kUnitModulusTolerance;
    });
  };
  const auto outside_unit_circle = [](const SpectralFactor& f) {
    return std::all_of(f.roots.begin(), f.roots.end(), [](Complex z) {
      return std::abs(z) > 1.0 + kUnitModulusTolerance;
    });
  };
  const bool any_torsion = std::any_of(fs.begin(), fs.end(), is_torsion);
  const bool any_expanding = std::any_of(fs.begin(), fs.end(), [&](const auto& f) { return !is_torsion(f); });

  if (all_ordered && !any_torsion) {
    prof.regime = Regime::RootsOfIntegerExpanding;
  } else if (all_ordered && any_torsion && any_expanding &&
             std::all_of(fs.begin(), fs.end(), [&](const auto& f) {
               return is_torsion(f) ? on_unit_circle(f) : outside_unit_circle(f);
             })) {
    prof.regime = Regime::UnitRootMixed;
  } else if (any_torsion) {
    prof.regime = Regime::UnitRootTorsion;
  } else if (std::all_of(prof.eigenvalues.begin(), prof.eigenvalues.end(), [](Complex z) {
               return std::abs(std::abs(z) - 1.0) > kUnitModulusTolerance;
             })) {
    prof.regime = Regime::NonUnitModulus;
  } else {
    prof.regime = Regime::Unknown;
  }
  return prof;
}

// ---------------------------------------------------------------------------
// Telescoping identities for powers of the transpose.
//
//   (1)  tA^e = prod_{i<=e}(tA - l_i I)
//               + sum_{s<e} l_{s+1} tA^{e-s-1} prod_{i<=s}(tA - l_i I)
//   (2)  tA^j prod_{i<=e}(tA - l_i I)
//          = sum_{h=e+1}^{d} h_{j-d+h}(l_h..l_d) prod_{n=h+1}^{d}(tA - l_n I)
//                                              prod_{i<=e}(tA - l_i I)
//
// where h_t is the complete homogeneous symmetric polynomial of degree t
// (zero for t < 0) and l_1..l_d are the roots of the minimal polynomial.
// ---------------------------------------------------------------------------

enum class TelescopingIdentity { PowerExpansion, ProductRecursion };

struct IdentityCheck {
  bool holds = false;
  double residual = 0.0;
  bool exact = false;
};

namespace detail {

template <class T>
T complete_homogeneous(const std::vector<T>& vars, long long degree) {
  if (degree < 0) return T(0);
  std::vector<T> h(static_cast<std::size_t>(degree) + 1, T(0));
  h[0] = T(1);
  for (const T& v : vars)
    for (std::size_t t = 1; t < h.size(); ++t) h[t] += v * h[t - 1];
  return h.back();
}

/// prod_{i in [from, to)} (M - l_i I), in increasing i.
template <class T>
Matrix<T> shifted_product(const Matrix<T>& m, const std::vector<T>& lambdas, std::size_t from, std::size_t to) {
  const Matrix<T> id = Matrix<T>::identity(m.dim());
  Matrix<T> acc = id;
  for (std::size_t i = from; i < to; ++i) acc = acc * (m - id * lambdas[i]);
  return acc;
}

template <class T>
std::pair<Matrix<T>, Matrix<T>> identity_sides(const Matrix<T>& at, const std::vector<T>& lambdas, std::size_t d,
                                               std::size_t e, std::uint64_t j, TelescopingIdentity which) {
  const std::size_t k = at.dim();
  if (which == TelescopingIdentity::PowerExpansion) {
    Matrix<T> lhs = mat_pow(at, e);
    Matrix<T> rhs = shifted_product(at, lambdas, 0, e);
    for (std::size_t s = 0; s < e; ++s) {
      rhs += lambdas[s] * (mat_pow(at, e - s - 1) * shifted_product(at, lambdas, 0, s));
    }
    return {lhs, rhs};
  }
  const Matrix<T> tail = shifted_product(at, lambdas, 0, e);
  Matrix<T> lhs = mat_pow(at, j) * tail;
  Matrix<T> rhs(k);
  for (std::size_t h = e + 1; h <= d; ++h) {
    // 1-based h maps to lambdas[h-1 .. d-1].
    const std::vector<T> vars(lambdas.begin() + static_cast<std::ptrdiff_t>(h - 1),
                              lambdas.begin() + static_cast<std::ptrdiff_t>(d));
    const T coef = complete_homogeneous(vars, static_cast<long long>(j) - static_cast<long long>(d) +
                                                  static_cast<long long>(h));
    if (coef == T(0)) continue;
    rhs += coef * (shifted_product(at, lambdas, h, d) * tail);
  }
  return {lhs, rhs};
}

/// Orders the k eigenvalues by `order`, then picks lambda_1..lambda_d as the
/// first entries that consume the minimal-polynomial roots (with their
/// multiplicities); `same` decides equality of two eigenvalues.
template <class T, class Eq>
std::vector<T> select_min_poly_order(const std::vector<T>& eig, const std::vector<std::size_t>& order,
                                     std::vector<T> min_roots, Eq same) {
  std::vector<T> picked;
  std::vector<T> rest;
  for (std::size_t idx : order) {
    const T& v = eig[idx];
    auto it = std::find_if(min_roots.begin(), min_roots.end(), [&](const T& r) { return same(r, v); });
    if (it != min_roots.end()) {
      picked.push_back(v);
      min_roots.erase(it);
    } else {
      rest.push_back(v);
    }
  }
  picked.insert(picked.end(), rest.begin(), rest.end());
  return picked;
}

}  // namespace detail

/// Evaluates both sides of the chosen identity with the eigenvalues taken in
/// the caller's order (a permutation of 0..k-1 over the sorted eigenvalue
/// list). Uses exact integers when every eigenvalue is an integer, complex
/// doubles otherwise (tolerance 1e-8 relative to the largest LHS entry).
inline IdentityCheck verify_identity(const IntMatrix& a, const std::vector<std::size_t>& order, std::size_t e,
                                    std::uint64_t j, TelescopingIdentity which) {
  const std::size_t k = a.dim();
  if (order.size() != k) throw Error(ErrorCode::OrderMismatch, "eigenvalue order length must equal k");
  std::vector<bool> seen(k, false);
  for (std::size_t idx : order) {
    if (idx >= k || seen[idx]) throw Error(ErrorCode::OrderMismatch, "eigenvalue order is not a permutation");
    seen[idx] = true;
  }
  const IntPolynomial cp = char_poly(a);
  const IntPolynomial mp = minimal_poly(a);
  const auto d = static_cast<std::size_t>(mp.degree());
  if (e > d) throw Error(ErrorCode::InvalidArgument, "e must not exceed the minimal polynomial degree");

  const Factorization fac = factor(cp);
  const bool integral = fac.complete && std::all_of(fac.factors.begin(), fac.factors.end(), [](const auto& f) {
                          return f.poly.degree() == 1 && f.poly.leading() == 1;
                        });
  IdentityCheck result;
  if (integral) {
    const auto roots_of = [](const Factorization& fz) {
      std::vector<BigInt> r;
      for (const auto& f : fz.factors)
        for (int m = 0; m < f.multiplicity; ++m) r.push_back(-f.poly.coeff(0));
      std::sort(r.begin(), r.end(), std::greater<>());
      return r;
    };
    const auto eig = roots_of(fac);
    const auto lambdas = detail::select_min_poly_order(eig, order, roots_of(factor(mp)),
                                                       [](const BigInt& x, const BigInt& y) { return x == y; });
    const auto [lhs, rhs] = detail::identity_sides(a.transpose(), lambdas, d, e, j, which);
    BigInt worst(0);
    for (std::size_t i = 0; i < lhs.entries().size(); ++i) {
      BigInt diff = lhs.entries()[i] - rhs.entries()[i];
      if (diff < 0) diff = -diff;
      worst = std::max(worst, diff);
    }
    result.exact = true;
    result.residual = static_cast<double>(worst);
    result.holds = worst == 0;
    return result;
  }

  const auto eig = eigenvalues(cp);
  const auto same = [](const Complex& x, const Complex& y) {
    return std::abs(x - y) <= 1e-6 * std::max(1.0, std::abs(x));
  };
  const auto lambdas = detail::select_min_poly_order(eig, order, eigenvalues(mp), same);
  const ComplexMatrix at =
      ComplexMatrix::convert(a.transpose(), [](const BigInt& v) { return Complex(static_cast<double>(v), 0.0); });
  const auto [lhs, rhs] = detail::identity_sides(at, lambdas, d, e, j, which);
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < lhs.entries().size(); ++i) {
    worst = std::max(worst, std::abs(lhs.entries()[i] - rhs.entries()[i]));
    scale = std::max(scale, std::abs(lhs.entries()[i]));
  }
  result.residual = worst;
  result.holds = worst <= 1e-8 * std::max(1.0, scale);
  return result;
}

}  // namespace affmix

#endif  // AFFMIX_ALGEBRA_HPP
