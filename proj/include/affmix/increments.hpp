#ifndef AFFMIX_INCREMENTS_HPP
#define AFFMIX_INCREMENTS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "affmix/algebra.hpp"
#include "affmix/errors.hpp"
#include "affmix/linalg.hpp"
#include "affmix/matrix.hpp"

namespace affmix {

/// Finite-support law of the increments B_n on Z^k.
class IncrementDistribution {
 public:
  IncrementDistribution() = default;

  /// Validates: nonempty distinct support of dimension k, strictly positive
  /// probabilities summing to 1 within 1e-12.
  IncrementDistribution(std::size_t k, std::vector<IntVector> support, std::vector<double> probs)
      : k_(k), support_(std::move(support)), probs_(std::move(probs)) {
    if (k_ == 0) throw Error(ErrorCode::InvalidArgument, "dimension must be positive");
    if (support_.empty()) throw Error(ErrorCode::InvalidArgument, "support must be nonempty");
    if (support_.size() != probs_.size()) {
      throw Error(ErrorCode::InvalidArgument, "support and probabilities differ in length");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < support_.size(); ++i) {
      if (support_[i].size() != k_) throw Error(ErrorCode::InvalidArgument, "support vector has wrong dimension");
      if (!(probs_[i] > 0.0)) throw Error(ErrorCode::InvalidArgument, "probabilities must be strictly positive");
      total += probs_[i];
    }
    if (std::abs(total - 1.0) > 1e-12) throw Error(ErrorCode::InvalidArgument, "probabilities must sum to 1");
    std::vector<IntVector> sorted = support_;
    std::sort(sorted.begin(), sorted.end(), lex_less);
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw Error(ErrorCode::InvalidArgument, "support vectors must be distinct");
    }
  }

  /// Uniform law on the given points.
  static IncrementDistribution uniform(std::size_t k, std::vector<IntVector> support) {
    const double w = 1.0 / static_cast<double>(support.size());
    std::vector<double> probs(support.size(), w);
    // Absorb rounding so the sum check stays exact for small supports.
    double rest = 1.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) rest -= probs[i];
    probs.back() = rest;
    return IncrementDistribution(k, std::move(support), std::move(probs));
  }

  /// Fair two-point law on {0, v}.
  static IncrementDistribution fair_two_point(const IntVector& v) {
    return uniform(v.size(), {IntVector(v.size(), BigInt(0)), v});
  }

  std::size_t dim() const noexcept { return k_; }
  std::size_t size() const noexcept { return support_.size(); }
  const std::vector<IntVector>& support() const noexcept { return support_; }
  const std::vector<double>& probs() const noexcept { return probs_; }

  /// sum_{h,i} mu(h) mu(i) ||h - i||_inf^2
  double mean_square_spread() const {
    double acc = 0.0;
    for (std::size_t a = 0; a < support_.size(); ++a)
      for (std::size_t b = 0; b < support_.size(); ++b) {
        BigInt worst(0);
        for (std::size_t c = 0; c < k_; ++c) {
          BigInt diff = support_[a][c] - support_[b][c];
          if (diff < 0) diff = -diff;
          worst = std::max(worst, diff);
        }
        const double w = static_cast<double>(worst);
        acc += probs_[a] * probs_[b] * w * w;
      }
    return acc;
  }

 private:
  std::size_t k_ = 0;
  std::vector<IntVector> support_;
  std::vector<double> probs_;
};

/// {"k": int, "support": [[int,...],...], "probs": [float,...]}
inline IncrementDistribution increments_from_json(const nlohmann::json& j) {
  try {
    const auto k = j.at("k").get<std::size_t>();
    std::vector<IntVector> support;
    for (const auto& row : j.at("support")) {
      IntVector v;
      for (const auto& e : row) v.emplace_back(e.get<long long>());
      support.push_back(std::move(v));
    }
    return IncrementDistribution(k, std::move(support), j.at("probs").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::ConfigInvalid, std::string("increments: ") + ex.what());
  } catch (const Error& ex) {
    throw Error(ErrorCode::ConfigInvalid, std::string("increments: ") + ex.what());
  }
}

inline nlohmann::json increments_to_json(const IncrementDistribution& mu) {
  nlohmann::json support = nlohmann::json::array();
  for (const auto& v : mu.support()) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& e : v) row.push_back(static_cast<long long>(e));
    support.push_back(row);
  }
  return {{"k", mu.dim()}, {"support", support}, {"probs", mu.probs()}};
}

namespace detail {

inline void sort_unique(std::vector<IntVector>& v) {
  std::sort(v.begin(), v.end(), lex_less);
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

inline IntVector subtract(const IntVector& a, const IntVector& b) {
  IntVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

inline bool is_zero(const IntVector& v) {
  return std::all_of(v.begin(), v.end(), [](const BigInt& e) { return e == 0; });
}

/// First nonzero component positive.
inline bool is_canonical_sign(const IntVector& v) {
  for (const auto& e : v)
    if (e != 0) return e > 0;
  return false;
}

}  // namespace detail

/// V: all pairwise differences of support points, deduplicated, lexicographic.
inline std::vector<IntVector> difference_set(const IncrementDistribution& mu) {
  std::vector<IntVector> v;
  v.reserve(mu.size() * mu.size());
  for (const auto& h : mu.support())
    for (const auto& g : mu.support()) v.push_back(detail::subtract(h, g));
  detail::sort_unique(v);
  return v;
}

/// V^{d-1}: A^m x for x in V and 0 <= m < d, deduplicated, lexicographic.
inline std::vector<IntVector> extended_difference_set(const std::vector<IntVector>& v, const IntMatrix& a,
                                                      std::size_t d) {
  std::vector<IntVector> out;
  for (IntVector x : v) {
    for (std::size_t m = 0; m < d; ++m) {
      out.push_back(x);
      x = a.apply(x);
    }
  }
  detail::sort_unique(out);
  return out;
}

/// Columns y_m = A^{z_m} (u_m - v_m) spanning Q^k.
struct SupportBasis {
  IntMatrix matrix;  ///< columns are y_1..y_k
  struct Column {
    IntVector u, v;     ///< support points with x = u - v
    std::size_t power;  ///< z_m
  };
  std::vector<Column> provenance;
  std::size_t z = 0;
  BigInt det;

  IntVector column(std::size_t m) const {
    IntVector c(matrix.dim());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = matrix(i, m);
    return c;
  }
};

/// Greedy basis of Q^k inside V^{d-1}. Candidates are scanned by ascending
/// power, then lexicographically over the sign-canonical half of V (x and
/// -x span the same line). Independence is tested with exact rank.
inline SupportBasis support_basis(const IncrementDistribution& mu, const IntMatrix& a, std::size_t d) {
  const std::size_t k = a.dim();
  if (mu.dim() != k) throw Error(ErrorCode::InvalidArgument, "increment dimension differs from matrix");
  std::vector<IntVector> half;
  for (auto& x : difference_set(mu))
    if (detail::is_canonical_sign(x)) half.push_back(std::move(x));

  SupportBasis basis;
  basis.matrix = IntMatrix(k);
  std::vector<IntVector> chosen;
  std::vector<IntVector> powered = half;
  for (std::size_t m = 0; m < d && chosen.size() < k; ++m) {
    for (std::size_t idx = 0; idx < half.size() && chosen.size() < k; ++idx) {
      const IntVector& y = powered[idx];
      if (detail::is_zero(y)) continue;
      chosen.push_back(y);
      if (rank_int(chosen) < chosen.size()) {
        chosen.pop_back();
        continue;
      }
      SupportBasis::Column col{{}, {}, m};
      for (const auto& u : mu.support()) {
        for (const auto& w : mu.support()) {
          if (detail::subtract(u, w) == half[idx]) {
            col.u = u;
            col.v = w;
            break;
          }
        }
        if (!col.u.empty()) break;
      }
      basis.provenance.push_back(std::move(col));
    }
    for (auto& y : powered) y = a.apply(y);
  }
  if (chosen.size() < k) {
    throw Error(ErrorCode::InvariantSubspace,
                "difference set spans only a proper A-invariant subspace (rank " + std::to_string(chosen.size()) +
                    " < " + std::to_string(k) + ")");
  }
  for (std::size_t m = 0; m < k; ++m) {
    for (std::size_t i = 0; i < k; ++i) basis.matrix(i, m) = chosen[m][i];
    basis.z = std::max(basis.z, basis.provenance[m].power);
  }
  basis.det = det_int(basis.matrix);
  return basis;
}

/// Same, with d taken from the minimal polynomial of A.
inline SupportBasis support_basis(const IncrementDistribution& mu, const IntMatrix& a) {
  if (det_int(a) == 0) throw Error(ErrorCode::SingularMatrix, "det(A) = 0");
  return support_basis(mu, a, static_cast<std::size_t>(minimal_poly(a).degree()));
}

/// Outcome of the two gcd conditions on p.
struct Admissibility {
  BigInt gcd_det_a;
  BigInt gcd_det_b;
  bool ok() const { return gcd_det_a == 1 && gcd_det_b == 1; }
  std::string reason() const {
    std::string r;
    if (gcd_det_a != 1) r += "gcd(det A, p) = " + gcd_det_a.str();
    if (gcd_det_b != 1) r += std::string(r.empty() ? "" : "; ") + "gcd(det B, p) = " + gcd_det_b.str();
    return r;
  }
};

inline Admissibility admissibility(const BigInt& det_a, const SupportBasis& basis, std::uint64_t p) {
  if (p < 2) throw Error(ErrorCode::InvalidArgument, "modulus must be at least 2");
  return {gcd(det_a, BigInt(p)), gcd(basis.det, BigInt(p))};
}

inline bool admissible_modulus(const BigInt& det_a, const BigInt& det_b, std::uint64_t p) {
  if (p < 2) throw Error(ErrorCode::InvalidArgument, "modulus must be at least 2");
  return gcd(det_a, BigInt(p)) == 1 && gcd(det_b, BigInt(p)) == 1;
}

inline bool admissible_modulus(const IntMatrix& a, const SupportBasis& basis, std::uint64_t p) {
  return admissibility(det_int(a), basis, p).ok();
}

}  // namespace affmix

#endif  // AFFMIX_INCREMENTS_HPP
