#ifndef AFFMIX_FOURIER_HPP
#define AFFMIX_FOURIER_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "affmix/algebra.hpp"
#include "affmix/errors.hpp"
#include "affmix/evolution.hpp"
#include "affmix/increments.hpp"
#include "affmix/linalg.hpp"
#include "affmix/matrix.hpp"

namespace affmix {

/// Frequency alpha in Z_p^k, components in [0, p).
struct FrequencyVector {
  ResidueVector components;
  std::uint64_t p = 2;

  bool is_zero() const {
    return std::all_of(components.begin(), components.end(), [](Residue c) { return c == 0; });
  }

  std::string to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < components.size(); ++i) s += (i ? " " : "") + std::to_string(components[i]);
    return s + ")";
  }
};

/// Every alpha in Z_p^k in lexicographic order (first component most
/// significant); `skip_zero` drops the origin.
inline std::vector<FrequencyVector> all_frequencies(std::uint64_t p, std::size_t k, bool skip_zero,
                                                    std::size_t cap = kDefaultStateCap) {
  const std::size_t n = state_count(p, k, cap);
  std::vector<FrequencyVector> out;
  out.reserve(n);
  ResidueVector digits(k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    FrequencyVector f{digits, p};
    if (!(skip_zero && f.is_zero())) out.push_back(std::move(f));
    for (std::size_t c = k; c-- > 0;) {
      if (++digits[c] < p) break;
      digits[c] = 0;
    }
  }
  return out;
}

namespace detail {

inline Complex unit_phase(Residue numer, std::uint64_t p) {
  const double theta = 2.0 * std::numbers::pi * static_cast<double>(numer) / static_cast<double>(p);
  return {std::cos(theta), std::sin(theta)};
}

inline Residue dot_mod(const ResidueVector& a, const ResidueVector& b, std::uint64_t p) {
  unsigned __int128 acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += static_cast<unsigned __int128>(a[i]) * b[i];
  return static_cast<Residue>(acc % p);
}

inline Complex mu_hat_reduced(const ReducedIncrements& inc, const ResidueVector& alpha) {
  Complex acc(0.0);
  for (std::size_t i = 0; i < inc.residues.size(); ++i) {
    acc += inc.probs[i] * unit_phase(dot_mod(inc.residues[i], alpha, inc.p), inc.p);
  }
  return acc;
}

inline void require_coprime(const ChainSpec& chain) {
  if (gcd(det_int(chain.A), BigInt(chain.p)) != 1) {
    throw Error(ErrorCode::ModulusNotCoprime, "gcd(det A, " + std::to_string(chain.p) + ") != 1");
  }
}

/// max absolute row sum of tA (= max absolute column sum of A).
inline double transpose_inf_norm(const IntMatrix& a) {
  BigInt best(0);
  for (std::size_t j = 0; j < a.dim(); ++j) {
    BigInt col(0);
    for (std::size_t i = 0; i < a.dim(); ++i) col += a(i, j) < 0 ? BigInt(-a(i, j)) : a(i, j);
    best = std::max(best, col);
  }
  return static_cast<double>(best);
}

template <class V>
double inf_norm(const V& v) {
  double best = 0.0;
  for (const auto& c : v) best = std::max(best, std::abs(static_cast<double>(c)));
  return best;
}

}  // namespace detail

/// mu_hat(alpha) = sum_h mu(h) exp(2 pi i <h, alpha> / p), phases reduced
/// exactly mod p before the trigonometric evaluation.
inline Complex mu_hat(const IncrementDistribution& mu, const FrequencyVector& alpha) {
  if (alpha.components.size() != mu.dim()) throw Error(ErrorCode::InvalidArgument, "frequency dimension mismatch");
  return detail::mu_hat_reduced(reduce_sparse(mu, alpha.p), alpha.components);
}

/// |P_n_hat(alpha)|^2 for n = 0..n_max via the product formula, with tA^j
/// alpha iterated exactly mod p. Entry n is prod_{j<n} |mu_hat(tA^j alpha)|^2.
inline std::vector<double> pn_hat_sq_series(const ChainSpec& chain, const FrequencyVector& alpha,
                                            std::uint64_t n_max) {
  detail::require_coprime(chain);
  if (alpha.p != chain.p || alpha.components.size() != chain.dim()) {
    throw Error(ErrorCode::InvalidArgument, "frequency does not match chain");
  }
  const auto inc = reduce_sparse(chain.mu, chain.p);
  const ResidueMatrix at = ResidueMatrix(chain.A, chain.p).transpose();
  std::vector<double> out;
  out.reserve(n_max + 1);
  out.push_back(1.0);
  ResidueVector beta = alpha.components;
  double prod = 1.0;
  for (std::uint64_t j = 0; j < n_max; ++j) {
    prod *= std::norm(detail::mu_hat_reduced(inc, beta));
    out.push_back(prod);
    beta = at.apply(beta);
  }
  return out;
}

inline double pn_hat_sq(const ChainSpec& chain, const FrequencyVector& alpha, std::uint64_t n) {
  return pn_hat_sq_series(chain, alpha, n).back();
}

/// 1/4 sum_{alpha != 0} |P_n_hat(alpha)|^2 (squared-TV bound, before the
/// square root). Per-alpha products that fall below 1e-30 stop early and
/// contribute zero.
inline double upper_bound(const ChainSpec& chain, std::uint64_t n, std::size_t cap = kDefaultStateCap) {
  detail::require_coprime(chain);
  const auto inc = reduce_sparse(chain.mu, chain.p);
  const ResidueMatrix at = ResidueMatrix(chain.A, chain.p).transpose();
  double sum = 0.0;
  for (const auto& alpha : all_frequencies(chain.p, chain.dim(), true, cap)) {
    ResidueVector beta = alpha.components;
    double prod = 1.0;
    for (std::uint64_t j = 0; j < n; ++j) {
      prod *= std::norm(detail::mu_hat_reduced(inc, beta));
      if (prod < 1e-30) {
        prod = 0.0;
        break;
      }
      beta = at.apply(beta);
    }
    sum += prod;
  }
  return 0.25 * sum;
}

/// 1/2 |P_n_hat(alpha)|, a lower bound on the TV distance for alpha != 0.
inline double lower_bound_at(const ChainSpec& chain, const FrequencyVector& alpha, std::uint64_t n) {
  if (alpha.is_zero()) throw Error(ErrorCode::ZeroFrequency, "alpha must be nonzero");
  return 0.5 * std::sqrt(pn_hat_sq(chain, alpha, n));
}

struct LowerBoundWitness {
  double value = 0.0;
  FrequencyVector alpha;
};

/// Best lower bound over alpha != 0; ties go to the lexicographically first.
inline LowerBoundWitness best_lower_bound(const ChainSpec& chain, std::uint64_t n,
                                          std::size_t cap = kDefaultStateCap) {
  LowerBoundWitness best{-1.0, {}};
  for (const auto& alpha : all_frequencies(chain.p, chain.dim(), true, cap)) {
    const double v = lower_bound_at(chain, alpha, n);
    if (v > best.value) best = {v, alpha};
  }
  return best;
}

struct RhoCertificate {
  double rho = 0.0;
  double inf_norm = 0.0;  ///< ||tA||_inf
  double bound = 0.0;
};

/// rho = 2 pi^2 k^2 ||alpha||^2 sum mu(h)mu(i)||h-i||^2 and the bound
/// 1/2 prod_{j<n} (1 - rho ||tA||^{2j} / p^2)^{1/2}. Throws
/// FactorNonpositive (detail = first failing j) when a factor is <= 0.
inline RhoCertificate certificate_rho(const ChainSpec& chain, const FrequencyVector& alpha, std::uint64_t n) {
  if (alpha.is_zero()) throw Error(ErrorCode::ZeroFrequency, "alpha must be nonzero");
  const double k = static_cast<double>(chain.dim());
  const double a_norm = detail::inf_norm(alpha.components);
  RhoCertificate cert;
  cert.rho = 2.0 * std::numbers::pi * std::numbers::pi * k * k * a_norm * a_norm * chain.mu.mean_square_spread();
  cert.inf_norm = detail::transpose_inf_norm(chain.A);
  const double p2 = static_cast<double>(chain.p) * static_cast<double>(chain.p);
  double prod = 1.0;
  double growth = 1.0;  // ||tA||^{2j}
  for (std::uint64_t j = 0; j < n; ++j) {
    const double factor = 1.0 - cert.rho * growth / p2;
    if (!(factor > 0.0)) {
      throw Error(ErrorCode::FactorNonpositive, "factor j = " + std::to_string(j) + " is not positive", j);
    }
    prod *= factor;
    growth *= cert.inf_norm * cert.inf_norm;
  }
  cert.bound = 0.5 * std::sqrt(prod);
  return cert;
}

struct GammaCertificate {
  std::uint64_t l = 0;  ///< tA^l alpha = alpha
  IntVector alpha;      ///< primitive integer fixed vector
  double gamma = 0.0;
  double bound = 0.0;   ///< 1/2 (1 - gamma / p^2)^{n/2}
};

/// Torsion certificate: smallest l <= l_max with a nonzero rational kernel
/// of tA^l - I, a primitive integer kernel vector alpha (first basis vector,
/// first nonzero entry positive), gamma = 2 pi^2 k^2 ||alpha||^2
/// max_{i<l} ||tA||^{2i} sum mu(h)mu(i)||h-i||^2.
inline GammaCertificate certificate_gamma(const ChainSpec& chain, std::uint64_t l_max, std::uint64_t n) {
  const IntMatrix at = chain.A.transpose();
  const IntMatrix id = IntMatrix::identity(chain.dim());
  IntMatrix power = id;
  GammaCertificate cert;
  for (std::uint64_t l = 1; l <= l_max && cert.l == 0; ++l) {
    power = power * at;
    const auto kernel = kernel_basis(power - id);
    if (!kernel.empty()) {
      cert.l = l;
      cert.alpha = kernel.front();
    }
  }
  if (cert.l == 0) {
    throw Error(ErrorCode::NoTorsion, "no l <= " + std::to_string(l_max) + " with tA^l alpha = alpha");
  }
  const double a_norm = detail::inf_norm(cert.alpha);
  if (!(static_cast<double>(chain.p) > a_norm)) {
    throw Error(ErrorCode::InvalidArgument, "modulus must exceed ||alpha||_inf");
  }
  const double k = static_cast<double>(chain.dim());
  const double norm = detail::transpose_inf_norm(chain.A);
  const double growth = std::pow(std::max(norm, 1.0), 2.0 * static_cast<double>(cert.l - 1));
  cert.gamma = 2.0 * std::numbers::pi * std::numbers::pi * k * k * a_norm * a_norm * growth *
               chain.mu.mean_square_spread();
  const double p2 = static_cast<double>(chain.p) * static_cast<double>(chain.p);
  if (cert.gamma >= p2) throw Error(ErrorCode::GammaTooLarge, "gamma >= p^2");
  cert.bound = 0.5 * std::pow(1.0 - cert.gamma / p2, static_cast<double>(n) / 2.0);
  return cert;
}

/// Fractional parts of tA^j alpha / p, from the exact residue of tA^j alpha.
inline std::vector<double> xi_fractional(const IntMatrix& a, const FrequencyVector& alpha, std::uint64_t j) {
  const IntMatrix power = mat_pow_mod(a.transpose(), j, BigInt(alpha.p));
  IntVector av(alpha.components.begin(), alpha.components.end());
  const IntVector v = power.apply(av);
  std::vector<double> out;
  for (const auto& c : v) {
    out.push_back(static_cast<double>(mod_floor(c, BigInt(alpha.p))) / static_cast<double>(alpha.p));
  }
  return out;
}

/// First j <= j_max at which some component of {xi_j} lies in
/// [delta, 1 - delta]; empirical diagnostic only.
inline std::optional<std::uint64_t> xi_first_hit(const IntMatrix& a, const FrequencyVector& alpha, double delta,
                                                 std::uint64_t j_max) {
  const ResidueMatrix at = ResidueMatrix(a, alpha.p).transpose();
  ResidueVector beta = alpha.components;
  for (std::uint64_t j = 0; j <= j_max; ++j) {
    for (Residue c : beta) {
      const double frac = static_cast<double>(c) / static_cast<double>(alpha.p);
      if (frac >= delta && frac <= 1.0 - delta) return j;
    }
    beta = at.apply(beta);
  }
  return std::nullopt;
}

/// One row of the bounds table.
struct BoundsReport {
  std::uint64_t n = 0;
  double tv = 0.0;
  double upper = 0.0;  ///< squared-TV bound
  double lower_best = 0.0;
  FrequencyVector witness;
  std::optional<double> certificate;
};

/// tv, upper and lower bounds for n = 0..n_max. The certificate column
/// holds the torsion bound when tA has a fixed vector up to l_max,
/// otherwise the rho bound at alpha = e_1 while its factors stay positive.
inline std::vector<BoundsReport> bounds_table(const ChainSpec& chain, std::uint64_t n_max,
                                              std::uint64_t l_max = kDefaultLMax,
                                              std::size_t cap = kDefaultStateCap) {
  chain.validate();
  const ExactStepper stepper(chain, cap);
  const auto freqs = all_frequencies(chain.p, chain.dim(), true, cap);
  std::vector<std::vector<double>> series;
  series.reserve(freqs.size());
  for (const auto& f : freqs) series.push_back(pn_hat_sq_series(chain, f, n_max));

  std::optional<GammaCertificate> gamma;
  try {
    gamma = certificate_gamma(chain, l_max, 0);
  } catch (const Error&) {
  }
  FrequencyVector e1{ResidueVector(chain.dim(), 0), chain.p};
  e1.components[0] = 1;

  std::vector<BoundsReport> rows;
  StateDistribution d = StateDistribution::delta(chain.p, chain.start(), cap);
  for (std::uint64_t n = 0; n <= n_max; ++n) {
    BoundsReport r;
    r.n = n;
    r.tv = tv_distance(d);
    double sum = 0.0, best = -1.0;
    for (std::size_t i = 0; i < freqs.size(); ++i) {
      sum += series[i][n];
      const double lb = 0.5 * std::sqrt(series[i][n]);
      if (lb > best) {
        best = lb;
        r.witness = freqs[i];
      }
    }
    r.upper = 0.25 * sum;
    r.lower_best = best;
    if (gamma) {
      r.certificate = 0.5 * std::pow(1.0 - gamma->gamma / (static_cast<double>(chain.p) * chain.p),
                                     static_cast<double>(n) / 2.0);
    } else {
      try {
        r.certificate = certificate_rho(chain, e1, n).bound;
      } catch (const Error&) {
      }
    }
    rows.push_back(std::move(r));
    if (n < n_max) d = stepper.step(d);
  }
  return rows;
}

/// CSV header `n,tv,upper,lower_best,alpha_witness,certificate`; the witness
/// is space-separated in parentheses and an absent certificate is empty.
inline void write_bounds_csv(std::ostream& os, const std::vector<BoundsReport>& rows) {
  os << "n,tv,upper,lower_best,alpha_witness,certificate\n";
  const auto flags = os.flags();
  os << std::setprecision(17);
  for (const auto& r : rows) {
    os << r.n << ',' << r.tv << ',' << r.upper << ',' << r.lower_best << ',' << r.witness.to_string() << ',';
    if (r.certificate) os << *r.certificate;
    os << '\n';
  }
  os.flags(flags);
}

}  // namespace affmix

#endif  // AFFMIX_FOURIER_HPP
