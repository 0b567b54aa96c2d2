#ifndef AFFMIX_EVOLUTION_HPP
#define AFFMIX_EVOLUTION_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "affmix/errors.hpp"
#include "affmix/increments.hpp"
#include "affmix/linalg.hpp"
#include "affmix/matrix.hpp"

namespace affmix {

inline constexpr std::size_t kDefaultStateCap = 4'000'000;

using Residue = std::uint64_t;
using ResidueVector = std::vector<Residue>;

/// One instance of X_{n+1} = A X_n + B_n (mod p).
struct ChainSpec {
  IntMatrix A;
  IncrementDistribution mu;
  std::uint64_t p = 2;
  ResidueVector x0;  ///< empty means the origin

  std::size_t dim() const { return A.dim(); }

  ResidueVector start() const { return x0.empty() ? ResidueVector(dim(), 0) : x0; }

  /// Throws InvalidArgument on shape errors, ModulusNotCoprime when
  /// gcd(det A, p) != 1.
  void validate() const {
    if (A.dim() == 0) throw Error(ErrorCode::InvalidArgument, "matrix must be nonempty");
    if (p < 2) throw Error(ErrorCode::InvalidArgument, "modulus must be at least 2");
    if (mu.dim() != A.dim()) throw Error(ErrorCode::InvalidArgument, "increment dimension differs from matrix");
    if (!x0.empty()) {
      if (x0.size() != A.dim()) throw Error(ErrorCode::InvalidArgument, "x0 has wrong dimension");
      for (auto c : x0)
        if (c >= p) throw Error(ErrorCode::InvalidArgument, "x0 components must lie in [0, p)");
    }
    if (gcd(det_int(A), BigInt(p)) != 1) {
      throw Error(ErrorCode::ModulusNotCoprime, "gcd(det A, " + std::to_string(p) + ") != 1");
    }
  }
};

/// p^k with overflow and cap checks.
inline std::size_t state_count(std::uint64_t p, std::size_t k, std::size_t cap = kDefaultStateCap) {
  std::size_t n = 1;
  for (std::size_t i = 0; i < k; ++i) {
    if (n > cap / p) {
      throw Error(ErrorCode::StateSpaceTooLarge,
                  std::to_string(p) + "^" + std::to_string(k) + " exceeds cap " + std::to_string(cap));
    }
    n *= p;
  }
  return n;
}

/// Dense law on Z_p^k. Index encoding is little-endian mixed radix:
/// x -> sum_i x_i p^i.
class StateDistribution {
 public:
  StateDistribution() = default;
  StateDistribution(std::uint64_t p, std::size_t k, std::vector<double> values)
      : p_(p), k_(k), values_(std::move(values)) {
    if (values_.size() != state_count(p, k, std::numeric_limits<std::size_t>::max())) {
      throw Error(ErrorCode::InvalidArgument, "value count must equal p^k");
    }
  }

  static StateDistribution delta(std::uint64_t p, const ResidueVector& x,
                                 std::size_t cap = kDefaultStateCap) {
    std::vector<double> v(state_count(p, x.size(), cap), 0.0);
    StateDistribution d(p, x.size(), std::move(v));
    d.values_[d.index(x)] = 1.0;
    return d;
  }

  static StateDistribution uniform(std::uint64_t p, std::size_t k, std::size_t cap = kDefaultStateCap) {
    const std::size_t n = state_count(p, k, cap);
    return StateDistribution(p, k, std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }

  std::uint64_t modulus() const noexcept { return p_; }
  std::size_t dim() const noexcept { return k_; }
  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::size_t index(const ResidueVector& x) const {
    std::size_t idx = 0;
    for (std::size_t i = k_; i-- > 0;) idx = idx * p_ + static_cast<std::size_t>(x[i] % p_);
    return idx;
  }

  ResidueVector decode(std::size_t idx) const {
    ResidueVector x(k_);
    for (std::size_t i = 0; i < k_; ++i) {
      x[i] = idx % p_;
      idx /= p_;
    }
    return x;
  }

  double total() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s;
  }

 private:
  std::uint64_t p_ = 2;
  std::size_t k_ = 0;
  std::vector<double> values_;
};

/// CSV with header `index,probability`, 17 significant digits.
inline void write_csv(std::ostream& os, const StateDistribution& d) {
  os << "index,probability\n";
  const auto flags = os.flags();
  os << std::setprecision(17);
  for (std::size_t i = 0; i < d.size(); ++i) os << i << ',' << d[i] << '\n';
  os.flags(flags);
}

/// Sparse law of the increments folded into Z_p^k: mu_p(r) = sum_{b = r} mu(b).
struct ReducedIncrements {
  std::uint64_t p = 2;
  std::size_t k = 0;
  std::vector<ResidueVector> residues;
  std::vector<double> probs;
};

inline ReducedIncrements reduce_sparse(const IncrementDistribution& mu, std::uint64_t p) {
  std::map<ResidueVector, double> folded;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    ResidueVector r(mu.dim());
    for (std::size_t c = 0; c < mu.dim(); ++c) r[c] = mod_u64(mu.support()[i][c], p);
    folded[r] += mu.probs()[i];
  }
  ReducedIncrements out{p, mu.dim(), {}, {}};
  for (auto& [r, w] : folded) {
    out.residues.push_back(r);
    out.probs.push_back(w);
  }
  return out;
}

/// Dense form of mu_p.
inline StateDistribution reduce_increments(const IncrementDistribution& mu, std::uint64_t p,
                                           std::size_t cap = kDefaultStateCap) {
  const auto sparse = reduce_sparse(mu, p);
  std::vector<double> v(state_count(p, mu.dim(), cap), 0.0);
  StateDistribution shape(p, mu.dim(), std::move(v));
  std::vector<double> out(shape.size(), 0.0);
  for (std::size_t i = 0; i < sparse.residues.size(); ++i) out[shape.index(sparse.residues[i])] += sparse.probs[i];
  return StateDistribution(p, mu.dim(), std::move(out));
}

/// A reduced mod p, applied to residue vectors.
class ResidueMatrix {
 public:
  ResidueMatrix(const IntMatrix& a, std::uint64_t p) : k_(a.dim()), p_(p), e_(k_ * k_) {
    for (std::size_t i = 0; i < k_; ++i)
      for (std::size_t j = 0; j < k_; ++j) e_[i * k_ + j] = mod_u64(a(i, j), p);
  }

  ResidueVector apply(const ResidueVector& x) const {
    ResidueVector y(k_, 0);
    for (std::size_t i = 0; i < k_; ++i) {
      unsigned __int128 acc = 0;
      for (std::size_t j = 0; j < k_; ++j) acc += static_cast<unsigned __int128>(e_[i * k_ + j]) * x[j];
      y[i] = static_cast<Residue>(acc % p_);
    }
    return y;
  }

  ResidueMatrix transpose() const {
    ResidueMatrix t = *this;
    for (std::size_t i = 0; i < k_; ++i)
      for (std::size_t j = 0; j < k_; ++j) t.e_[i * k_ + j] = e_[j * k_ + i];
    return t;
  }

 private:
  std::size_t k_;
  std::uint64_t p_;
  std::vector<Residue> e_;
};

/// Precomputed one-step operator: push-forward through y -> A y (a bijection
/// of Z_p^k when gcd(det A, p) = 1), then convolution with mu_p.
/// Cost per step O(p^k |supp mu_p| k).
class ExactStepper {
 public:
  explicit ExactStepper(const ChainSpec& chain, std::size_t cap = kDefaultStateCap)
      : p_(chain.p), k_(chain.dim()) {
    chain.validate();
    n_ = state_count(p_, k_, cap);
    const ResidueMatrix am(chain.A, p_);
    const StateDistribution shape(p_, k_, std::vector<double>(n_, 0.0));
    image_.resize(n_);
    for (std::size_t y = 0; y < n_; ++y) image_[y] = shape.index(am.apply(shape.decode(y)));
    const auto inc = reduce_sparse(chain.mu, p_);
    probs_ = inc.probs;
    for (const auto& r : inc.residues) {
      std::vector<std::size_t> shift(n_);
      for (std::size_t z = 0; z < n_; ++z) {
        ResidueVector v = shape.decode(z);
        for (std::size_t c = 0; c < k_; ++c) v[c] = (v[c] + r[c]) % p_;
        shift[z] = shape.index(v);
      }
      shifts_.push_back(std::move(shift));
    }
  }

  std::size_t states() const noexcept { return n_; }

  StateDistribution step(const StateDistribution& in) const {
    if (in.modulus() != p_ || in.dim() != k_) throw Error(ErrorCode::InvalidArgument, "distribution shape mismatch");
    std::vector<double> pushed(n_, 0.0);
    for (std::size_t y = 0; y < n_; ++y) pushed[image_[y]] += in[y];
    std::vector<double> out(n_, 0.0);
    for (std::size_t s = 0; s < shifts_.size(); ++s) {
      const double w = probs_[s];
      const auto& shift = shifts_[s];
      for (std::size_t z = 0; z < n_; ++z) out[shift[z]] += w * pushed[z];
    }
    for (auto& v : out)
      if (v < 0.0 && v >= -1e-15) v = 0.0;
    return StateDistribution(p_, k_, std::move(out));
  }

 private:
  std::uint64_t p_;
  std::size_t k_;
  std::size_t n_ = 0;
  std::vector<std::size_t> image_;
  std::vector<std::vector<std::size_t>> shifts_;
  std::vector<double> probs_;
};

inline StateDistribution step_exact(const StateDistribution& dist, const ChainSpec& chain,
                                    std::size_t cap = kDefaultStateCap) {
  return ExactStepper(chain, cap).step(dist);
}

/// Law of X_n started from x0.
inline StateDistribution evolve(const ChainSpec& chain, std::uint64_t n, std::size_t cap = kDefaultStateCap) {
  const ExactStepper stepper(chain, cap);
  StateDistribution d = StateDistribution::delta(chain.p, chain.start(), cap);
  for (std::uint64_t i = 0; i < n; ++i) d = stepper.step(d);
  return d;
}

/// 1/2 sum_x |P(x) - p^{-k}|
inline double tv_distance(const StateDistribution& d) {
  const double u = 1.0 / static_cast<double>(d.size());
  double acc = 0.0;
  for (double v : d.values()) acc += std::abs(v - u);
  return 0.5 * acc;
}

/// Total variation between two laws on the same space.
inline double tv_between(const StateDistribution& a, const StateDistribution& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::InvalidArgument, "distribution shape mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  return 0.5 * acc;
}

/// Empirical law of X_n over `trials` independent trajectories.
///
/// Pseudorandom source: std::mt19937_64 seeded with `seed`. Each increment
/// draw takes one 64-bit output, keeps its top 53 bits as u in [0, 1), and
/// selects the first residue whose cumulative mass exceeds u. Output is
/// therefore identical across platforms for a given seed.
inline StateDistribution simulate(const ChainSpec& chain, std::uint64_t n, std::uint64_t trials,
                                  std::uint64_t seed, std::size_t cap = kDefaultStateCap) {
  chain.validate();
  if (trials == 0) throw Error(ErrorCode::InvalidArgument, "trials must be at least 1");
  const std::size_t states = state_count(chain.p, chain.dim(), cap);
  const ResidueMatrix am(chain.A, chain.p);
  const auto inc = reduce_sparse(chain.mu, chain.p);
  std::vector<double> cumulative(inc.probs.size());
  double run = 0.0;
  for (std::size_t i = 0; i < inc.probs.size(); ++i) cumulative[i] = (run += inc.probs[i]);

  std::mt19937_64 rng(seed);
  const StateDistribution shape(chain.p, chain.dim(), std::vector<double>(states, 0.0));
  std::vector<std::uint64_t> counts(states, 0);
  for (std::uint64_t t = 0; t < trials; ++t) {
    ResidueVector x = chain.start();
    for (std::uint64_t s = 0; s < n; ++s) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
      if (it == cumulative.end()) --it;
      const auto& b = inc.residues[static_cast<std::size_t>(it - cumulative.begin())];
      x = am.apply(x);
      for (std::size_t c = 0; c < x.size(); ++c) x[c] = (x[c] + b[c]) % chain.p;
    }
    ++counts[shape.index(x)];
  }
  std::vector<double> freq(states);
  for (std::size_t i = 0; i < states; ++i) freq[i] = static_cast<double>(counts[i]) / static_cast<double>(trials);
  return StateDistribution(chain.p, chain.dim(), std::move(freq));
}

/// Smallest n <= n_cap with tv(P_n) <= eps, or nullopt when the cap is hit.
inline std::optional<std::uint64_t> mixing_time(const ChainSpec& chain, double eps, std::uint64_t n_cap,
                                                std::size_t cap = kDefaultStateCap) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::InvalidArgument, "eps must lie in (0, 1)");
  const ExactStepper stepper(chain, cap);
  StateDistribution d = StateDistribution::delta(chain.p, chain.start(), cap);
  for (std::uint64_t n = 0;; ++n) {
    if (tv_distance(d) <= eps) return n;
    if (n == n_cap) return std::nullopt;
    d = stepper.step(d);
  }
}

}  // namespace affmix

#endif  // AFFMIX_EVOLUTION_HPP
