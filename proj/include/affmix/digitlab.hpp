#ifndef AFFMIX_DIGITLAB_HPP
#define AFFMIX_DIGITLAB_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "affmix/errors.hpp"

namespace affmix {

/// Consecutive base-sigma digits of a/p starting after `offset` digits.
struct DigitBlock {
  std::uint64_t sigma = 2;
  std::vector<std::uint64_t> digits;
  std::uint64_t a = 0;
  std::uint64_t p = 0;
  std::uint64_t offset = 0;
};

/// First t digits of a/p in base sigma by long division:
/// digit = floor(sigma a / p), a <- sigma a mod p.
inline DigitBlock base_digits(std::uint64_t a, std::uint64_t p, std::uint64_t sigma, std::size_t t) {
  if (sigma < 2) throw Error(ErrorCode::InvalidArgument, "base must be at least 2");
  if (a == 0 || a >= p) throw Error(ErrorCode::OutOfRange, "numerator must lie in (0, p)");
  DigitBlock block{sigma, {}, a, p, 0};
  block.digits.reserve(t);
  unsigned __int128 rem = a;
  for (std::size_t i = 0; i < t; ++i) {
    const unsigned __int128 scaled = rem * sigma;
    block.digits.push_back(static_cast<std::uint64_t>(scaled / p));
    rem = scaled % p;
  }
  return block;
}

/// Pairs (a_j, a_{j+1}) with a_j != a_{j+1}, or a_j = a_{j+1} not in {0, sigma-1}.
inline std::size_t generalized_alternations(const DigitBlock& block) {
  std::size_t count = 0;
  for (std::size_t i = 0; i + 1 < block.digits.size(); ++i) {
    const auto x = block.digits[i];
    const auto y = block.digits[i + 1];
    if (x != y || (x != 0 && x != block.sigma - 1)) ++count;
  }
  return count;
}

/// Smallest t with sigma^t >= p.
inline std::size_t digits_needed(std::uint64_t p, std::uint64_t sigma) {
  std::size_t t = 0;
  unsigned __int128 power = 1;
  while (power < p) {
    power *= sigma;
    ++t;
  }
  return t;
}

struct CensusRow {
  std::uint64_t a = 0;
  std::size_t block_index = 0;
  std::vector<std::uint64_t> digits;
  std::size_t alternations = 0;
};

struct BlockIndexSummary {
  std::size_t block_index = 0;
  bool all_distinct = true;
  std::size_t min_alternations = 0;
  std::map<std::size_t, std::size_t> histogram;  ///< alternations -> blocks
};

struct CensusReport {
  std::uint64_t p = 0;
  std::uint64_t sigma = 2;
  std::size_t t = 0;
  std::size_t r = 0;
  std::vector<CensusRow> rows;
  std::vector<BlockIndexSummary> per_block;

  bool all_distinct() const {
    return std::all_of(per_block.begin(), per_block.end(), [](const auto& b) { return b.all_distinct; });
  }
  std::size_t min_alternations() const {
    std::size_t m = SIZE_MAX;
    for (const auto& b : per_block) m = std::min(m, b.min_alternations);
    return per_block.empty() ? 0 : m;
  }
};

/// For every a in 1..p-1, splits the first r*t digits of a/p into r blocks
/// of length t and tallies distinctness and alternations per block index.
inline CensusReport block_census(std::uint64_t p, std::uint64_t sigma, std::size_t t, std::size_t r) {
  if (p < 2) throw Error(ErrorCode::InvalidArgument, "modulus must be at least 2");
  if (t == 0 || r == 0) throw Error(ErrorCode::InvalidArgument, "block length and count must be positive");
  CensusReport rep{p, sigma, t, r, {}, {}};
  std::vector<std::set<std::vector<std::uint64_t>>> seen(r);
  rep.per_block.resize(r);
  for (std::size_t i = 0; i < r; ++i) {
    rep.per_block[i].block_index = i;
    rep.per_block[i].min_alternations = SIZE_MAX;
  }
  for (std::uint64_t a = 1; a < p; ++a) {
    const DigitBlock full = base_digits(a, p, sigma, r * t);
    for (std::size_t i = 0; i < r; ++i) {
      DigitBlock block{sigma, {}, a, p, i * t};
      block.digits.assign(full.digits.begin() + static_cast<std::ptrdiff_t>(i * t),
                          full.digits.begin() + static_cast<std::ptrdiff_t>((i + 1) * t));
      const std::size_t alt = generalized_alternations(block);
      auto& summary = rep.per_block[i];
      if (!seen[i].insert(block.digits).second) summary.all_distinct = false;
      summary.min_alternations = std::min(summary.min_alternations, alt);
      ++summary.histogram[alt];
      rep.rows.push_back({a, i, std::move(block.digits), alt});
    }
  }
  return rep;
}

/// CSV header `a,block_index,digits,alternations`; digits are written as a
/// space-separated list.
inline void write_census_csv(std::ostream& os, const CensusReport& rep) {
  os << "a,block_index,digits,alternations\n";
  for (const auto& row : rep.rows) {
    os << row.a << ',' << row.block_index << ',';
    for (std::size_t i = 0; i < row.digits.size(); ++i) os << (i ? " " : "") << row.digits[i];
    os << ',' << row.alternations << '\n';
  }
}

}  // namespace affmix

#endif  // AFFMIX_DIGITLAB_HPP
