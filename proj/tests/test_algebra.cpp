#include <gtest/gtest.h>

#include <complex>
#include <random>

#include "affmix/algebra.hpp"
#include "affmix/linalg.hpp"
#include "oracles.hpp"
#include "suite.hpp"

using namespace affmix;

namespace {

IntMatrix random_matrix(std::mt19937_64& rng, std::size_t k, int lo, int hi) {
  std::uniform_int_distribution<int> dist(lo, hi);
  IntMatrix m(k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) m(i, j) = dist(rng);
  return m;
}

std::vector<std::size_t> iota_order(std::size_t k) {
  std::vector<std::size_t> o(k);
  for (std::size_t i = 0; i < k; ++i) o[i] = i;
  return o;
}

}  // namespace

TEST(Determinant, SmallCases) {
  EXPECT_EQ(det_int(IntMatrix{{2, 0}, {0, 3}}), 6);
  EXPECT_EQ(det_int(IntMatrix{{0, 1}, {2, 0}}), -2);
  EXPECT_EQ(det_int(IntMatrix::identity(3)), 1);
  EXPECT_EQ(det_int(IntMatrix{{1, 2}, {2, 4}}), 0);
}

TEST(Determinant, NeedsPivotSwap) {
  EXPECT_EQ(det_int(IntMatrix{{0, 0, 1}, {0, 1, 0}, {1, 0, 0}}), -1);
  EXPECT_EQ(det_int(IntMatrix{{0, 2, 1}, {3, 0, 0}, {0, 1, 5}}), -27);
}

TEST(Determinant, Multiplicative) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 1 + trial % 4;
    const IntMatrix a = random_matrix(rng, k, -9, 9);
    const IntMatrix b = random_matrix(rng, k, -9, 9);
    EXPECT_EQ(det_int(a * b), det_int(a) * det_int(b));
  }
}

TEST(Determinant, NoOverflowOnLargeEntries) {
  // det of diag(10^12, 10^12, 10^12) = 10^36, far beyond 64 bits.
  IntMatrix m(3);
  for (std::size_t i = 0; i < 3; ++i) m(i, i) = BigInt("1000000000000");
  EXPECT_EQ(det_int(m), BigInt("1000000000000000000000000000000000000"));
}

TEST(MatPowMod, Examples) {
  EXPECT_EQ(mat_pow_mod(IntMatrix{{0, 1}, {2, 0}}, 2, 5), (IntMatrix{{2, 0}, {0, 2}}));
  EXPECT_EQ(mat_pow_mod(IntMatrix{{2}}, 3, 5), IntMatrix{{3}});
  EXPECT_EQ(mat_pow_mod(IntMatrix{{7, -3}, {4, 1}}, 0, 11), IntMatrix::identity(2));
}

TEST(MatPowMod, EntriesAreReducedIntoRange) {
  const IntMatrix r = mat_pow_mod(IntMatrix{{0, -1}, {1, 0}}, 1, 7);
  EXPECT_EQ(r, (IntMatrix{{0, 6}, {1, 0}}));
}

TEST(MatPowMod, ExponentsAdd) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 1 + trial % 3;
    const IntMatrix a = random_matrix(rng, k, -20, 20);
    const std::uint64_t e1 = rng() % 40, e2 = rng() % 40;
    const BigInt p = 2 + rng() % 97;
    IntMatrix prod = mat_pow_mod(a, e1, p) * mat_pow_mod(a, e2, p);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) prod(i, j) = mod_floor(prod(i, j), p);
    EXPECT_EQ(mat_pow_mod(a, e1 + e2, p), prod);
  }
}

TEST(CharPoly, Examples) {
  EXPECT_EQ(char_poly(IntMatrix{{0, 1}, {2, 0}}), (IntPolynomial{-2, 0, 1}));
  EXPECT_EQ(char_poly(IntMatrix{{2, 1}, {1, 1}}), (IntPolynomial{1, -3, 1}));
  EXPECT_EQ(char_poly(IntMatrix{{1, 0}, {0, 2}}), (IntPolynomial{2, -3, 1}));
  EXPECT_EQ(char_poly(IntMatrix{{2, 1}, {1, 1}}).to_string(), "x^2 - 3x + 1");
}

TEST(CharPoly, CayleyHamiltonAndMinimalPolyAnnihilate) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t k = 1 + trial % 4;
    const IntMatrix a = random_matrix(rng, k, -5, 5);
    const IntPolynomial cp = char_poly(a);
    EXPECT_EQ(cp.degree(), static_cast<int>(k));
    EXPECT_TRUE(cp.is_monic());
    EXPECT_TRUE(cp.evaluate(a).is_zero());
    const IntPolynomial mp = minimal_poly(a);
    EXPECT_TRUE(mp.evaluate(a).is_zero());
    EXPECT_LE(mp.degree(), cp.degree());
    EXPECT_GE(mp.degree(), 1);
  }
}

TEST(MinimalPoly, Examples) {
  EXPECT_EQ(minimal_poly(IntMatrix::identity(2)), (IntPolynomial{-1, 1}));
  EXPECT_EQ(minimal_poly(IntMatrix{{2, 1}, {0, 2}}), (IntPolynomial{4, -4, 1}));
  EXPECT_EQ(minimal_poly(IntMatrix{{2, 0}, {0, 2}}), (IntPolynomial{-2, 1}));
}

TEST(MinimalPoly, DividesCharPoly) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    const IntMatrix a = random_matrix(rng, 3, -3, 3);
    const auto [q, r] = detail::divmod(detail::to_rat(char_poly(a)), detail::to_rat(minimal_poly(a)));
    EXPECT_TRUE(r.empty());
  }
}

TEST(Eigenvalues, Examples) {
  auto r = eigenvalues(IntPolynomial{-2, 0, 1});
  ASSERT_EQ(r.size(), 2u);
  EXPECT_NEAR(r[0].real(), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(r[1].real(), -std::sqrt(2.0), 1e-12);

  const auto [q1, q2] = oracle::quadratic(-3.0, 1.0);
  r = eigenvalues(IntPolynomial{1, -3, 1});
  EXPECT_NEAR(std::abs(r[0] - q1), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(r[1] - q2), 0.0, 1e-12);
  EXPECT_NEAR(r[0].real(), 2.61803399, 1e-8);
  EXPECT_NEAR(r[1].real(), 0.38196601, 1e-8);

  r = eigenvalues(IntPolynomial{1, 0, 1});
  ASSERT_EQ(r.size(), 2u);
  EXPECT_NEAR(std::abs(r[0] - std::complex<double>(0, 1)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(r[1] - std::complex<double>(0, -1)), 0.0, 1e-12);
}

TEST(Eigenvalues, RepeatedRootsKeepMultiplicity) {
  const auto r = eigenvalues(IntPolynomial{-8, 12, -6, 1});  // (x-2)^3
  ASSERT_EQ(r.size(), 3u);
  for (const auto& z : r) EXPECT_NEAR(std::abs(z - 2.0), 0.0, 1e-9);
}

TEST(Eigenvalues, ProductMatchesConstantTerm) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = 1 + trial % 4;
    const IntMatrix a = random_matrix(rng, k, -6, 6);
    const IntPolynomial cp = char_poly(a);
    const auto r = eigenvalues(cp);
    ASSERT_EQ(r.size(), k);
    std::complex<double> prod = 1.0;
    for (const auto& z : r) prod *= z;
    const double expect = (k % 2 ? -1.0 : 1.0) * static_cast<double>(cp.coeff(0));
    EXPECT_NEAR(prod.real(), expect, 1e-6 * std::max(1.0, std::abs(expect)));
    EXPECT_NEAR(prod.imag(), 0.0, 1e-6 * std::max(1.0, std::abs(expect)));
  }
}

TEST(Eigenvalues, ZeroPolynomialRejected) {
  EXPECT_THROW(eigenvalues(IntPolynomial(std::vector<BigInt>{})), Error);
}

TEST(RootOrder, Examples) {
  auto o = root_of_integer_order(IntPolynomial{-2, 0, 1}, 12);
  ASSERT_TRUE(o);
  EXPECT_EQ(o->l, 2u);
  EXPECT_EQ(o->m, 2);
  o = root_of_integer_order(IntPolynomial{-3, 1}, 12);
  ASSERT_TRUE(o);
  EXPECT_EQ(o->l, 1u);
  EXPECT_EQ(o->m, 3);
  EXPECT_FALSE(root_of_integer_order(IntPolynomial{1, -3, 1}, 12));
  o = root_of_integer_order(IntPolynomial{1, 0, 1}, 12);  // i^4 = 1
  ASSERT_TRUE(o);
  EXPECT_EQ(o->l, 4u);
  EXPECT_EQ(o->m, 1);
}

TEST(Factor, SplitsIntoIrreducibles) {
  // (x^2 - 2)(x - 3)^2 (x^2 + 1)
  const IntPolynomial f = IntPolynomial{-2, 0, 1} * IntPolynomial{-3, 1} * IntPolynomial{-3, 1} *
                          IntPolynomial{1, 0, 1};
  const auto fac = factor(f);
  EXPECT_TRUE(fac.complete);
  IntPolynomial back{1};
  for (const auto& pf : fac.factors) {
    EXPECT_TRUE(pf.irreducible);
    for (int m = 0; m < pf.multiplicity; ++m) back = back * pf.poly;
  }
  EXPECT_EQ(back, f);
}

TEST(Factor, QuarticIntoQuadratics) {
  const IntPolynomial f = IntPolynomial{-2, 0, 1} * IntPolynomial{1, -3, 1};
  const auto fac = factor(f);
  EXPECT_TRUE(fac.complete);
  EXPECT_EQ(fac.factors.size(), 2u);
}

TEST(Classify, Examples) {
  auto prof = classify_regime(IntMatrix{{0, 1}, {2, 0}});
  EXPECT_EQ(prof.regime, Regime::RootsOfIntegerExpanding);
  ASSERT_EQ(prof.factors.size(), 1u);
  ASSERT_TRUE(prof.factors[0].order);
  EXPECT_EQ(prof.factors[0].order->l, 2u);
  EXPECT_EQ(prof.factors[0].order->m, 2);
  EXPECT_EQ(classify_regime(IntMatrix{{1, 0}, {0, 2}}).regime, Regime::UnitRootMixed);
  EXPECT_EQ(classify_regime(IntMatrix{{2, 1}, {1, 1}}).regime, Regime::NonUnitModulus);
  EXPECT_EQ(classify_regime(IntMatrix{{0, -1}, {1, 0}}).regime, Regime::UnitRootTorsion);
  EXPECT_EQ(classify_regime(IntMatrix{{1}}).regime, Regime::UnitRootTorsion);
  EXPECT_EQ(classify_regime(IntMatrix{{2}}).regime, Regime::RootsOfIntegerExpanding);
}

TEST(Classify, ProfileShape) {
  const auto prof = classify_regime(IntMatrix{{2, 1}, {0, 2}});
  EXPECT_EQ(prof.det, 4);
  EXPECT_EQ(prof.d, 2u);
  EXPECT_EQ(prof.eigenvalues.size(), 2u);
  EXPECT_EQ(prof.regime, Regime::RootsOfIntegerExpanding);
}

TEST(Classify, SingularRejected) {
  try {
    classify_regime(IntMatrix{{1, 2}, {2, 4}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularMatrix);
  }
}

TEST(Classify, UnimodularSimilarityInvariant) {
  std::mt19937_64 rng(31);
  const IntMatrix u{{1, 1}, {0, 1}};
  const IntMatrix u_inv{{1, -1}, {0, 1}};
  const IntMatrix w{{2, 1}, {1, 1}};
  const IntMatrix w_inv{{1, -1}, {-1, 2}};
  for (const auto& c : suite::cases()) {
    const IntMatrix a = c.matrix();
    if (a.dim() != 2) continue;
    const Regime r = classify_regime(a).regime;
    EXPECT_EQ(classify_regime(u * a * u_inv).regime, r) << c.name;
    EXPECT_EQ(classify_regime(w * a * w_inv).regime, r) << c.name;
    EXPECT_EQ(char_poly(w * a * w_inv), char_poly(a)) << c.name;
  }
}

TEST(Identities, Examples) {
  const IntMatrix a{{0, 1}, {2, 0}};
  auto r = verify_identity(a, iota_order(2), 1, 0, TelescopingIdentity::PowerExpansion);
  EXPECT_TRUE(r.holds);

  r = verify_identity(IntMatrix{{2, 0}, {0, 3}}, iota_order(2), 1, 3, TelescopingIdentity::ProductRecursion);
  EXPECT_TRUE(r.holds);
  EXPECT_TRUE(r.exact);
  EXPECT_EQ(r.residual, 0.0);

  r = verify_identity(a, iota_order(2), 1, 4, TelescopingIdentity::ProductRecursion);
  EXPECT_TRUE(r.holds);
  EXPECT_FALSE(r.exact);
  EXPECT_LE(r.residual, 1e-8);
}

TEST(Identities, WholeSuiteAnyOrder) {
  for (const auto& c : suite::cases()) {
    const IntMatrix a = c.matrix();
    const auto d = static_cast<std::size_t>(minimal_poly(a).degree());
    std::vector<std::size_t> order = iota_order(a.dim());
    do {
      for (std::size_t e = 0; e <= d; ++e)
        for (std::uint64_t j = 0; j <= 10; ++j)
          for (auto which : {TelescopingIdentity::PowerExpansion, TelescopingIdentity::ProductRecursion})
            EXPECT_TRUE(verify_identity(a, order, e, j, which).holds) << c.name << " e=" << e << " j=" << j;
    } while (std::next_permutation(order.begin(), order.end()));
  }
}

TEST(Identities, Errors) {
  const IntMatrix a{{0, 1}, {2, 0}};
  try {
    verify_identity(a, {0}, 1, 0, TelescopingIdentity::PowerExpansion);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OrderMismatch);
  }
  EXPECT_THROW(verify_identity(a, {0, 1}, 3, 0, TelescopingIdentity::PowerExpansion), Error);
  EXPECT_THROW(verify_identity(a, {1, 1}, 1, 0, TelescopingIdentity::PowerExpansion), Error);
}

TEST(Linalg, KernelAndRank) {
  const IntMatrix m{{1, 2}, {2, 4}};
  const auto ker = kernel_basis(m);
  ASSERT_EQ(ker.size(), 1u);
  EXPECT_EQ(m.apply(ker[0]), (IntVector{0, 0}));
  EXPECT_EQ(rank_int({IntVector{1, 2}, IntVector{2, 4}}), 1u);
  EXPECT_EQ(rank_int({IntVector{1, 0}, IntVector{0, 2}}), 2u);
}
