#include <gtest/gtest.h>

#include <random>

#include "heron/polynomial.hpp"

using namespace heron;

namespace {

RatPolynomial cubic(long a, long b, long c, long d) { return RatPolynomial::from_descending({a, b, c, d}); }

void expect_roots_vanish(const RatPolynomial& p, const std::vector<Rational>& roots) {
  for (const auto& r : roots) EXPECT_EQ(p(r), 0) << r;
}

}  // namespace

TEST(RationalRoots, FirstCoincidenceCubic) {
  const auto p = cubic(1, -14, 28, -8);
  EXPECT_EQ(rational_roots(p), std::vector<Rational>{2});
  EXPECT_EQ(rational_roots_lifted(p), std::vector<Rational>{2});
}

// The cubic as printed; direct substitution gives 8 - 32 + 8 + 16 = 0.
TEST(RationalRoots, PrintedSecondCubicHasRootTwo) {
  const auto p = cubic(1, -8, 4, 16);
  EXPECT_EQ(rational_roots(p), std::vector<Rational>{2});
  EXPECT_EQ(rational_roots_lifted(p), std::vector<Rational>{2});
}

// 2(c - a) expands to k^3 - 8k^2 + 4k - 16, which has no rational root.
TEST(RationalRoots, ExpandedSecondCubicHasNone) {
  const auto p = cubic(1, -8, 4, -16);
  EXPECT_TRUE(rational_roots(p).empty());
  EXPECT_TRUE(rational_roots_lifted(p).empty());
}

TEST(RationalRoots, QuadraticWithIrrationalRoots) {
  const auto p = RatPolynomial::from_descending({6, -24, -8});
  EXPECT_TRUE(rational_roots(p).empty());
  EXPECT_TRUE(rational_roots_lifted(p).empty());
}

TEST(RationalRoots, FractionalCoefficientsAndZeroRoot) {
  // x (x - 1/2)(3x + 2) / 7
  const RatPolynomial p = Rational(1, 7) * RatPolynomial::from_descending({Rational(3), Rational(1, 2), Rational(-1), Rational(0)});
  const std::vector<Rational> expected{Rational(-2, 3), 0, Rational(1, 2)};
  EXPECT_EQ(rational_roots(p), expected);
  EXPECT_EQ(rational_roots_lifted(p), expected);
}

TEST(RationalRoots, ZeroPolynomialRejected) {
  EXPECT_THROW(rational_roots(RatPolynomial{}), InvalidInput);
  EXPECT_THROW(rational_roots_lifted(RatPolynomial{}), InvalidInput);
}

TEST(RationalRoots, BothRoutesAgreeOnRandomProducts) {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<long> num(-30, 30), den(1, 12), count(0, 4);
  const RatPolynomial irreducible = RatPolynomial::from_descending({1, 1, 1});
  for (int trial = 0; trial < 200; ++trial) {
    RatPolynomial p = trial % 2 ? irreducible : RatPolynomial::from_ascending({Rational(1)});
    std::vector<Rational> roots;
    const long n = count(rng);
    for (long i = 0; i < n; ++i) {
      Rational r(num(rng), den(rng));
      r.canonicalize();
      roots.push_back(r);
      p = p * RatPolynomial::from_descending({Rational(1), -r});
    }
    p = Rational(num(rng) == 0 ? 5 : 3, 7) * p;
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    if (p.degree() <= 0) continue;
    EXPECT_EQ(rational_roots(p), roots);
    EXPECT_EQ(rational_roots_lifted(p), roots);
    expect_roots_vanish(p, rational_roots_lifted(p));
  }
}

TEST(RationalRoots, LiftedHandlesHugeCoefficients) {
  // (x - a)(x - b)(x^2 + 3) with 40-digit roots: far beyond factoring.
  const Rational a("1234567890123456789012345678901234567891"), b("-987654321098765432109876543210987654321/7");
  const auto p = RatPolynomial::from_descending({Rational(1), -a}) * RatPolynomial::from_descending({Rational(1), -b}) *
                 RatPolynomial::from_descending({1, 0, 3});
  const std::vector<Rational> expected{b, a};
  EXPECT_EQ(rational_roots_lifted(p), expected);
}

TEST(Polynomial, ArithmeticAndEvaluation) {
  const auto p = RatPolynomial::from_descending({1, -3, 2});  // (x - 1)(x - 2)
  const auto q = RatPolynomial::from_descending({1, -1});
  const auto [quot, rem] = poly::divmod(p, q);
  EXPECT_EQ(quot, RatPolynomial::from_descending({1, -2}));
  EXPECT_TRUE(rem.is_zero());
  EXPECT_EQ(p(Rational(3)), 2);
  EXPECT_EQ(p.derivative(), RatPolynomial::from_descending({2, -3}));
  EXPECT_EQ(poly::gcd(p, q * q), q);
  EXPECT_EQ(poly::squarefree(p * q), p);
  EXPECT_EQ((p - p).degree(), -1);
  EXPECT_THROW(poly::divmod(p, RatPolynomial{}), InvalidInput);
}

TEST(Polynomial, PrimitivePart) {
  const auto p = RatPolynomial::from_descending({Rational(-2, 3), Rational(4, 9)});
  EXPECT_EQ(poly::primitive_part(p), IntPolynomial::from_descending({3, -2}));
}
