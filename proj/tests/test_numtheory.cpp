#include <gtest/gtest.h>

#include <random>

#include "heron/numtheory.hpp"

using namespace heron;

namespace {

Integer brute_squarefree(Integer n) {
  const int sign = n < 0 ? -1 : 1;
  n = abs(n);
  Integer d = 1;
  for (Integer p = 2; p * p <= n; ++p) {
    unsigned e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e % 2) d *= p;
  }
  return sign * d * n;
}

}  // namespace

TEST(Factorize, SmallComposite) {
  const auto f = nt::factorize(12);
  EXPECT_EQ(f.sign, 1);
  ASSERT_EQ(f.factors.size(), 2u);
  EXPECT_EQ(f.factors[0], (nt::PrimePower{2, 2}));
  EXPECT_EQ(f.factors[1], (nt::PrimePower{3, 1}));
}

TEST(Factorize, Unit) {
  const auto f = nt::factorize(-1);
  EXPECT_EQ(f.sign, -1);
  EXPECT_TRUE(f.factors.empty());
}

// Oracle: exhaustive trial division gives 2^28 * 3^2 * 5.
TEST(Factorize, TableCoefficient) {
  const auto f = nt::factorize(Integer("12079595520"));
  EXPECT_EQ(f.to_string(), "2^28*3^2*5");
  EXPECT_EQ(f.value(), Integer("12079595520"));
}

TEST(Factorize, ZeroRejected) { EXPECT_THROW(nt::factorize(0), InvalidInput); }

TEST(Factorize, RoundTripsRandom) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    Integer n = static_cast<unsigned long>(rng() >> 4);
    if (n == 0) continue;
    if (i % 2) n = -n;
    const auto f = nt::factorize(n);
    EXPECT_EQ(f.value(), n);
    for (std::size_t j = 0; j < f.factors.size(); ++j) {
      EXPECT_TRUE(nt::is_probable_prime(f.factors[j].prime));
      if (j) EXPECT_LT(f.factors[j - 1].prime, f.factors[j].prime);
    }
  }
}

TEST(Factorize, NeedsRho) {
  // Two primes above the trial bound.
  const Integer p("1000000007"), q("998244353");
  const auto f = nt::factorize(p * q * q);
  EXPECT_EQ(f.to_string(), "998244353^2*1000000007");
}

TEST(Factorize, BudgetExhaustedIsLoud) {
  const Integer p("1000000000000000003"), q("1000000000000000009");
  EXPECT_THROW(nt::factorize(p * q, {100, 10}), FactorizationIncomplete);
}

TEST(Primality, KnownValues) {
  EXPECT_TRUE(nt::is_probable_prime(2));
  EXPECT_TRUE(nt::is_probable_prime(Integer("170141183460469231731687303715884105727")));
  EXPECT_FALSE(nt::is_probable_prime(1));
  EXPECT_FALSE(nt::is_probable_prime(561));
  EXPECT_FALSE(nt::is_probable_prime(Integer("3825123056546413051")));
}

TEST(SquarefreePart, Examples) {
  EXPECT_EQ(nt::squarefree_part(Integer(18)), 2);
  EXPECT_EQ(nt::squarefree_part(Integer(-4)), -1);
  EXPECT_EQ(nt::squarefree_part(Integer(1)), 1);
  EXPECT_THROW(nt::squarefree_part(Integer(0)), InvalidInput);
}

TEST(SquarefreePart, MultiplyBack) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long> dist(-1'000'000'000'000L, 1'000'000'000'000L);
  for (int i = 0; i < 1000; ++i) {
    const Integer x = dist(rng);
    if (x == 0) continue;
    const Integer d = nt::squarefree_part(x);
    ASSERT_EQ(x % d, 0);
    const Integer m2 = x / d;
    EXPECT_GT(m2, 0);
    EXPECT_TRUE(nt::is_square(m2));
    EXPECT_EQ(nt::squarefree_part(d), d);
  }
}

TEST(SquarefreePart, InvariantUnderSquares) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<long> dist(1, 100000);
  for (int i = 0; i < 200; ++i) {
    const Integer n = dist(rng) * (i % 3 ? 1 : -1), m = dist(rng);
    EXPECT_EQ(nt::squarefree_part(Integer(n * m * m)), nt::squarefree_part(n));
    EXPECT_EQ(nt::squarefree_part(n), brute_squarefree(n));
  }
}

TEST(SquarefreePart, Rational) {
  EXPECT_EQ(nt::squarefree_part(Rational(8, 27)), 6);
  EXPECT_EQ(nt::squarefree_part(Rational(-1, 4)), -1);
}

TEST(Jacobi, Examples) {
  EXPECT_EQ(nt::jacobi_symbol(2, 7), 1);
  EXPECT_EQ(nt::jacobi_symbol(0, 7), 0);
  EXPECT_EQ(nt::jacobi_symbol(Integer(-1), Integer(7)), -1);
}

TEST(Jacobi, ExhaustiveResidues) {
  for (const auto p : nt::primes_up_to(97)) {
    if (p == 2) continue;
    std::vector<bool> square(p, false);
    for (std::uint64_t t = 1; t < p; ++t) square[t * t % p] = true;
    for (std::uint64_t a = 0; a < 3 * p; ++a) {
      const int expected = a % p == 0 ? 0 : (square[a % p] ? 1 : -1);
      EXPECT_EQ(nt::jacobi_symbol(a, p), expected) << a << " mod " << p;
      EXPECT_EQ(nt::jacobi_symbol(Integer(static_cast<unsigned long>(a)) - 5 * p, Integer(static_cast<unsigned long>(p))),
                expected);
    }
  }
}

TEST(Jacobi, EulerCriterion) {
  std::mt19937_64 rng(3);
  for (const auto p : nt::primes_up_to(2000)) {
    if (p == 2) continue;
    const Integer a = static_cast<unsigned long>(rng() % (10 * p));
    Integer e;
    const Integer pp = static_cast<unsigned long>(p);
    mpz_powm_ui(e.get_mpz_t(), a.get_mpz_t(), (p - 1) / 2, pp.get_mpz_t());
    const int expected = e == 0 ? 0 : (e == 1 ? 1 : -1);
    EXPECT_EQ(nt::jacobi_symbol(a, pp), expected);
  }
}

TEST(Jacobi, CompositeModulus) {
  // (a/15) = (a/3)(a/5).
  for (unsigned long a = 0; a < 60; ++a)
    EXPECT_EQ(nt::jacobi_symbol(a, 15), nt::jacobi_symbol(a, 3) * nt::jacobi_symbol(a, 5));
}

TEST(SqrtModP, Examples) {
  const auto r = nt::sqrt_mod_p(2, 7);
  ASSERT_TRUE(r);
  EXPECT_TRUE(*r == 3 || *r == 4);
  EXPECT_FALSE(nt::sqrt_mod_p(3, 7));
  EXPECT_EQ(*nt::sqrt_mod_p(0, 7), 0);
}

TEST(SqrtModP, SelfCheckBySquaring) {
  std::mt19937_64 rng(5);
  const auto primes = nt::primes_up_to(100000);
  int found = 0;
  for (int i = 0; i < 1000; ++i) {
    const Integer p = primes[rng() % primes.size()];
    const Integer a = static_cast<unsigned long>(rng() % 1'000'000'007ul);
    const auto r = nt::sqrt_mod_p(a, p);
    const bool residue = p == 2 || nt::jacobi_symbol(a, p) >= 0;
    ASSERT_EQ(r.has_value(), residue);
    if (r) {
      EXPECT_EQ((*r * *r - a) % p, 0);
      ++found;
    }
  }
  EXPECT_GT(found, 300);
}

TEST(SqrtModP, PrimeOneModLargePowerOfTwo) {
  // p - 1 = 2^18 * 3 exercises the Tonelli-Shanks loop.
  const Integer p = 786433;
  for (unsigned long a = 1; a < 400; ++a) {
    auto r = nt::sqrt_mod_p(a, p);
    if (r) EXPECT_EQ((*r * *r - a) % p, 0);
    else EXPECT_EQ(nt::jacobi_symbol(Integer(a), p), -1);
  }
}

TEST(SqrtModP, CompositeModulusDetected) {
  // 196609 = 7 * 28087: every call returns a true root or throws, none hangs.
  bool thrown = false;
  for (unsigned long a = 2; a < 200 && !thrown; ++a) {
    try {
      const auto r = nt::sqrt_mod_p(a, 196609);
      if (r) EXPECT_EQ((*r * *r - a) % 196609, 0);
    } catch (const InvalidInput&) {
      thrown = true;
    }
  }
  EXPECT_TRUE(thrown);
}

TEST(RationalSquare, Examples) {
  EXPECT_EQ(nt::is_rational_square(Rational(4862025)), Rational(2205));
  EXPECT_FALSE(nt::is_rational_square(Rational(2)));
  EXPECT_EQ(nt::is_rational_square(Rational(0)), Rational(0));
  EXPECT_EQ(nt::is_rational_square(Rational(9, 4)), Rational(3, 2));
  EXPECT_FALSE(nt::is_rational_square(Rational(-9, 4)));
  EXPECT_FALSE(nt::is_rational_square(Rational(9, 8)));
}

TEST(ParseRational, Forms) {
  EXPECT_EQ(nt::parse_rational("98/625"), Rational(98, 625));
  EXPECT_EQ(nt::parse_rational("-4/6"), Rational(-2, 3));
  EXPECT_EQ(nt::parse_rational("+7"), Rational(7));
  EXPECT_THROW(nt::parse_rational("1/0"), InvalidInput);
  EXPECT_THROW(nt::parse_rational("abc"), InvalidInput);
  EXPECT_THROW(nt::parse_rational(""), InvalidInput);
  EXPECT_THROW(nt::parse_rational("3/-"), InvalidInput);
}

TEST(Divisors, OfTwelve) {
  const auto d = nt::divisors(nt::factorize(12));
  EXPECT_EQ(d, (std::vector<Integer>{1, 2, 3, 4, 6, 12}));
}
