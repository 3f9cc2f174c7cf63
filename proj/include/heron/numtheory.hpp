#pragma once

// Exact integer and rational utilities shared by every other header:
// primality, factorization with an explicit budget, square classes,
// the Jacobi symbol and modular square roots.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "heron/errors.hpp"

namespace heron {

using Integer = mpz_class;
using Rational = mpq_class;

namespace nt {

/// Miller-Rabin rounds; the composite-passes probability is at most 4^-40 = 2^-80.
inline constexpr int kPrimalityRounds = 40;

struct FactorBudget {
  unsigned long trial_bound = 1'000'000;
  unsigned long rho_iterations = 10'000'000;
};

struct PrimePower {
  Integer prime;
  unsigned exponent = 0;

  friend bool operator==(const PrimePower& a, const PrimePower& b) {
    return a.prime == b.prime && a.exponent == b.exponent;
  }
};

/// sign * prod(prime^exponent), primes strictly increasing.
struct Factorization {
  int sign = 1;
  std::vector<PrimePower> factors;

  Integer value() const {
    Integer v = sign;
    for (const auto& f : factors) {
      Integer pw;
      mpz_pow_ui(pw.get_mpz_t(), f.prime.get_mpz_t(), f.exponent);
      v *= pw;
    }
    return v;
  }

  /// "2^28*3^2*5"; "1" or "-1" for units.
  std::string to_string() const {
    std::string out = sign < 0 ? "-" : "";
    if (factors.empty()) return out + "1";
    for (std::size_t i = 0; i < factors.size(); ++i) {
      if (i) out += "*";
      out += factors[i].prime.get_str();
      if (factors[i].exponent > 1) out += "^" + std::to_string(factors[i].exponent);
    }
    return out;
  }
};

inline std::vector<unsigned long> primes_up_to(unsigned long limit) {
  std::vector<unsigned long> primes;
  if (limit < 2) return primes;
  std::vector<bool> composite(limit + 1, false);
  for (unsigned long i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    primes.push_back(i);
    for (unsigned long j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return primes;
}

namespace detail {

inline const std::vector<unsigned long>& default_prime_table() {
  static const std::vector<unsigned long> table = primes_up_to(1'000'000);
  return table;
}

inline Integer abs_of(const Integer& n) {
  Integer r;
  mpz_abs(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

// Brent's variant of Pollard rho. Returns a nontrivial factor or nothing when
// the iteration budget runs out; `budget` is decremented per step.
inline std::optional<Integer> pollard_brent(const Integer& n, unsigned long& budget) {
  if (mpz_even_p(n.get_mpz_t())) return Integer(2);
  constexpr unsigned long kBatch = 128;
  for (unsigned long c = 1; budget > 0; ++c) {
    Integer y = 2, x, ys, q = 1, g = 1, diff;
    auto step = [&](Integer& v) {
      v = v * v + c;
      mpz_mod(v.get_mpz_t(), v.get_mpz_t(), n.get_mpz_t());
    };
    unsigned long r = 1;
    while (g == 1 && budget > 0) {
      x = y;
      for (unsigned long i = 0; i < r; ++i) step(y);
      unsigned long k = 0;
      while (k < r && g == 1 && budget > 0) {
        ys = y;
        const unsigned long lim = std::min(kBatch, r - k);
        for (unsigned long i = 0; i < lim; ++i) {
          step(y);
          diff = x - y;
          mpz_abs(diff.get_mpz_t(), diff.get_mpz_t());
          q = q * diff;
          mpz_mod(q.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        }
        budget = budget > lim ? budget - lim : 0;
        mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        k += lim;
      }
      r *= 2;
    }
    if (g == n || g == 0) {
      // Batched product collapsed; replay one step at a time.
      g = 1;
      for (unsigned long guard = 0; g == 1 && guard < 4 * kBatch; ++guard) {
        step(ys);
        diff = x - ys;
        mpz_gcd(g.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
      }
    }
    if (g != 1 && g != n && g != 0) return g;
  }
  return std::nullopt;
}

}  // namespace detail

inline bool is_probable_prime(const Integer& n) {
  if (n < 2) return false;
  return mpz_probab_prime_p(n.get_mpz_t(), kPrimalityRounds) > 0;
}

/// v_p(n) for n != 0; the cofactor is written back through `rest` when given.
inline unsigned valuation(const Integer& n, const Integer& p, Integer* rest = nullptr) {
  Integer r;
  const auto v = mpz_remove(r.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t());
  if (rest) *rest = r;
  return static_cast<unsigned>(v);
}

/// Trial division to `budget.trial_bound`, then Pollard rho with at most
/// `budget.rho_iterations` steps in total. Never returns a partial result.
inline Factorization factorize(const Integer& n, const FactorBudget& budget = {}) {
  if (n == 0) throw InvalidInput("factorize: n must be nonzero");
  Factorization out;
  out.sign = n < 0 ? -1 : 1;
  Integer m = detail::abs_of(n);

  std::vector<std::pair<Integer, unsigned>> found;
  std::vector<unsigned long> extra;
  const std::vector<unsigned long>* table = &detail::default_prime_table();
  if (budget.trial_bound > table->back()) {
    extra = primes_up_to(budget.trial_bound);
    table = &extra;
  }
  bool trial_exhausted_sqrt = false;
  for (const unsigned long p : *table) {
    if (p > budget.trial_bound) break;
    if (m == 1) break;
    if (Integer(p) * p > m) {
      trial_exhausted_sqrt = true;
      break;
    }
    if (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
      unsigned e = 0;
      while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
        mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), p);
        ++e;
      }
      found.emplace_back(Integer(p), e);
    }
  }

  if (m > 1) {
    if (trial_exhausted_sqrt || is_probable_prime(m)) {
      found.emplace_back(m, 1);
    } else {
      unsigned long rho_budget = budget.rho_iterations;
      std::vector<Integer> stack{m};
      while (!stack.empty()) {
        Integer c = stack.back();
        stack.pop_back();
        if (c == 1) continue;
        if (is_probable_prime(c)) {
          found.emplace_back(c, 1);
          continue;
        }
        if (mpz_perfect_square_p(c.get_mpz_t())) {
          Integer s;
          mpz_sqrt(s.get_mpz_t(), c.get_mpz_t());
          stack.push_back(s);
          stack.push_back(s);
          continue;
        }
        auto f = detail::pollard_brent(c, rho_budget);
        if (!f) throw FactorizationIncomplete(c.get_str());
        Integer other = c / *f;
        stack.push_back(*f);
        stack.push_back(other);
      }
    }
  }

  std::sort(found.begin(), found.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [p, e] : found) {
    if (!out.factors.empty() && out.factors.back().prime == p) {
      out.factors.back().exponent += e;
    } else {
      out.factors.push_back({p, e});
    }
  }
  return out;
}

/// Positive divisors, ascending.
inline std::vector<Integer> divisors(const Factorization& f) {
  std::vector<Integer> divs{1};
  for (const auto& [p, e] : f.factors) {
    const std::size_t base = divs.size();
    Integer pw = 1;
    for (unsigned i = 1; i <= e; ++i) {
      pw *= p;
      for (std::size_t j = 0; j < base; ++j) divs.push_back(divs[j] * pw);
    }
  }
  std::sort(divs.begin(), divs.end());
  return divs;
}

/// d squarefree with n = d*m^2, sign(d) = sign(n).
inline Integer squarefree_part(const Integer& n, const FactorBudget& budget = {}) {
  if (n == 0) throw InvalidInput("squarefree_part: n must be nonzero");
  const auto f = factorize(n, budget);
  Integer d = f.sign;
  for (const auto& [p, e] : f.factors) {
    if (e % 2) d *= p;
  }
  return d;
}

/// Square-class representative of a nonzero rational: sf(num * den).
inline Integer squarefree_part(const Rational& q, const FactorBudget& budget = {}) {
  return squarefree_part(Integer(q.get_num() * q.get_den()), budget);
}

inline int jacobi_symbol(std::uint64_t a, std::uint64_t n) {
  if (n == 0 || n % 2 == 0) throw InvalidInput("jacobi_symbol: modulus must be odd and positive");
  a %= n;
  int t = 1;
  while (a != 0) {
    while (a % 2 == 0) {
      a /= 2;
      const auto r = n % 8;
      if (r == 3 || r == 5) t = -t;
    }
    std::swap(a, n);
    if (a % 4 == 3 && n % 4 == 3) t = -t;
    a %= n;
  }
  return n == 1 ? t : 0;
}

/// Binary reciprocity on arbitrary-precision arguments.
inline int jacobi_symbol(const Integer& a_in, const Integer& n_in) {
  if (n_in <= 0 || mpz_even_p(n_in.get_mpz_t()))
    throw InvalidInput("jacobi_symbol: modulus must be odd and positive");
  if (n_in.fits_ulong_p()) {
    Integer r;
    mpz_fdiv_r(r.get_mpz_t(), a_in.get_mpz_t(), n_in.get_mpz_t());
    return jacobi_symbol(static_cast<std::uint64_t>(r.get_ui()),
                         static_cast<std::uint64_t>(n_in.get_ui()));
  }
  Integer a, n = n_in;
  mpz_fdiv_r(a.get_mpz_t(), a_in.get_mpz_t(), n.get_mpz_t());
  int t = 1;
  while (a != 0) {
    const auto tz = mpz_scan1(a.get_mpz_t(), 0);
    mpz_fdiv_q_2exp(a.get_mpz_t(), a.get_mpz_t(), tz);
    const auto r8 = mpz_fdiv_ui(n.get_mpz_t(), 8);
    if ((tz % 2) && (r8 == 3 || r8 == 5)) t = -t;
    std::swap(a, n);
    if (mpz_fdiv_ui(a.get_mpz_t(), 4) == 3 && mpz_fdiv_ui(n.get_mpz_t(), 4) == 3) t = -t;
    mpz_fdiv_r(a.get_mpz_t(), a.get_mpz_t(), n.get_mpz_t());
  }
  return n == 1 ? t : 0;
}

/// Tonelli-Shanks. Returns r in [0, p) with r^2 = a mod p, or nothing.
inline std::optional<Integer> sqrt_mod_p(const Integer& a_in, const Integer& p) {
  Integer a;
  mpz_fdiv_r(a.get_mpz_t(), a_in.get_mpz_t(), p.get_mpz_t());
  if (a == 0) return Integer(0);
  if (p == 2) return a;
  if (jacobi_symbol(a, p) != 1) return std::nullopt;

  Integer q = p - 1;
  unsigned long s = mpz_scan1(q.get_mpz_t(), 0);
  mpz_fdiv_q_2exp(q.get_mpz_t(), q.get_mpz_t(), s);

  Integer z = 2;
  while (jacobi_symbol(z, p) != -1) ++z;

  Integer c, r, t, b, tmp;
  mpz_powm(c.get_mpz_t(), z.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
  tmp = (q + 1) / 2;
  mpz_powm(r.get_mpz_t(), a.get_mpz_t(), tmp.get_mpz_t(), p.get_mpz_t());
  mpz_powm(t.get_mpz_t(), a.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
  unsigned long m = s;
  while (t != 1) {
    unsigned long i = 0;
    tmp = t;
    while (tmp != 1) {
      tmp = tmp * tmp % p;
      if (++i == m) throw InvalidInput("sqrt_mod_p: " + p.get_str() + " is not prime");
    }
    b = c;
    for (unsigned long j = 0; j + i + 1 < m; ++j) b = b * b % p;
    m = i;
    c = b * b % p;
    t = t * c % p;
    r = r * b % p;
  }
  if ((r * r - a) % p != 0) throw InvalidInput("sqrt_mod_p: " + p.get_str() + " is not prime");
  return r;
}

inline bool is_square(const Integer& n) {
  return n >= 0 && mpz_perfect_square_p(n.get_mpz_t()) != 0;
}

inline Integer isqrt(const Integer& n) {
  Integer r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

/// Nonnegative rational square root when q is a square in Q.
inline std::optional<Rational> is_rational_square(const Rational& q) {
  if (q < 0) return std::nullopt;
  if (!is_square(q.get_num()) || !is_square(q.get_den())) return std::nullopt;
  Rational r(isqrt(q.get_num()), isqrt(q.get_den()));
  r.canonicalize();
  return r;
}

/// Decimal form used throughout for printing and serialization: "p" or "p/q".
inline std::string to_string(const Rational& q) { return q.get_str(); }

/// Parses "p", "-p" or "p/q"; throws InvalidInput on garbage or a zero denominator.
inline Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  auto parse_int = [&](const std::string& s) {
    if (s.empty()) throw InvalidInput("not a rational number: '" + text + "'");
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) throw InvalidInput("not a rational number: '" + text + "'");
    for (; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') throw InvalidInput("not a rational number: '" + text + "'");
    return Integer(s[0] == '+' ? s.substr(1) : s);
  };
  if (slash == std::string::npos) return Rational(parse_int(text));
  const Integer num = parse_int(text.substr(0, slash));
  const Integer den = parse_int(text.substr(slash + 1));
  if (den == 0) throw InvalidInput("zero denominator in '" + text + "'");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

}  // namespace nt
}  // namespace heron
