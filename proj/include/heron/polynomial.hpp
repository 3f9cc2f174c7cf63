#pragma once

// Dense univariate polynomials over Integer or Rational, and exact rational
// root finding by two independent routes: the rational root theorem over
// divisors, and Hensel lifting of simple roots modulo a small prime.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "heron/numtheory.hpp"

namespace heron {

/// Coefficients stored in ascending order; no trailing zeros.
template <class T>
class Polynomial {
 public:
  Polynomial() = default;

  static Polynomial from_ascending(std::vector<T> coeffs) {
    Polynomial p;
    p.c_ = std::move(coeffs);
    p.trim();
    return p;
  }

  static Polynomial from_descending(std::vector<T> coeffs) {
    std::reverse(coeffs.begin(), coeffs.end());
    return from_ascending(std::move(coeffs));
  }

  static Polynomial monomial(const T& c, std::size_t degree) {
    std::vector<T> v(degree + 1, T(0));
    v[degree] = c;
    return from_ascending(std::move(v));
  }

  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<T>& coefficients() const { return c_; }
  T coeff(std::size_t i) const { return i < c_.size() ? c_[i] : T(0); }
  const T& leading() const { return c_.back(); }

  template <class U>
  U operator()(const U& x) const {
    U acc(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + U(*it);
    return acc;
  }

  Polynomial derivative() const {
    std::vector<T> d;
    for (std::size_t i = 1; i < c_.size(); ++i) d.push_back(c_[i] * T(static_cast<long>(i)));
    return from_ascending(std::move(d));
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<T> r(std::max(a.c_.size(), b.c_.size()), T(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) r[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) r[i] += b.c_[i];
    return from_ascending(std::move(r));
  }

  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    std::vector<T> r(std::max(a.c_.size(), b.c_.size()), T(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) r[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) r[i] -= b.c_[i];
    return from_ascending(std::move(r));
  }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<T> r(a.c_.size() + b.c_.size() - 1, T(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    return from_ascending(std::move(r));
  }

  friend Polynomial operator*(const T& s, const Polynomial& a) {
    std::vector<T> r = a.c_;
    for (auto& x : r) x *= s;
    return from_ascending(std::move(r));
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }

  std::vector<T> c_;
};

using IntPolynomial = Polynomial<Integer>;
using RatPolynomial = Polynomial<Rational>;

namespace poly {

/// Long division over Q. Throws on a zero divisor.
inline std::pair<RatPolynomial, RatPolynomial> divmod(const RatPolynomial& a, const RatPolynomial& b) {
  if (b.is_zero()) throw InvalidInput("polynomial division by zero");
  std::vector<Rational> rem = a.coefficients();
  const int db = b.degree();
  if (a.degree() < db) return {RatPolynomial{}, a};
  std::vector<Rational> quot(a.degree() - db + 1, Rational(0));
  for (int i = a.degree(); i >= db; --i) {
    if (rem[i] == 0) continue;
    const Rational f = rem[i] / b.leading();
    quot[i - db] = f;
    for (int j = 0; j <= db; ++j) rem[i - db + j] -= f * b.coeff(j);
  }
  return {RatPolynomial::from_ascending(std::move(quot)), RatPolynomial::from_ascending(std::move(rem))};
}

/// Monic gcd over Q (zero when both inputs are zero).
inline RatPolynomial gcd(RatPolynomial a, RatPolynomial b) {
  while (!b.is_zero()) {
    auto r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  if (a.is_zero()) return a;
  return (Rational(1) / a.leading()) * a;
}

inline RatPolynomial to_rational(const IntPolynomial& p) {
  std::vector<Rational> c;
  for (const auto& x : p.coefficients()) c.emplace_back(x);
  return RatPolynomial::from_ascending(std::move(c));
}

/// Clears denominators and removes the content; the leading coefficient is made positive.
inline IntPolynomial primitive_part(const RatPolynomial& p) {
  if (p.is_zero()) return {};
  Integer l = 1;
  for (const auto& x : p.coefficients()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den().get_mpz_t());
  std::vector<Integer> c;
  Integer g = 0;
  for (const auto& x : p.coefficients()) {
    Integer v = x.get_num() * (l / x.get_den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
    c.push_back(v);
  }
  const bool negate = c.back() < 0;
  for (auto& v : c) {
    v /= g;
    if (negate) v = -v;
  }
  return IntPolynomial::from_ascending(std::move(c));
}

inline RatPolynomial squarefree(const RatPolynomial& p) {
  const auto g = gcd(p, p.derivative());
  if (g.degree() <= 0) return p;
  return divmod(p, g).first;
}

}  // namespace poly

namespace detail {

inline void sort_unique(std::vector<Rational>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

// sum c_i p^i q^(n-i); zero iff p/q is a root.
inline Integer homogeneous_value(const IntPolynomial& f, const Integer& p, const Integer& q) {
  const int n = f.degree();
  Integer acc = 0, qpow = 1;
  std::vector<Integer> qpows(n + 1);
  for (int i = 0; i <= n; ++i) {
    qpows[i] = qpow;
    qpow *= q;
  }
  for (int i = n; i >= 0; --i) acc = acc * p + f.coeff(i) * qpows[n - i];
  return acc;
}

}  // namespace detail

/// Rational roots by the rational root theorem: candidates are +-p/q with p
/// dividing the constant coefficient and q the leading one.
inline std::vector<Rational> rational_roots(const RatPolynomial& poly,
                                            const nt::FactorBudget& budget = {}) {
  if (poly.is_zero()) throw InvalidInput("rational_roots: zero polynomial");
  IntPolynomial f = poly::primitive_part(poly);
  std::vector<Rational> roots;

  std::size_t shift = 0;
  while (f.coeff(shift) == 0) ++shift;
  if (shift > 0) {
    roots.emplace_back(0);
    std::vector<Integer> c(f.coefficients().begin() + shift, f.coefficients().end());
    f = IntPolynomial::from_ascending(std::move(c));
  }
  if (f.degree() <= 0) return roots;

  const auto ps = nt::divisors(nt::factorize(f.coeff(0), budget));
  const auto qs = nt::divisors(nt::factorize(f.leading(), budget));

  // Cauchy bound on |root| in rational form: 1 + max |c_i| / |c_n|.
  Integer maxc = 0;
  for (int i = 0; i < f.degree(); ++i) maxc = std::max(maxc, Integer(abs(f.coeff(i))));
  const Rational cauchy = Rational(1) + Rational(maxc, abs(f.leading()));

  for (const auto& q : qs) {
    for (const auto& p : ps) {
      Integer g;
      mpz_gcd(g.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
      if (g != 1) continue;
      if (Rational(p, q) > cauchy) continue;
      for (const int s : {1, -1}) {
        const Integer sp = s * p;
        if (detail::homogeneous_value(f, sp, q) == 0) {
          Rational r(sp, q);
          r.canonicalize();
          roots.push_back(r);
        }
      }
    }
  }
  detail::sort_unique(roots);
  return roots;
}

/// Rational roots by p-adic lifting; needs no factorization, so it handles
/// polynomials whose coefficients are far too large to factor. Every integer
/// root of the monic transform reduces to a simple root modulo a suitable
/// small prime and is recovered from its unique Hensel lift.
inline std::vector<Rational> rational_roots_lifted(const RatPolynomial& poly) {
  if (poly.is_zero()) throw InvalidInput("rational_roots_lifted: zero polynomial");
  std::vector<Rational> roots;
  IntPolynomial f = poly::primitive_part(poly::squarefree(poly));
  const int n = f.degree();
  if (n <= 0) return roots;

  // h(y) = lead^(n-1) f(y / lead) is monic with integer coefficients.
  const Integer lead = f.leading();
  std::vector<Integer> hc(n + 1);
  Integer pw = 1;
  for (int i = n - 1; i >= 0; --i) {
    hc[i] = f.coeff(i) * pw;
    pw *= lead;
  }
  hc[n] = 1;
  const IntPolynomial h = IntPolynomial::from_ascending(hc);
  const IntPolynomial dh = h.derivative();

  Integer bound = 0;
  for (int i = 0; i < n; ++i) bound = std::max(bound, Integer(abs(h.coeff(i))));
  bound += 1;
  const Integer need = 2 * bound + 1;

  for (const unsigned long ell : nt::primes_up_to(200'000)) {
    if (ell < 3) continue;
    std::vector<std::uint64_t> hm(n + 1), dm(n);
    for (int i = 0; i <= n; ++i) hm[i] = mpz_fdiv_ui(h.coeff(i).get_mpz_t(), ell);
    for (int i = 0; i < n; ++i) dm[i] = mpz_fdiv_ui(dh.coeff(i).get_mpz_t(), ell);
    auto eval = [&](const std::vector<std::uint64_t>& c, std::uint64_t x) {
      std::uint64_t acc = 0;
      for (auto it = c.rbegin(); it != c.rend(); ++it) acc = (acc * x + *it) % ell;
      return acc;
    };
    std::vector<std::uint64_t> residues;
    bool simple = true;
    for (std::uint64_t x = 0; x < ell && simple; ++x) {
      if (eval(hm, x) != 0) continue;
      if (eval(dm, x) == 0) simple = false;
      residues.push_back(x);
    }
    if (!simple) continue;

    for (const auto r0 : residues) {
      Integer r = static_cast<unsigned long>(r0), mod = ell;
      while (mod < need) {
        mod *= mod;
        Integer fx = h(r), dfx = dh(r), inv;
        mpz_fdiv_r(dfx.get_mpz_t(), dfx.get_mpz_t(), mod.get_mpz_t());
        if (!mpz_invert(inv.get_mpz_t(), dfx.get_mpz_t(), mod.get_mpz_t()))
          throw InternalError("rational_roots_lifted: derivative not invertible during lift");
        r = r - fx * inv;
        mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), mod.get_mpz_t());
      }
      Integer y = r;
      if (2 * y > mod) y -= mod;
      if (h(y) == 0) {
        Rational x(y, lead);
        x.canonicalize();
        roots.push_back(x);
      }
    }
    detail::sort_unique(roots);
    return roots;
  }
  throw InternalError("rational_roots_lifted: no prime with simple reduction found");
}

}  // namespace heron
