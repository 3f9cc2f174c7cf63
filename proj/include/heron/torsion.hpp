#pragma once

// Exact torsion subgroups of y^2 = x^3 + a2 x^2 + a4 x + a6 over Q.
//
// The gcd of #E(F_p) over good odd primes bounds the torsion order. The
// 2-primary part is found by repeatedly halving 2-power torsion points
// (rational roots of the duplication quartic), the odd part from rational
// roots of the division polynomials psi_3, psi_5, psi_7, psi_9. Rational
// roots come from p-adic lifting, so no coefficient ever has to be factored.

#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "heron/curve.hpp"
#include "heron/polynomial.hpp"

namespace heron::torsion {

/// Points (x, 0) with x a rational root of the cubic, sorted by x.
inline std::vector<RationalPoint> two_torsion(const CubicModel& m) {
  const auto cubic = RatPolynomial::from_descending({Rational(1), m.a2(), m.a4(), m.a6()});
  std::vector<RationalPoint> out;
  for (const auto& x : rational_roots_lifted(cubic)) out.push_back(RationalPoint::affine(x, Rational(0)));
  return out;
}

inline std::vector<RationalPoint> two_torsion(const IntegralModel& m) { return two_torsion(m.cubic()); }

/// gcd of #E(F_p) over the first `prime_budget` good primes p > 2. The true
/// torsion order divides it.
inline std::uint64_t torsion_order_bound(const IntegralModel& m, unsigned prime_budget) {
  constexpr std::uint64_t kPrimeCap = 1'000'000;
  if (prime_budget == 0) throw InvalidInput("torsion_order_bound: prime budget must be positive");
  const Integer disc = m.discriminant();
  std::uint64_t g = 0;
  unsigned used = 0;
  for (const auto p : nt::primes_up_to(kPrimeCap)) {
    if (p == 2) continue;
    auto s = ec::try_reduce_mod_p(m, p, disc);
    if (!s) continue;
    g = std::gcd(g, s->order);
    if (++used == prime_budget) return g;
  }
  throw InsufficientGoodPrimes("fewer than " + std::to_string(prime_budget) +
                               " good primes below " + std::to_string(kPrimeCap));
}

/// Starts from `initial` primes and keeps adding one until the bound has not
/// changed for `stable_run` consecutive primes.
inline std::uint64_t stable_torsion_bound(const IntegralModel& m, unsigned initial = 10,
                                          unsigned stable_run = 3) {
  unsigned budget = initial;
  std::uint64_t bound = torsion_order_bound(m, budget);
  unsigned unchanged = 0;
  while (unchanged < stable_run) {
    const std::uint64_t next = torsion_order_bound(m, ++budget);
    unchanged = next == bound ? unchanged + 1 : 0;
    bound = next;
  }
  return bound;
}

/// Least n in 1..12 with nP = O, or nothing when P has infinite order
/// (no rational torsion point has order above 12).
inline std::optional<unsigned> point_order(const CubicModel& m, const RationalPoint& p) {
  if (!m.contains(p)) throw PointNotOnCurve("point " + to_string(p) + " is not on the curve");
  RationalPoint acc = p;
  for (unsigned n = 1; n <= 12; ++n) {
    if (acc.infinity) return n;
    acc = ec::detail::add_unchecked(m, acc, p);
  }
  return std::nullopt;
}

inline std::optional<unsigned> point_order(const IntegralModel& m, const RationalPoint& p) {
  return point_order(m.cubic(), p);
}

namespace detail {

struct BInvariants {
  Rational b2, b4, b6, b8;
};

inline BInvariants b_invariants(const CubicModel& m) {
  return {4 * m.a2(), 2 * m.a4(), 4 * m.a6(), 4 * m.a2() * m.a6() - m.a4() * m.a4()};
}

/// Polynomials g_n with psi_n = g_n for odd n and psi_n = psi_2 g_n for even n.
class DivisionPolynomials {
 public:
  explicit DivisionPolynomials(const CubicModel& m) {
    const auto [b2, b4, b6, b8] = b_invariants(m);
    four_f_ = RatPolynomial::from_descending({Rational(4), 4 * m.a2(), 4 * m.a4(), 4 * m.a6()});
    cache_[0] = {};
    cache_[1] = RatPolynomial::from_ascending({Rational(1)});
    cache_[2] = cache_[1];
    cache_[3] = RatPolynomial::from_descending({Rational(3), b2, 3 * b4, 3 * b6, b8});
    cache_[4] = RatPolynomial::from_descending(
        {Rational(2), b2, 5 * b4, 10 * b6, 10 * b8, b2 * b8 - b4 * b6, b4 * b8 - b6 * b6});
  }

  const RatPolynomial& operator()(int n) {
    if (auto it = cache_.find(n); it != cache_.end()) return it->second;
    const int m = n / 2;
    RatPolynomial g;
    if (n % 2) {
      const auto f2 = four_f_ * four_f_;
      const auto a = (*this)(m + 2) * cube((*this)(m));
      const auto b = (*this)(m - 1) * cube((*this)(m + 1));
      g = m % 2 == 0 ? f2 * a - b : a - f2 * b;
    } else {
      const auto& gm1 = (*this)(m - 1);
      const auto& gp1 = (*this)(m + 1);
      g = (*this)(m) * ((*this)(m + 2) * gm1 * gm1 - (*this)(m - 2) * gp1 * gp1);
    }
    return cache_[n] = std::move(g);
  }

 private:
  static RatPolynomial cube(const RatPolynomial& p) { return p * p * p; }

  RatPolynomial four_f_;
  std::map<int, RatPolynomial> cache_;
};

inline void add_unique(std::vector<RationalPoint>& v, const RationalPoint& p) {
  for (const auto& q : v)
    if (q == p) return;
  v.push_back(p);
}

/// Affine points with the given x, if the x is on the curve over Q.
inline std::vector<RationalPoint> points_with_x(const CubicModel& m, const Rational& x) {
  std::vector<RationalPoint> out;
  auto y = nt::is_rational_square(m.rhs(x));
  if (!y) return out;
  out.push_back(RationalPoint::affine(x, *y));
  if (*y != 0) out.push_back(RationalPoint::affine(x, -*y));
  return out;
}

}  // namespace detail

/// All Q with 2Q = P, from the rational roots of x(2Q) = x(P):
///   x^4 - b4 x^2 - 2 b6 x - b8 - x0 (4x^3 + b2 x^2 + 2 b4 x + b6) = 0.
inline std::vector<RationalPoint> halve(const CubicModel& m, const RationalPoint& p) {
  std::vector<RationalPoint> out;
  if (p.infinity) {
    // Halves of O are the 2-torsion points and O itself.
    out.push_back(p);
    for (const auto& t : two_torsion(m)) out.push_back(t);
    return out;
  }
  const auto [b2, b4, b6, b8] = detail::b_invariants(m);
  const Rational& x0 = p.x;
  const auto quartic = RatPolynomial::from_descending(
      {Rational(1), -4 * x0, -b4 - x0 * b2, -2 * b6 - 2 * b4 * x0, -b8 - x0 * b6});
  for (const auto& x : rational_roots_lifted(quartic)) {
    for (const auto& q : detail::points_with_x(m, x)) {
      if (ec::detail::add_unchecked(m, q, q) == p) detail::add_unique(out, q);
    }
  }
  return out;
}

struct TorsionGroup {
  unsigned n1 = 1;  // Z/n1 x Z/n2 with n1 | n2; n1 is 1 or 2
  unsigned n2 = 1;
  std::vector<RationalPoint> generators;
  std::vector<RationalPoint> points;  // every element, O first

  unsigned order() const { return n1 * n2; }

  std::string structure() const {
    if (order() == 1) return "trivial";
    const std::string cyc = "Z/" + std::to_string(n2) + "Z";
    return n1 == 2 ? "Z/2Z x " + cyc : cyc;
  }
};

/// One of the fifteen groups allowed over Q.
inline bool is_mazur_group(unsigned n1, unsigned n2) {
  if (n1 == 1) return (n2 >= 1 && n2 <= 10) || n2 == 12;
  if (n1 == 2) return n2 == 2 || n2 == 4 || n2 == 6 || n2 == 8;
  return false;
}

inline TorsionGroup torsion_subgroup(const IntegralModel& im) {
  const CubicModel m = im.cubic();
  const std::uint64_t bound = stable_torsion_bound(im);

  // 2-primary part.
  std::vector<RationalPoint> two_part{RationalPoint::at_infinity()};
  std::vector<RationalPoint> frontier = two_torsion(m);
  for (const auto& t : frontier) two_part.push_back(t);
  const std::size_t two_rank_size = two_part.size();  // |E[2](Q)|
  std::uint64_t level_order = 2;
  while (!frontier.empty() && bound % (2 * level_order) == 0) {
    std::vector<RationalPoint> next;
    for (const auto& p : frontier)
      for (const auto& q : halve(m, p)) detail::add_unique(next, q);
    for (const auto& q : next) two_part.push_back(q);
    frontier = std::move(next);
    level_order *= 2;
  }

  // Odd part, one division polynomial per odd prime power allowed by the bound.
  std::vector<RationalPoint> odd_part{RationalPoint::at_infinity()};
  detail::DivisionPolynomials psi(m);
  for (const int ell : {3, 5, 7}) {
    if (bound % ell) continue;
    const int n = (ell == 3 && bound % 9 == 0) ? 9 : ell;
    for (const auto& x : rational_roots_lifted(psi(n))) {
      for (const auto& q : detail::points_with_x(m, x)) {
        if (ec::scalar_multiply(m, Integer(n), q).infinity) detail::add_unique(odd_part, q);
      }
    }
  }

  TorsionGroup g;
  for (const auto& a : two_part)
    for (const auto& b : odd_part) detail::add_unique(g.points, ec::detail::add_unchecked(m, a, b));

  const auto total = static_cast<unsigned>(g.points.size());
  if (bound % total != 0)
    throw InternalError("torsion order " + std::to_string(total) + " does not divide the reduction bound " +
                        std::to_string(bound));
  g.n1 = two_rank_size == 4 ? 2 : 1;
  g.n2 = total / g.n1;
  if (!is_mazur_group(g.n1, g.n2))
    throw InternalError("torsion structure " + g.structure() + " is not on Mazur's list");

  for (const auto& p : g.points) {
    if (point_order(m, p) == g.n2) {
      g.generators.push_back(p);
      break;
    }
  }
  if (g.n2 > 1 && g.generators.empty()) throw InternalError("no torsion point of maximal order found");
  if (g.n1 == 2) {
    // A 2-torsion point outside the cyclic subgroup of the first generator.
    std::vector<RationalPoint> cyclic{RationalPoint::at_infinity()};
    RationalPoint acc = g.generators.front();
    while (!acc.infinity) {
      cyclic.push_back(acc);
      acc = ec::detail::add_unchecked(m, acc, g.generators.front());
    }
    for (std::size_t i = 1; i < two_rank_size; ++i) {
      const auto& t = two_part[i];
      if (std::find(cyclic.begin(), cyclic.end(), t) == cyclic.end()) {
        g.generators.push_back(t);
        break;
      }
    }
  }
  return g;
}

}  // namespace heron::torsion
