#pragma once

// Curves y^2 = x^3 + a2 x^2 + a4 x + a6 over Q: exact models, the chord and
// tangent law, integral rescaling and point counts over prime fields.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "heron/numtheory.hpp"

namespace heron {

/// 16 times the discriminant of x^3 + a2 x^2 + a4 x + a6.
template <class T>
T cubic_discriminant(const T& a2, const T& a4, const T& a6) {
  const T d = a2 * a2 * a4 * a4 - 4 * a4 * a4 * a4 - 4 * a2 * a2 * a2 * a6 + 18 * a2 * a4 * a6 -
              27 * a6 * a6;
  return 16 * d;
}

/// Affine point or the point at infinity over the field of `Scalar`.
template <class Scalar>
struct Point {
  bool infinity = true;
  Scalar x{}, y{};

  static Point at_infinity() { return {}; }
  static Point affine(Scalar x, Scalar y) { return {false, std::move(x), std::move(y)}; }

  Point negated() const { return infinity ? *this : affine(x, -y); }

  friend bool operator==(const Point& a, const Point& b) {
    if (a.infinity || b.infinity) return a.infinity == b.infinity;
    return a.x == b.x && a.y == b.y;
  }
};

using RationalPoint = Point<Rational>;

inline std::string to_string(const RationalPoint& p) {
  if (p.infinity) return "infinity";
  return "(" + p.x.get_str() + ", " + p.y.get_str() + ")";
}

/// y^2 = x^3 + a2 x^2 + a4 x + a6 over Q. Always nonsingular.
class CubicModel {
 public:
  static CubicModel make(Rational a2, Rational a4, Rational a6) {
    if (cubic_discriminant(a2, a4, a6) == 0) throw SingularModel();
    return CubicModel(std::move(a2), std::move(a4), std::move(a6));
  }

  const Rational& a2() const { return a2_; }
  const Rational& a4() const { return a4_; }
  const Rational& a6() const { return a6_; }

  Rational discriminant() const { return cubic_discriminant(a2_, a4_, a6_); }

  Rational rhs(const Rational& x) const { return ((x + a2_) * x + a4_) * x + a6_; }

  bool contains(const RationalPoint& p) const {
    return p.infinity || p.y * p.y == rhs(p.x);
  }

  bool is_integral() const {
    return a2_.get_den() == 1 && a4_.get_den() == 1 && a6_.get_den() == 1;
  }

  /// (x, y) -> (u^2 x, u^3 y): the model y^2 = x^3 + u^2 a2 x^2 + u^4 a4 x + u^6 a6.
  CubicModel rescaled(const Rational& u) const {
    const Rational u2 = u * u;
    return CubicModel(a2_ * u2, a4_ * u2 * u2, a6_ * u2 * u2 * u2);
  }

  friend bool operator==(const CubicModel& a, const CubicModel& b) {
    return a.a2_ == b.a2_ && a.a4_ == b.a4_ && a.a6_ == b.a6_;
  }

 private:
  CubicModel(Rational a2, Rational a4, Rational a6)
      : a2_(std::move(a2)), a4_(std::move(a4)), a6_(std::move(a6)) {}

  Rational a2_, a4_, a6_;
};

inline Rational discriminant(const CubicModel& m) { return m.discriminant(); }

/// Integer coefficients obtained from a source model by x -> u^2 x, y -> u^3 y.
struct IntegralModel {
  Integer a2, a4, a6;
  Integer scale = 1;

  Integer discriminant() const { return cubic_discriminant(a2, a4, a6); }

  CubicModel cubic() const { return CubicModel::make(Rational(a2), Rational(a4), Rational(a6)); }

  /// The model this one was produced from.
  CubicModel source() const { return cubic().rescaled(Rational(1, 1) / Rational(scale)); }

  RationalPoint from_source(const RationalPoint& p) const {
    if (p.infinity) return p;
    const Rational u(scale);
    return RationalPoint::affine(p.x * u * u, p.y * u * u * u);
  }

  RationalPoint to_source(const RationalPoint& p) const {
    if (p.infinity) return p;
    const Rational u(scale);
    return RationalPoint::affine(p.x / (u * u), p.y / (u * u * u));
  }

  friend bool operator==(const IntegralModel&, const IntegralModel&) = default;
};

namespace ec {

namespace detail {

inline RationalPoint add_unchecked(const CubicModel& m, const RationalPoint& p, const RationalPoint& q) {
  if (p.infinity) return q;
  if (q.infinity) return p;
  Rational lambda;
  if (p.x == q.x) {
    if (p.y != q.y || p.y == 0) return RationalPoint::at_infinity();
    lambda = (3 * p.x * p.x + 2 * m.a2() * p.x + m.a4()) / (2 * p.y);
  } else {
    lambda = (q.y - p.y) / (q.x - p.x);
  }
  Rational x3 = lambda * lambda - m.a2() - p.x - q.x;
  Rational y3 = lambda * (p.x - x3) - p.y;
  return RationalPoint::affine(std::move(x3), std::move(y3));
}

inline void require_on_curve(const CubicModel& m, const RationalPoint& p) {
  if (!m.contains(p)) throw PointNotOnCurve("point " + to_string(p) + " is not on the curve");
}

}  // namespace detail

inline RationalPoint add_points(const CubicModel& m, const RationalPoint& p, const RationalPoint& q) {
  detail::require_on_curve(m, p);
  detail::require_on_curve(m, q);
  return detail::add_unchecked(m, p, q);
}

/// Double-and-add; negative multiples go through -P.
inline RationalPoint scalar_multiply(const CubicModel& m, const Integer& n, const RationalPoint& p) {
  detail::require_on_curve(m, p);
  RationalPoint base = n < 0 ? p.negated() : p;
  Integer k = abs(n);
  RationalPoint acc = RationalPoint::at_infinity();
  while (k > 0) {
    if (mpz_odd_p(k.get_mpz_t())) acc = detail::add_unchecked(m, acc, base);
    base = detail::add_unchecked(m, base, base);
    k >>= 1;
  }
  return acc;
}

/// Smallest u, among positive multiples of `scale_multiple`, for which
/// u^2 a2, u^4 a4 and u^6 a6 are all integers.
inline IntegralModel integral_model(const CubicModel& m, unsigned long scale_multiple = 1,
                                    const nt::FactorBudget& budget = {}) {
  if (scale_multiple == 0) throw InvalidInput("integral_model: scale multiple must be positive");
  // Per prime p, e_p = max(ceil(v(d2)/2), ceil(v(d4)/4), ceil(v(d6)/6)).
  const CubicModel base = m.rescaled(Rational(static_cast<long>(scale_multiple)));
  const Integer dens[3] = {base.a2().get_den(), base.a4().get_den(), base.a6().get_den()};
  Integer l = 1;
  for (const auto& d : dens) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), d.get_mpz_t());
  Integer u = 1;
  if (l > 1) {
    for (const auto& [p, unused] : nt::factorize(l, budget).factors) {
      unsigned e = 0;
      const unsigned weights[3] = {2, 4, 6};
      for (int i = 0; i < 3; ++i) {
        const unsigned v = nt::valuation(dens[i], p);
        e = std::max(e, (v + weights[i] - 1) / weights[i]);
      }
      Integer pw;
      mpz_pow_ui(pw.get_mpz_t(), p.get_mpz_t(), e);
      u *= pw;
    }
  }
  const CubicModel scaled = base.rescaled(Rational(u));
  IntegralModel out{scaled.a2().get_num(), scaled.a4().get_num(), scaled.a6().get_num(),
                    u * static_cast<unsigned long>(scale_multiple)};
  return out;
}

/// Reduction of an integral model at a good prime, with its point count.
struct FpCurveSummary {
  std::uint64_t p = 0;
  std::uint64_t a2 = 0, a4 = 0, a6 = 0;
  std::uint64_t order = 0;
  std::int64_t trace = 0;
};

/// 1 + sum over x of (1 + chi(f(x))), evaluated by forward differences so the
/// inner loop is additions mod p only.
inline std::uint64_t count_points_mod_p(std::uint64_t a2, std::uint64_t a4, std::uint64_t a6,
                                        std::uint64_t p) {
  if (p == 2) {
    std::uint64_t n = 1;
    for (std::uint64_t x = 0; x < 2; ++x) {
      const std::uint64_t f = (x + a2 * x + a4 * x + a6) % 2;  // x^3 = x^2 = x mod 2
      for (std::uint64_t y = 0; y < 2; ++y)
        if ((y * y) % 2 == f) ++n;
    }
    return n;
  }
  // chi table: +1 squares, -1 non-squares, 0 at zero.
  std::vector<std::int8_t> chi(p, -1);
  chi[0] = 0;
  for (std::uint64_t t = 1; t <= p / 2; ++t) chi[(t * t) % p] = 1;

  a2 %= p;
  a4 %= p;
  a6 %= p;
  auto f = [&](std::uint64_t x) { return (((x + a2) % p * x + a4) % p * x + a6) % p; };
  // f(x), and its first, second and third forward differences at x = 0.
  const std::uint64_t f0 = f(0), f1 = f(1 % p), f2 = f(2 % p), f3 = f(3 % p);
  auto sub = [p](std::uint64_t a, std::uint64_t b) { return a >= b ? a - b : a + p - b; };
  std::uint64_t d1 = sub(f1, f0);
  std::uint64_t d2 = sub(sub(f2, f1), d1);
  const std::uint64_t d3 = sub(sub(sub(f3, f2), sub(f2, f1)), d2);
  std::uint64_t v = f0;
  std::int64_t sum = 0;
  for (std::uint64_t x = 0; x < p; ++x) {
    sum += chi[v];
    v += d1;
    if (v >= p) v -= p;
    d1 += d2;
    if (d1 >= p) d1 -= p;
    d2 += d3;
    if (d2 >= p) d2 -= p;
  }
  return static_cast<std::uint64_t>(static_cast<std::int64_t>(p) + 1 + sum);
}

inline bool has_good_reduction(const IntegralModel& m, std::uint64_t p) {
  return mpz_fdiv_ui(m.discriminant().get_mpz_t(), p) != 0;
}

inline std::optional<FpCurveSummary> try_reduce_mod_p(const IntegralModel& m, std::uint64_t p,
                                                      const Integer& disc) {
  if (mpz_fdiv_ui(disc.get_mpz_t(), p) == 0) return std::nullopt;
  FpCurveSummary s;
  s.p = p;
  s.a2 = mpz_fdiv_ui(m.a2.get_mpz_t(), p);
  s.a4 = mpz_fdiv_ui(m.a4.get_mpz_t(), p);
  s.a6 = mpz_fdiv_ui(m.a6.get_mpz_t(), p);
  s.order = count_points_mod_p(s.a2, s.a4, s.a6, p);
  s.trace = static_cast<std::int64_t>(p) + 1 - static_cast<std::int64_t>(s.order);
  return s;
}

/// Throws BadReduction when p divides the discriminant. `p` must be prime.
inline FpCurveSummary reduce_mod_p(const IntegralModel& m, std::uint64_t p) {
  auto s = try_reduce_mod_p(m, p, m.discriminant());
  if (!s) throw BadReduction(p);
  return *s;
}

inline std::int64_t trace_ap(const IntegralModel& m, std::uint64_t p) {
  return reduce_mod_p(m, p).trace;
}

}  // namespace ec
}  // namespace heron
