#pragma once

// The one-parameter family of Heron triangles
//   a(k) = 5k^2 - 4k + 4,  b(k) = k(k^2 - 4k + 20)/2,  c(k) = (k + 2)(k^2 - 4)/2
// and the elliptic curves y^2 = (x + ab)(x + bc)(x + ac) attached to them.

#include <array>
#include <optional>
#include <string>

#include "heron/curve.hpp"
#include "heron/polynomial.hpp"

namespace heron::family {

struct Sides {
  Rational a, b, c;
};

/// Side polynomials evaluated at any k, singular or not.
inline Sides fine_sides(const Rational& k) {
  const Rational k2 = k * k;
  Sides s;
  s.a = 5 * k2 - 4 * k + 4;
  s.b = k * (k2 - 4 * k + 20) / 2;
  s.c = (k + 2) * (k2 - 4) / 2;
  return s;
}

inline bool is_singular_parameter(const Rational& k) { return k == 0 || k == 2 || k == -2; }

inline void require_admissible(const Rational& k) {
  if (is_singular_parameter(k)) throw SingularParameter(nt::to_string(k));
}

struct HeronTriple {
  Rational k;
  Rational a, b, c;
  Rational semiperimeter;
  Rational squared_area;  // P(P-a)(P-b)(P-c)
  bool geometric = false;  // positive sides satisfying the strict triangle inequality
};

inline HeronTriple heron_sides(const Rational& k) {
  require_admissible(k);
  const auto s = fine_sides(k);
  HeronTriple t{k, s.a, s.b, s.c, {}, {}, false};
  t.semiperimeter = (t.a + t.b + t.c) / 2;
  const Rational& p = t.semiperimeter;
  t.squared_area = p * (p - t.a) * (p - t.b) * (p - t.c);
  t.geometric = t.a > 0 && t.b > 0 && t.c > 0 && t.a < t.b + t.c && t.b < t.a + t.c &&
                t.c < t.a + t.b;
  return t;
}

/// Nonnegative square root of the Heron product. NotASquare would mean the
/// parametrization is broken, so it is never swallowed.
inline Rational heron_area(const Rational& k) {
  const auto t = heron_sides(k);
  auto root = nt::is_rational_square(t.squared_area);
  if (!root) throw NotASquare("Heron product is not a rational square at k = " + nt::to_string(k));
  return *root;
}

/// y^2 = (x + ab)(x + bc)(x + ac).
inline CubicModel product_model(const Rational& k) {
  require_admissible(k);
  const auto s = fine_sides(k);
  const Rational r1 = s.a * s.b, r2 = s.b * s.c, r3 = s.a * s.c;
  return CubicModel::make(r1 + r2 + r3, r1 * r2 + r1 * r3 + r2 * r3, r1 * r2 * r3);
}

/// The product model with doubled sides, i.e. rescaled by u = 2. Integral
/// models of the family are taken in this normalization.
inline CubicModel table_model(const Rational& k) { return product_model(k).rescaled(Rational(2)); }

struct ShiftCoefficients {
  Rational A, B;
  friend bool operator==(const ShiftCoefficients&, const ShiftCoefficients&) = default;
};

/// A and B as explicit polynomials in k.
inline ShiftCoefficients closed_form_shift(const Rational& k) {
  const RatPolynomial a_poly = RatPolynomial::from_descending(
      {Rational(1, 4), -3, -16, 96, -44, -16, 32});
  const RatPolynomial b_left = RatPolynomial::from_descending({1, -12, -4, 96, -16, -192, 64});
  const RatPolynomial b_right = RatPolynomial::from_descending({15, -72, 40, -32, -16});
  return {a_poly(k), Rational(-1, 4) * b_left(k) * b_right(k)};
}

/// A = ab + bc - 2ac and B = (ab - ac)(bc - ac), read off the translated roots.
inline ShiftCoefficients structural_shift(const Rational& k) {
  const auto s = fine_sides(k);
  const Rational ab = s.a * s.b, bc = s.b * s.c, ac = s.a * s.c;
  return {ab + bc - 2 * ac, (ab - ac) * (bc - ac)};
}

/// Coefficients of f(x - t) for f = x^3 + a2 x^2 + a4 x + a6.
inline std::array<Rational, 3> translate_cubic(const CubicModel& m, const Rational& t) {
  const Rational a2 = m.a2() - 3 * t;
  const Rational a4 = 3 * t * t - 2 * m.a2() * t + m.a4();
  const Rational a6 = -t * t * t + m.a2() * t * t - m.a4() * t + m.a6();
  return {a2, a4, a6};
}

/// y^2 = x^3 + A x^2 + B x: the product model moved so that its root -ac sits at 0.
/// The translation, the root formulas and the closed forms must agree exactly.
inline CubicModel shifted_model(const Rational& k) {
  const CubicModel prod = product_model(k);
  const auto s = fine_sides(k);
  const auto translated = translate_cubic(prod, s.a * s.c);
  const auto structural = structural_shift(k);
  const auto closed = closed_form_shift(k);
  if (translated[2] != 0 || translated[0] != structural.A || translated[1] != structural.B)
    throw ClosedFormMismatch("translated product model disagrees with root formulas at k = " +
                             nt::to_string(k));
  if (!(structural == closed))
    throw ClosedFormMismatch("closed-form A, B disagree with the translated model at k = " +
                             nt::to_string(k));
  return CubicModel::make(closed.A, closed.B, Rational(0));
}

/// Discriminant as the factored polynomial
///   k^2 (k^2-4k+20)^2 (k^3-8k^2+4k-16)^2 (k^2-12k+4)^2 (k-2)^4 (k+2)^4
///   (5k^2-4k+4)^2 (3k^2-12k-4)^2 / 16.
inline Rational family_discriminant(const Rational& k) {
  const Rational k2 = k * k;
  const Rational f1 = k2 - 4 * k + 20;
  const Rational f2 = k2 * k - 8 * k2 + 4 * k - 16;
  const Rational f3 = k2 - 12 * k + 4;
  const Rational f4 = k - 2, f5 = k + 2;
  const Rational f6 = 5 * k2 - 4 * k + 4;
  const Rational f7 = 3 * k2 - 12 * k - 4;
  const Rational f4sq = f4 * f4, f5sq = f5 * f5;
  return k2 * f1 * f1 * f2 * f2 * f3 * f3 * f4sq * f4sq * f5sq * f5sq * f6 * f6 * f7 * f7 / 16;
}

/// (0, abc) on the product model.
inline RationalPoint base_point(const Rational& k) {
  const CubicModel m = product_model(k);
  const auto s = fine_sides(k);
  auto p = RationalPoint::affine(Rational(0), s.a * s.b * s.c);
  if (!m.contains(p)) throw InternalError("base point off the product model at k = " + nt::to_string(k));
  return p;
}

/// The polynomials whose rational roots are the k with a = b, a = c, b = c:
/// 2(b - a) = (k - 2)(k^2 - 12k + 4), 2(c - a) = k^3 - 8k^2 + 4k - 16, c - b = 3k^2 - 12k - 4.
inline std::array<RatPolynomial, 3> coincidence_polynomials() {
  return {RatPolynomial::from_descending({1, -14, 28, -8}),
          RatPolynomial::from_descending({1, -8, 4, -16}),
          RatPolynomial::from_descending({6, -24, -8})};
}

struct SideCoincidence {
  bool a_eq_b = false, a_eq_c = false, b_eq_c = false;
  bool any() const { return a_eq_b || a_eq_c || b_eq_c; }
};

/// Direct comparison of the evaluated sides, checked against the roots of the
/// coincidence polynomials.
inline SideCoincidence side_coincidence(const Rational& k) {
  const auto s = fine_sides(k);
  SideCoincidence r{s.a == s.b, s.a == s.c, s.b == s.c};
  const auto polys = coincidence_polynomials();
  const bool via_poly[3] = {polys[0](k) == 0, polys[1](k) == 0, polys[2](k) == 0};
  if (via_poly[0] != r.a_eq_b || via_poly[1] != r.a_eq_c || via_poly[2] != r.b_eq_c)
    throw InternalError("side coincidence disagrees with its polynomials at k = " + nt::to_string(k));
  return r;
}

/// Which side is the hypotenuse, if any.
enum class RightAngle { kOppositeA, kOppositeB, kOppositeC };

inline std::string to_string(RightAngle r) {
  switch (r) {
    case RightAngle::kOppositeA: return "b^2 + c^2 = a^2";
    case RightAngle::kOppositeB: return "a^2 + c^2 = b^2";
    case RightAngle::kOppositeC: return "a^2 + b^2 = c^2";
  }
  return "?";
}

inline std::optional<RightAngle> right_triangle_relation(const Rational& k) {
  require_admissible(k);
  const auto s = fine_sides(k);
  const Rational a2 = s.a * s.a, b2 = s.b * s.b, c2 = s.c * s.c;
  if (b2 + c2 == a2) return RightAngle::kOppositeA;
  if (a2 + c2 == b2) return RightAngle::kOppositeB;
  if (a2 + b2 == c2) return RightAngle::kOppositeC;
  return std::nullopt;
}

/// All models of one family member, built and cross-checked together.
struct FamilyCurve {
  Rational k;
  HeronTriple triple;
  CubicModel product;
  CubicModel shifted;
  IntegralModel integral;  // scale u is a multiple of 2, matching table_model
  RationalPoint base;      // on the product model

  RationalPoint base_on_integral() const { return integral.from_source(base); }

  /// Product-model point (x, y) -> shifted-model point (x + ac, y).
  RationalPoint to_shifted(const RationalPoint& p) const {
    if (p.infinity) return p;
    return RationalPoint::affine(p.x + triple.a * triple.c, p.y);
  }
};

inline FamilyCurve make_family_curve(const Rational& k, const nt::FactorBudget& budget = {}) {
  auto triple = heron_sides(k);
  CubicModel prod = product_model(k);
  CubicModel shift = shifted_model(k);
  IntegralModel integral = ec::integral_model(prod, 2, budget);
  RationalPoint base = base_point(k);

  const Rational delta = family_discriminant(k);
  if (prod.discriminant() != delta || shift.discriminant() != delta)
    throw ClosedFormMismatch("factored discriminant disagrees with the model at k = " + nt::to_string(k));
  const auto s = closed_form_shift(k);
  if (16 * s.B * s.B * (s.A * s.A - 4 * s.B) != delta)
    throw ClosedFormMismatch("16 B^2 (A^2 - 4B) disagrees with the factored discriminant at k = " +
                             nt::to_string(k));
  Rational u12 = Rational(integral.scale);
  u12 = u12 * u12 * u12;
  u12 = u12 * u12;
  u12 = u12 * u12;
  if (Rational(integral.discriminant()) != delta * u12)
    throw InternalError("integral model discriminant is not u^12 times the source discriminant");
  return {k, std::move(triple), std::move(prod), std::move(shift), std::move(integral), std::move(base)};
}

}  // namespace heron::family
