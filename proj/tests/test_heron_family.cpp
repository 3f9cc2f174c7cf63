#include <gtest/gtest.h>

#include <random>

#include "heron/heron_family.hpp"
#include "support.hpp"

using namespace heron;

TEST(Sides, IntegerParameters) {
  const auto t = family::heron_sides(6);
  EXPECT_EQ(t.a, 160);
  EXPECT_EQ(t.b, 96);
  EXPECT_EQ(t.c, 128);
  EXPECT_EQ(t.semiperimeter, 192);
  EXPECT_TRUE(t.geometric);
}

TEST(Sides, SingularParametersRejected) {
  for (const long k : {0L, 2L, -2L}) {
    EXPECT_THROW(family::heron_sides(k), SingularParameter) << k;
    EXPECT_THROW(family::product_model(k), SingularParameter) << k;
    EXPECT_THROW(family::make_family_curve(k), SingularParameter) << k;
  }
}

TEST(Area, DerivedValues) {
  EXPECT_EQ(family::heron_area(3), 75);
  EXPECT_EQ(family::heron_area(5), 2205);
  EXPECT_EQ(family::heron_area(6), 6144);
}

TEST(Area, SquaredAreaIsRationalSquareForRandomK) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 500; ++i) {
    const Rational k = fixtures::random_k(rng);
    const auto t = family::heron_sides(k);
    const auto root = nt::is_rational_square(t.squared_area);
    ASSERT_TRUE(root) << k;
    EXPECT_EQ(*root * *root, t.squared_area);
  }
}

TEST(Models, TableRowsReproducedExactly) {
  for (const auto& row : fixtures::table_rows()) {
    const auto fc = family::make_family_curve(row.k);
    EXPECT_EQ(fc.integral.scale, 2) << row.k;
    EXPECT_EQ(fc.integral.a2, Integer(row.a2)) << row.k;
    EXPECT_EQ(fc.integral.a4, Integer(row.a4)) << row.k;
    EXPECT_EQ(fc.integral.a6, Integer(row.a6)) << row.k;
  }
}

// The k = 98/625 row is the product model with doubled sides, i.e. the
// product model's coefficients times 4, 16 and 64.
TEST(Models, FractionalTableRow) {
  const auto row = fixtures::table_row_one();
  const Rational& k = fixtures::table_row_one_k();
  const auto table = family::table_model(k);
  EXPECT_EQ(table.a2(), row[0]);
  EXPECT_EQ(table.a4(), row[1]);
  EXPECT_EQ(table.a6(), row[2]);
  const auto product = family::product_model(k);
  EXPECT_EQ(product.a2(), Rational("-964996702529494784/59604644775390625"));
  EXPECT_EQ(4 * product.a2(), row[0]);
  EXPECT_EQ(16 * product.a4(), row[1]);
  EXPECT_EQ(64 * product.a6(), row[2]);
}

TEST(Models, ClosedFormsMatchTranslationForRandomK) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 500; ++i) {
    const Rational k = fixtures::random_k(rng);
    const auto product = family::product_model(k);
    const auto shifted = family::shifted_model(k);
    const auto closed = family::closed_form_shift(k);
    const auto s = family::fine_sides(k);
    const auto translated = family::translate_cubic(product, s.a * s.c);
    EXPECT_EQ(translated[0], closed.A);
    EXPECT_EQ(translated[1], closed.B);
    EXPECT_EQ(translated[2], 0);
    const Rational delta = family::family_discriminant(k);
    EXPECT_EQ(product.discriminant(), delta);
    EXPECT_EQ(shifted.discriminant(), delta);
    EXPECT_EQ(16 * closed.B * closed.B * (closed.A * closed.A - 4 * closed.B), delta);
  }
}

TEST(Models, TranslateCubicMovesRoots) {
  // f(x - t) for f = (x - 1)(x - 2)(x - 3) has roots 1 + t, 2 + t, 3 + t.
  const auto m = CubicModel::make(-6, 11, -6);
  const auto c = family::translate_cubic(m, 5);
  const auto moved = CubicModel::make(c[0], c[1], c[2]);
  for (const long r : {6, 7, 8}) EXPECT_EQ(moved.rhs(r), 0);
}

TEST(Models, BasePointOnEveryModel) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const auto fc = family::make_family_curve(fixtures::random_k(rng));
    EXPECT_TRUE(fc.product.contains(fc.base));
    EXPECT_TRUE(fc.shifted.contains(fc.to_shifted(fc.base)));
    EXPECT_TRUE(fc.integral.cubic().contains(fc.base_on_integral()));
    EXPECT_TRUE(fc.integral.cubic() == fc.product.rescaled(Rational(fc.integral.scale)));
    EXPECT_EQ(fc.integral.scale % 2, 0);
  }
}

TEST(Coincidence, CubicsFromSideDifferences) {
  const auto polys = family::coincidence_polynomials();
  std::mt19937_64 rng(4);
  for (int i = 0; i < 100; ++i) {
    const Rational k = fixtures::random_k(rng);
    const auto s = family::fine_sides(k);
    EXPECT_EQ(2 * (s.b - s.a), (k - 2) * (k * k - 12 * k + 4));
    EXPECT_EQ(polys[0](k), (k - 2) * (k * k - 12 * k + 4));
    EXPECT_EQ(polys[1](k), 2 * (s.c - s.a));
    EXPECT_EQ(polys[2](k), 2 * (s.c - s.b));
  }
}

TEST(Coincidence, NoneAwayFromSingularK) {
  for (long k = -50; k <= 50; ++k) {
    if (family::is_singular_parameter(k)) continue;
    EXPECT_FALSE(family::side_coincidence(k).any()) << k;
  }
  // At k = 2 the first cubic vanishes: a = b there, one reason the curve degenerates.
  EXPECT_TRUE(family::side_coincidence(2).a_eq_b);
}

TEST(RightTriangle, KSixAndTwoThirds) {
  EXPECT_EQ(family::right_triangle_relation(6), family::RightAngle::kOppositeA);
  const Rational two_thirds(2, 3);
  EXPECT_EQ(family::right_triangle_relation(two_thirds), family::RightAngle::kOppositeB);
  const auto t = family::heron_sides(two_thirds);
  EXPECT_LT(t.c, 0);
  EXPECT_FALSE(t.geometric);
}

TEST(RightTriangle, NoOtherIntegerK) {
  for (long k = 1; k <= 50; ++k) {
    if (family::is_singular_parameter(k) || k == 6) continue;
    EXPECT_FALSE(family::right_triangle_relation(k)) << k;
  }
}
