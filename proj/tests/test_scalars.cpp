#include <gtest/gtest.h>

#include <cmath>

#include "kashaev/json_io.hpp"
#include "kashaev/scalar.hpp"

using namespace kashaev;

TEST(SqrtPrincipal, ZeroIsZero) {
  EXPECT_EQ(sqrt_principal(0.0), 0.0);
  EXPECT_EQ(sqrt_principal(mpq_class(0)), 0);
}

TEST(SqrtPrincipal, FloatSquaresBack) {
  double r = sqrt_principal(8.0);
  EXPECT_NEAR(r, 2.8284271247461903, 1e-15);
  EXPECT_NEAR(r * r, 8.0, 1e-14);
}

TEST(SqrtPrincipal, ExactPerfectSquare) { EXPECT_EQ(sqrt_principal(mpq_class(9, 4)), mpq_class(3, 2)); }

TEST(SqrtPrincipal, ExactNonSquareThrows) {
  try {
    sqrt_principal(mpq_class(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InexactSquareRoot);
  }
}

TEST(SqrtPrincipal, NegativeThrows) {
  EXPECT_THROW(sqrt_principal(-1.0), Error);
  EXPECT_THROW(sqrt_principal(mpq_class(-4)), Error);
}

TEST(ApproxEq, ExactIdentity) { EXPECT_TRUE(approx_eq(mpq_class(1, 3), mpq_class(1, 3))); }

TEST(ApproxEq, FloatBelowAbsTolerance) { EXPECT_TRUE(approx_eq(1.0, 1.0 + 1e-13)); }

TEST(ApproxEq, FloatAboveTolerance) { EXPECT_FALSE(approx_eq(1.0, 1.001)); }

TEST(ScalarVariant, ExactArithmeticStaysExact) {
  Scalar a = Scalar::rational(1, 3), b = Scalar::rational(1, 6);
  Scalar c = a + b;
  ASSERT_TRUE(c.exact());
  EXPECT_EQ(c.q(), mpq_class(1, 2));
}

TEST(ScalarVariant, MixingPromotesToFloat) {
  Scalar c = Scalar::rational(1, 2) * Scalar::from_double(3.0);
  EXPECT_FALSE(c.exact());
  EXPECT_DOUBLE_EQ(c.d(), 1.5);
}

TEST(ScalarVariant, ExactDivisionByZeroThrows) { EXPECT_THROW(Scalar(1) / Scalar(0), Error); }

TEST(JsonScalars, StringsAreExactRationals) {
  using io::json;
  EXPECT_EQ(io::scalar<mpq_class>(json("6/4")), mpq_class(3, 2));
  EXPECT_EQ(io::scalar<mpq_class>(json(-7)), mpq_class(-7));
  EXPECT_EQ(io::emit(mpq_class(3, 2)), json("3/2"));
}

TEST(JsonScalars, FloatsRejectedInExactMode) {
  try {
    io::scalar<mpq_class>(io::json(0.5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ModeMismatch);
  }
}

TEST(JsonScalars, MalformedRational) {
  EXPECT_THROW(io::scalar<mpq_class>(io::json("1/0")), Error);
  EXPECT_THROW(io::scalar<mpq_class>(io::json("abc")), Error);
}

TEST(JsonScalars, FloatDetection) {
  EXPECT_FALSE(io::any_float(io::json::parse(R"({"a":[1,"2/3",{"b":4}]})")));
  EXPECT_TRUE(io::any_float(io::json::parse(R"({"a":[1,{"b":4.0}]})")));
}
