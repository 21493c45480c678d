#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <concepts>
#include <string>
#include <utility>
#include <variant>

#include "kashaev/error.hpp"

namespace kashaev {

struct Tolerance {
  double rel = 1e-9;
  double abs = 1e-12;

  Tolerance() = default;
  Tolerance(double r, double a) : rel(r), abs(a) {
    if (!(r > 0) || !(a > 0)) throw Error(ErrorKind::InvalidInput, "tolerances must be strictly positive");
  }
};

// ---------------------------------------------------------------------------
// double

inline bool is_exact(double) { return false; }
inline bool is_zero(double x) { return x == 0.0; }
inline double to_double(double x) { return x; }
inline double abs_value(double x) { return std::fabs(x); }
inline int sgn(double x) { return (x > 0) - (x < 0); }

inline double sqrt_principal(double x) {
  if (x < 0) throw Error(ErrorKind::NegativeRadicand, "sqrt of " + std::to_string(x));
  return std::sqrt(x);
}

inline bool approx_eq(double a, double b, const Tolerance& tol = {}) {
  return std::fabs(a - b) <= tol.abs + tol.rel * std::max(std::fabs(a), std::fabs(b));
}

// |value| small relative to the magnitude of the terms that produced it
inline bool near_zero(double value, double scale, const Tolerance& tol = {}) {
  return std::fabs(value) <= tol.abs + tol.rel * std::fabs(scale);
}

// ---------------------------------------------------------------------------
// mpq_class

inline bool is_exact(const mpq_class&) { return true; }
inline bool is_zero(const mpq_class& x) { return sgn(x) == 0; }
inline double to_double(const mpq_class& x) { return x.get_d(); }
inline mpq_class abs_value(const mpq_class& x) { return abs(x); }

inline mpq_class sqrt_principal(const mpq_class& x) {
  if (sgn(x) < 0) throw Error(ErrorKind::NegativeRadicand, "sqrt of " + x.get_str());
  const mpz_class& n = x.get_num();
  const mpz_class& d = x.get_den();
  if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t()))
    throw Error(ErrorKind::InexactSquareRoot, x.get_str() + " is not a rational square");
  mpz_class rn, rd;
  mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), d.get_mpz_t());
  mpq_class r(rn, rd);
  r.canonicalize();
  return r;
}

inline bool approx_eq(const mpq_class& a, const mpq_class& b, const Tolerance& = {}) { return a == b; }
inline bool near_zero(const mpq_class& value, const mpq_class&, const Tolerance& = {}) { return sgn(value) == 0; }

inline std::string to_string(const mpq_class& x) { return x.get_str(); }

// ---------------------------------------------------------------------------
// Scalar: runtime-tagged exact rational or binary float

enum class Mode { Exact, Float };

class Scalar {
 public:
  Scalar() : v_(mpq_class(0)) {}
  Scalar(int x) : v_(mpq_class(x)) {}
  Scalar(long x) : v_(mpq_class(x)) {}
  Scalar(const mpq_class& q) : v_(q) {}
  Scalar(mpq_class&& q) : v_(std::move(q)) {}

  static Scalar from_double(double x) {
    Scalar s;
    s.v_ = x;
    return s;
  }
  static Scalar rational(long p, long q) {
    mpq_class r(p, q);
    r.canonicalize();
    return Scalar(r);
  }

  Mode mode() const { return std::holds_alternative<double>(v_) ? Mode::Float : Mode::Exact; }
  bool exact() const { return mode() == Mode::Exact; }
  const mpq_class& q() const { return std::get<mpq_class>(v_); }
  double d() const { return exact() ? q().get_d() : std::get<double>(v_); }

  Scalar to_float() const { return from_double(d()); }

  Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
  Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
  Scalar& operator*=(const Scalar& o) { return *this = *this * o; }
  Scalar& operator/=(const Scalar& o) { return *this = *this / o; }

  friend Scalar operator-(const Scalar& a) {
    if (a.exact()) return Scalar(mpq_class(-a.q()));
    return from_double(-a.d());
  }

#define KASHAEV_SCALAR_BINOP(OP)                                          \
  friend Scalar operator OP(const Scalar& a, const Scalar& b) {           \
    if (a.exact() && b.exact()) return Scalar(mpq_class(a.q() OP b.q())); \
    return from_double(a.d() OP b.d());                                   \
  }
  KASHAEV_SCALAR_BINOP(+)
  KASHAEV_SCALAR_BINOP(-)
  KASHAEV_SCALAR_BINOP(*)
#undef KASHAEV_SCALAR_BINOP

  friend Scalar operator/(const Scalar& a, const Scalar& b) {
    if (a.exact() && b.exact()) {
      if (sgn(b.q()) == 0) throw Error(ErrorKind::ZeroDenominator, "exact division by zero");
      return Scalar(mpq_class(a.q() / b.q()));
    }
    return from_double(a.d() / b.d());
  }

  // literal comparison; a float never equals an exact value
  friend bool operator==(const Scalar& a, const Scalar& b) {
    if (a.mode() != b.mode()) return false;
    return a.exact() ? a.q() == b.q() : a.d() == b.d();
  }
  friend bool operator<(const Scalar& a, const Scalar& b) {
    if (a.exact() && b.exact()) return a.q() < b.q();
    return a.d() < b.d();
  }
  friend bool operator>(const Scalar& a, const Scalar& b) { return b < a; }

  std::string str() const {
    if (exact()) return q().get_str();
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", d());
    return buf;
  }

 private:
  std::variant<mpq_class, double> v_;
};

inline bool is_exact(const Scalar& x) { return x.exact(); }
inline bool is_zero(const Scalar& x) { return x.exact() ? sgn(x.q()) == 0 : x.d() == 0.0; }
inline double to_double(const Scalar& x) { return x.d(); }
inline int sgn(const Scalar& x) { return x.exact() ? sgn(x.q()) : sgn(x.d()); }
inline Scalar abs_value(const Scalar& x) { return sgn(x) < 0 ? -x : x; }
inline std::string to_string(const Scalar& x) { return x.str(); }
inline std::string to_string(double x) { return Scalar::from_double(x).str(); }

inline Scalar sqrt_principal(const Scalar& x) {
  if (x.exact()) return Scalar(sqrt_principal(x.q()));
  return Scalar::from_double(sqrt_principal(x.d()));
}

inline bool approx_eq(const Scalar& a, const Scalar& b, const Tolerance& tol = {}) {
  if (a.mode() != b.mode())
    throw Error(ErrorKind::ModeMismatch, "comparing exact " + a.str() + " with float " + b.str());
  if (a.exact()) return a.q() == b.q();
  return approx_eq(a.d(), b.d(), tol);
}

inline bool near_zero(const Scalar& value, const Scalar& scale, const Tolerance& tol = {}) {
  if (value.exact()) return sgn(value.q()) == 0;
  return near_zero(value.d(), scale.d(), tol);
}

template <class T>
concept Numeric = requires(T a, T b, Tolerance tol) {
  { a + b } -> std::convertible_to<T>;
  { a - b } -> std::convertible_to<T>;
  { a * b } -> std::convertible_to<T>;
  { a / b } -> std::convertible_to<T>;
  { -a } -> std::convertible_to<T>;
  { is_zero(a) } -> std::convertible_to<bool>;
  { approx_eq(a, b, tol) } -> std::convertible_to<bool>;
  { to_double(a) } -> std::convertible_to<double>;
};

// small rational constant p/q in the numeric type T
template <Numeric T>
T konst(long p, long q = 1) {
  if constexpr (std::is_same_v<T, double>) {
    return static_cast<double>(p) / static_cast<double>(q);
  } else {
    mpq_class r(p, q);
    r.canonicalize();
    return T(r);
  }
}

// literal equality in exact mode, tolerance equality in float mode
template <Numeric T>
bool same_value(const T& a, const T& b, const Tolerance& tol) {
  return approx_eq(a, b, tol);
}

}  // namespace kashaev
