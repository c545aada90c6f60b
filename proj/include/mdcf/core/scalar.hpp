#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "mdcf/core/error.hpp"
#include "mdcf/core/real.hpp"

namespace mdcf {

// Uniform vocabulary over the three scalar models used for orbits:
// hardware doubles (fast statistics), Real (configurable binary precision)
// and Rational (exact). Digits are integral values of `digit_type`.
template <class T>
struct scalar_traits;

template <>
struct scalar_traits<double> {
  using digit_type = double;
  static constexpr bool exact = false;

  static double floor_digit(double x) { return std::floor(x); }
  static double from_digit(double d, double) { return d; }
  static double one(double) { return 1.0; }
  static double from_rational(const Rational& q, long) { return q.get_d(); }
  static double to_double(double x) { return x; }
  static long precision(double) { return 53; }
  static double abs(double x) { return std::fabs(x); }
  static Integer to_integer(double d) { return Integer(d); }
};

template <>
struct scalar_traits<Real> {
  using digit_type = Integer;
  static constexpr bool exact = false;

  static Integer floor_digit(const Real& x) { return x.floor_int(); }
  static Real from_digit(const Integer& d, const Real& like) { return Real(d, like.precision()); }
  static Real one(const Real& like) { return Real(1L, like.precision()); }
  static Real from_rational(const Rational& q, long prec) { return Real(q, prec); }
  static double to_double(const Real& x) { return x.to_double(); }
  static long precision(const Real& x) { return x.precision(); }
  static Real abs(const Real& x) { return mdcf::abs(x); }
  static const Integer& to_integer(const Integer& d) { return d; }
};

template <>
struct scalar_traits<Rational> {
  using digit_type = Integer;
  static constexpr bool exact = true;

  static Integer floor_digit(const Rational& x) {
    Integer z;
    mpz_fdiv_q(z.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return z;
  }
  static Rational from_digit(const Integer& d, const Rational&) { return Rational(d); }
  static Rational one(const Rational&) { return Rational(1); }
  static Rational from_rational(const Rational& q, long) { return q; }
  static double to_double(const Rational& x) { return x.get_d(); }
  static long precision(const Rational&) { return std::numeric_limits<long>::max(); }
  static Rational abs(const Rational& x) { return ::abs(x); }
  static const Integer& to_integer(const Integer& d) { return d; }
};

template <class T>
using digit_t = typename scalar_traits<T>::digit_type;

/// floor(y + 1/2): nearest integer, ties rounded up. Computed as floor(y)
/// plus a comparison of the exact fractional part against 1/2, so no
/// rounding happens when forming y + 1/2.
template <class T>
digit_t<T> round_half_up(const T& y) {
  using tr = scalar_traits<T>;
  digit_t<T> n = tr::floor_digit(y);
  T frac = y - tr::from_digit(n, y);
  T twice = frac + frac;
  if (twice >= tr::one(y)) {
    n += 1;
  }
  return n;
}

/// Tolerance 2^(-precision/2) used for cocycle verification; zero in exact
/// arithmetic.
template <class T>
double verification_tolerance(const T& like) {
  if constexpr (scalar_traits<T>::exact) {
    return 0.0;
  } else {
    return std::ldexp(1.0, -static_cast<int>(scalar_traits<T>::precision(like) / 2));
  }
}

/// log|q| for a nonzero rational, safe far outside the double exponent range.
inline double log_abs(const Rational& q) {
  long en = 0, ed = 0;
  double mn = mpz_get_d_2exp(&en, q.get_num_mpz_t());
  double md = mpz_get_d_2exp(&ed, q.get_den_mpz_t());
  return std::log(std::fabs(mn)) - std::log(md) + static_cast<double>(en - ed) * std::log(2.0);
}

inline double log_abs(const Integer& z) {
  long e = 0;
  double m = mpz_get_d_2exp(&e, z.get_mpz_t());
  return std::log(std::fabs(m)) + static_cast<double>(e) * std::log(2.0);
}

/// Value of x as a Real of the given precision.
inline Real to_real(double x, long prec) { return Real(x, prec); }
inline Real to_real(const Rational& x, long prec) { return Real(x, prec); }
inline Real to_real(const Real& x, long prec) { return Real(x, prec); }

/// Exact conversion of a finite double.
inline Rational rational_from_double(double x) {
  Rational r(x);
  r.canonicalize();
  return r;
}

inline std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

}  // namespace mdcf
