#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <string>
#include <utility>

#include "mdcf/core/error.hpp"

namespace mdcf {

using Integer = mpz_class;
using Rational = mpq_class;

inline constexpr long kDefaultPrecisionBits = 256;
inline constexpr long kMinPrecisionBits = 53;

/// Binary floating-point number with a per-value precision, rounding to
/// nearest. Results of binary operations carry the larger precision of the
/// two operands; mixed operations with integers and rationals keep the
/// precision of the Real operand.
class Real {
 public:
  explicit Real(long prec = kDefaultPrecisionBits) {
    check_precision(prec);
    mpfr_init2(v_, prec);
    mpfr_set_zero(v_, 1);
  }
  Real(double x, long prec) : Real(prec) { mpfr_set_d(v_, x, MPFR_RNDN); }
  Real(long x, long prec) : Real(prec) { mpfr_set_si(v_, x, MPFR_RNDN); }
  Real(int x, long prec) : Real(static_cast<long>(x), prec) {}
  Real(const Integer& x, long prec) : Real(prec) {
    mpfr_set_z(v_, x.get_mpz_t(), MPFR_RNDN);
  }
  Real(const Rational& x, long prec) : Real(prec) {
    mpfr_set_q(v_, x.get_mpq_t(), MPFR_RNDN);
  }
  /// Parses a decimal literal ("0.4142…", "1e-5").
  Real(const std::string& s, long prec) : Real(prec) {
    if (mpfr_set_str(v_, s.c_str(), 10, MPFR_RNDN) != 0) {
      throw DomainError("not a decimal number: " + s);
    }
  }

  /// Copy rounded to a new precision.
  Real(const Real& x, long prec) : Real(prec) { mpfr_set(v_, x.v_, MPFR_RNDN); }

  Real(const Real& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  Real(Real&& o) noexcept {
    mpfr_init2(v_, kMinPrecisionBits);
    mpfr_swap(v_, o.v_);
  }
  Real& operator=(const Real& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  Real& operator=(Real&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  /// Assignment from scalars keeps the current precision.
  Real& operator=(long x) {
    mpfr_set_si(v_, x, MPFR_RNDN);
    return *this;
  }
  ~Real() { mpfr_clear(v_); }

  [[nodiscard]] long precision() const { return static_cast<long>(mpfr_get_prec(v_)); }
  [[nodiscard]] mpfr_srcptr get() const { return v_; }
  [[nodiscard]] mpfr_ptr get() { return v_; }

  [[nodiscard]] double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  [[nodiscard]] bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  [[nodiscard]] int sign() const { return mpfr_sgn(v_); }

  /// Exact value as a rational (every finite binary float is one).
  [[nodiscard]] Rational to_rational() const {
    mpz_class m;
    mpfr_exp_t e = mpfr_get_z_2exp(m.get_mpz_t(), v_);
    Rational r(m);
    if (e >= 0) {
      mpq_mul_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(e));
    } else {
      mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(-e));
    }
    r.canonicalize();
    return r;
  }

  /// Largest integer not exceeding the value.
  [[nodiscard]] Integer floor_int() const {
    Integer z;
    mpfr_get_z(z.get_mpz_t(), v_, MPFR_RNDD);
    return z;
  }

  Real& operator+=(const Real& o) { return binary(o, mpfr_add); }
  Real& operator-=(const Real& o) { return binary(o, mpfr_sub); }
  Real& operator*=(const Real& o) { return binary(o, mpfr_mul); }
  Real& operator/=(const Real& o) { return binary(o, mpfr_div); }
  Real& operator+=(const Integer& z) {
    mpfr_add_z(v_, v_, z.get_mpz_t(), MPFR_RNDN);
    return *this;
  }
  Real& operator-=(const Integer& z) {
    mpfr_sub_z(v_, v_, z.get_mpz_t(), MPFR_RNDN);
    return *this;
  }
  Real& operator*=(const Integer& z) {
    mpfr_mul_z(v_, v_, z.get_mpz_t(), MPFR_RNDN);
    return *this;
  }
  Real& operator/=(const Integer& z) {
    mpfr_div_z(v_, v_, z.get_mpz_t(), MPFR_RNDN);
    return *this;
  }
  Real& operator+=(long x) {
    mpfr_add_si(v_, v_, x, MPFR_RNDN);
    return *this;
  }
  Real& operator-=(long x) {
    mpfr_sub_si(v_, v_, x, MPFR_RNDN);
    return *this;
  }
  Real& operator*=(long x) {
    mpfr_mul_si(v_, v_, x, MPFR_RNDN);
    return *this;
  }
  Real& operator/=(long x) {
    mpfr_div_si(v_, v_, x, MPFR_RNDN);
    return *this;
  }

  Real operator-() const {
    Real r(*this);
    mpfr_neg(r.v_, r.v_, MPFR_RNDN);
    return r;
  }

  friend Real operator+(Real a, const Real& b) { return std::move(a.widen(b) += b); }
  friend Real operator-(Real a, const Real& b) { return std::move(a.widen(b) -= b); }
  friend Real operator*(Real a, const Real& b) { return std::move(a.widen(b) *= b); }
  friend Real operator/(Real a, const Real& b) { return std::move(a.widen(b) /= b); }

  friend Real operator+(Real a, const Integer& b) { return std::move(a += b); }
  friend Real operator-(Real a, const Integer& b) { return std::move(a -= b); }
  friend Real operator*(Real a, const Integer& b) { return std::move(a *= b); }
  friend Real operator/(Real a, const Integer& b) { return std::move(a /= b); }
  friend Real operator+(const Integer& b, Real a) { return std::move(a += b); }
  friend Real operator*(const Integer& b, Real a) { return std::move(a *= b); }
  friend Real operator-(const Integer& b, const Real& a) { return -(a - b); }

  friend Real operator+(Real a, long b) { return std::move(a += b); }
  friend Real operator-(Real a, long b) { return std::move(a -= b); }
  friend Real operator*(Real a, long b) { return std::move(a *= b); }
  friend Real operator/(Real a, long b) { return std::move(a /= b); }
  friend Real operator+(long b, Real a) { return std::move(a += b); }
  friend Real operator*(long b, Real a) { return std::move(a *= b); }
  friend Real operator-(long b, const Real& a) {
    Real r(a.precision());
    mpfr_si_sub(r.v_, b, a.v_, MPFR_RNDN);
    return r;
  }
  friend Real operator/(long b, const Real& a) {
    Real r(a.precision());
    mpfr_si_div(r.v_, b, a.v_, MPFR_RNDN);
    return r;
  }

  friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
  friend bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
  friend bool operator>(const Real& a, const Real& b) { return b < a; }
  friend bool operator<=(const Real& a, const Real& b) { return mpfr_lessequal_p(a.v_, b.v_) != 0; }
  friend bool operator>=(const Real& a, const Real& b) { return b <= a; }
  friend bool operator!=(const Real& a, const Real& b) { return !(a == b); }

  friend bool operator==(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) == 0; }
  friend bool operator!=(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) != 0; }
  friend bool operator<(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) < 0; }
  friend bool operator>(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) > 0; }
  friend bool operator<=(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) <= 0; }
  friend bool operator>=(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) >= 0; }

  friend bool operator<(const Real& a, const Rational& b) { return mpfr_cmp_q(a.v_, b.get_mpq_t()) < 0; }
  friend bool operator>(const Real& a, const Rational& b) { return mpfr_cmp_q(a.v_, b.get_mpq_t()) > 0; }
  friend bool operator<=(const Real& a, const Rational& b) { return mpfr_cmp_q(a.v_, b.get_mpq_t()) <= 0; }
  friend bool operator>=(const Real& a, const Rational& b) { return mpfr_cmp_q(a.v_, b.get_mpq_t()) >= 0; }

  friend Real abs(const Real& a) {
    Real r(a);
    mpfr_abs(r.v_, r.v_, MPFR_RNDN);
    return r;
  }
  friend Real sqrt(const Real& a) {
    Real r(a.precision());
    mpfr_sqrt(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  friend Real log(const Real& a) {
    Real r(a.precision());
    mpfr_log(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  friend Real ldexp(const Real& a, long e) {
    Real r(a);
    mpfr_mul_2si(r.v_, r.v_, e, MPFR_RNDN);
    return r;
  }

  friend std::ostream& operator<<(std::ostream& os, const Real& a) {
    return os << a.to_string(17);
  }

  /// Decimal rendering with the given number of significant digits.
  [[nodiscard]] std::string to_string(int digits) const {
    char* buf = nullptr;
    mpfr_asprintf(&buf, "%.*Rg", digits, v_);
    std::string s(buf);
    mpfr_free_str(buf);
    return s;
  }

 private:
  static void check_precision(long prec) {
    if (prec < kMinPrecisionBits) {
      throw DomainError("precision must be at least 53 bits");
    }
  }
  Real& widen(const Real& o) {
    if (o.precision() > precision()) {
      mpfr_prec_round(v_, o.precision(), MPFR_RNDN);
    }
    return *this;
  }
  Real& binary(const Real& o, int (*op)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t)) {
    widen(o);
    op(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }

  mpfr_t v_;
};

Real abs(const Real& a);
Real sqrt(const Real& a);
Real log(const Real& a);
Real ldexp(const Real& a, long e);

using HighPrecReal = Real;

/// pi at the requested precision.
inline Real real_pi(long prec) {
  Real r(prec);
  mpfr_const_pi(r.get(), MPFR_RNDN);
  return r;
}

}  // namespace mdcf
