#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <string>
#include <string_view>

#include "aktower/error.hpp"

namespace aktower {

using BigInt = mpz_class;
using BigRational = mpq_class;

inline constexpr unsigned kDefaultPrecision = 256;
inline constexpr unsigned kMinPrecision = 64;

// Builds a canonical rational; throws on a zero denominator.
BigRational make_rational(const BigInt& num, const BigInt& den);
// Accepts "p/q", "p" or a finite decimal such as "0.125".
BigRational parse_rational(std::string_view text);
std::string to_string(const BigRational& q);
std::string to_string(const BigInt& z);
bool is_integer(const BigRational& q);

// Arbitrary-precision real. Every value carries its own precision and
// binary operations round to the larger precision of the operands.
class Real {
 public:
  explicit Real(unsigned bits = kDefaultPrecision);
  Real(double v, unsigned bits);
  Real(long v, unsigned bits);
  Real(int v, unsigned bits) : Real(static_cast<long>(v), bits) {}
  Real(const BigInt& v, unsigned bits);
  Real(const BigRational& v, unsigned bits);

  Real(const Real& other);
  Real(Real&& other) noexcept;
  Real& operator=(const Real& other);
  Real& operator=(Real&& other) noexcept;
  ~Real();

  // Decimal, hex-float ("0x1.8p-3") or rational "p/q".
  static Real parse(std::string_view text, unsigned bits);
  static Real pi(unsigned bits);
  static Real ln2(unsigned bits);
  static Real pow2(long e, unsigned bits);

  unsigned precision() const { return static_cast<unsigned>(mpfr_get_prec(v_)); }
  Real with_precision(unsigned bits) const;

  mpfr_srcptr get() const { return v_; }
  mpfr_ptr get() { return v_; }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  // Exact hex-float text, reloadable bit for bit at the same precision.
  std::string to_hex() const;
  // Decimal scientific text; digits = 0 picks enough digits for the precision.
  std::string to_decimal(int digits = 0) const;
  BigInt floor_int() const;
  // Exact conversion (the value is a dyadic rational).
  BigRational to_rational() const;

  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }
  long exponent2() const;  // e with 2^(e-1) <= |x| < 2^e; very negative for zero

  Real& operator+=(const Real& o);
  Real& operator-=(const Real& o);
  Real& operator*=(const Real& o);
  Real& operator/=(const Real& o);
  Real& operator+=(long o);
  Real& operator-=(long o);
  Real& operator*=(long o);
  Real& operator/=(long o);
  Real operator-() const;

 private:
  void widen_to(unsigned bits);
  mpfr_t v_;
};

Real operator+(const Real& a, const Real& b);
Real operator-(const Real& a, const Real& b);
Real operator*(const Real& a, const Real& b);
Real operator/(const Real& a, const Real& b);
Real operator+(const Real& a, long b);
Real operator-(const Real& a, long b);
Real operator*(const Real& a, long b);
Real operator/(const Real& a, long b);
Real operator+(long a, const Real& b);
Real operator-(long a, const Real& b);
Real operator*(long a, const Real& b);
Real operator/(long a, const Real& b);

bool operator<(const Real& a, const Real& b);
bool operator<=(const Real& a, const Real& b);
bool operator>(const Real& a, const Real& b);
bool operator>=(const Real& a, const Real& b);
bool operator==(const Real& a, const Real& b);
bool operator!=(const Real& a, const Real& b);
bool operator<(const Real& a, long b);
bool operator<=(const Real& a, long b);
bool operator>(const Real& a, long b);
bool operator>=(const Real& a, long b);
bool operator==(const Real& a, long b);

Real abs(const Real& x);
Real sqrt(const Real& x);
Real exp(const Real& x);
Real log(const Real& x);
Real log2(const Real& x);
Real pow(const Real& x, const Real& y);
Real pow(const Real& x, long n);
Real floor(const Real& x);
Real frac(const Real& x);  // x - floor(x), in [0, 1)
Real tanh(const Real& x);
Real atanh(const Real& x);
Real cosh(const Real& x);
Real sinh(const Real& x);
Real ldexp(const Real& x, long e);
const Real& min(const Real& a, const Real& b);
const Real& max(const Real& a, const Real& b);

}  // namespace aktower
