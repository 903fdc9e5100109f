#include "aktower/real.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

namespace aktower {

namespace {

struct ExponentRange {
  ExponentRange() {
    mpfr_set_emin(mpfr_get_emin_min());
    mpfr_set_emax(mpfr_get_emax_max());
  }
};
const ExponentRange widen_exponent_range;

void check_bits(unsigned bits) {
  if (bits < kMinPrecision)
    throw Error(Errc::precision, "precision must be at least 64 bits, got " + std::to_string(bits));
}

unsigned max_bits(const Real& a, const Real& b) { return std::max(a.precision(), b.precision()); }

std::string take_string(char* s) {
  std::string out(s);
  mpfr_free_str(s);
  return out;
}

}  // namespace

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return "invalid argument";
    case Errc::domain: return "domain error";
    case Errc::bounds: return "bounds error";
    case Errc::composition: return "composition error";
    case Errc::non_invertible: return "non-invertible error";
    case Errc::numeric: return "numeric error";
    case Errc::precision: return "precision error";
    case Errc::construction: return "construction error";
    case Errc::parameter: return "parameter error";
    case Errc::capacity: return "capacity error";
    case Errc::target: return "target error";
    case Errc::parse: return "parse error";
    case Errc::io: return "io error";
  }
  return "error";
}

BigRational make_rational(const BigInt& num, const BigInt& den) {
  if (den == 0) throw Error(Errc::invalid_argument, "rational with zero denominator");
  BigRational q(num, den);
  q.canonicalize();
  return q;
}

BigRational parse_rational(std::string_view text) {
  std::string t(text);
  auto bad = [&] { return Error(Errc::parse, "not a rational number: '" + t + "'"); };
  if (t.empty()) throw bad();
  auto slash = t.find('/');
  try {
    if (slash != std::string::npos) {
      BigInt num(t.substr(0, slash), 10);
      BigInt den(t.substr(slash + 1), 10);
      return make_rational(num, den);
    }
    auto dot = t.find('.');
    if (dot == std::string::npos) return BigRational(BigInt(t, 10));
    std::string whole = t.substr(0, dot);
    std::string fraction = t.substr(dot + 1);
    if (fraction.find_first_not_of("0123456789") != std::string::npos) throw bad();
    bool negative = !whole.empty() && whole[0] == '-';
    if (negative || (!whole.empty() && whole[0] == '+')) whole.erase(0, 1);
    if (whole.empty()) whole = "0";
    BigInt scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, fraction.size());
    BigInt digits(whole + fraction, 10);
    if (negative) digits = -digits;
    return make_rational(digits, scale);
  } catch (const std::invalid_argument&) {
    throw bad();
  }
}

std::string to_string(const BigRational& q) { return q.get_str(10); }
std::string to_string(const BigInt& z) { return z.get_str(10); }
bool is_integer(const BigRational& q) { return q.get_den() == 1; }

Real::Real(unsigned bits) {
  check_bits(bits);
  mpfr_init2(v_, bits);
  mpfr_set_zero(v_, 1);
}

Real::Real(double v, unsigned bits) {
  check_bits(bits);
  mpfr_init2(v_, bits);
  mpfr_set_d(v_, v, MPFR_RNDN);
}

Real::Real(long v, unsigned bits) {
  check_bits(bits);
  mpfr_init2(v_, bits);
  mpfr_set_si(v_, v, MPFR_RNDN);
}

Real::Real(const BigInt& v, unsigned bits) {
  check_bits(bits);
  mpfr_init2(v_, bits);
  mpfr_set_z(v_, v.get_mpz_t(), MPFR_RNDN);
}

Real::Real(const BigRational& v, unsigned bits) {
  check_bits(bits);
  mpfr_init2(v_, bits);
  mpfr_set_q(v_, v.get_mpq_t(), MPFR_RNDN);
}

Real::Real(const Real& other) {
  mpfr_init2(v_, mpfr_get_prec(other.v_));
  mpfr_set(v_, other.v_, MPFR_RNDN);
}

Real::Real(Real&& other) noexcept {
  mpfr_init2(v_, mpfr_get_prec(other.v_));
  mpfr_swap(v_, other.v_);
}

Real& Real::operator=(const Real& other) {
  if (this != &other) {
    if (mpfr_get_prec(v_) != mpfr_get_prec(other.v_)) mpfr_set_prec(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  return *this;
}

Real& Real::operator=(Real&& other) noexcept {
  mpfr_swap(v_, other.v_);
  return *this;
}

Real::~Real() { mpfr_clear(v_); }

Real Real::parse(std::string_view text, unsigned bits) {
  std::string t(text);
  if (t.find('/') != std::string::npos) return Real(parse_rational(t), bits);
  Real r(bits);
  char* end = nullptr;
  mpfr_strtofr(r.v_, t.c_str(), &end, 0, MPFR_RNDN);
  if (t.empty() || end == t.c_str() || *end != '\0' || !r.is_finite())
    throw Error(Errc::parse, "not a real number: '" + t + "'");
  return r;
}

Real Real::pi(unsigned bits) {
  Real r(bits);
  mpfr_const_pi(r.v_, MPFR_RNDN);
  return r;
}

Real Real::ln2(unsigned bits) {
  Real r(bits);
  mpfr_const_log2(r.v_, MPFR_RNDN);
  return r;
}

Real Real::pow2(long e, unsigned bits) {
  Real r(1L, bits);
  mpfr_mul_2si(r.v_, r.v_, e, MPFR_RNDN);
  return r;
}

Real Real::with_precision(unsigned bits) const {
  Real r(bits);
  mpfr_set(r.v_, v_, MPFR_RNDN);
  return r;
}

std::string Real::to_hex() const {
  char* s = nullptr;
  if (mpfr_asprintf(&s, "%Ra", v_) < 0) throw Error(Errc::numeric, "hex formatting failed");
  return take_string(s);
}

std::string Real::to_decimal(int digits) const {
  if (digits <= 0) digits = static_cast<int>(std::ceil(precision() * 0.30103)) + 1;
  char* s = nullptr;
  if (mpfr_asprintf(&s, "%.*Re", digits - 1, v_) < 0) throw Error(Errc::numeric, "decimal formatting failed");
  return take_string(s);
}

BigInt Real::floor_int() const {
  if (!is_finite()) throw Error(Errc::numeric, "floor of a non-finite value");
  BigInt z;
  mpfr_get_z(z.get_mpz_t(), v_, MPFR_RNDD);
  return z;
}

BigRational Real::to_rational() const {
  if (!is_finite()) throw Error(Errc::numeric, "rational conversion of a non-finite value");
  if (is_zero()) return BigRational(0);
  BigInt m;
  mpfr_exp_t e = mpfr_get_z_2exp(m.get_mpz_t(), v_);
  BigRational q(m);
  if (e >= 0)
    mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(e));
  else
    mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(-e));
  return q;
}

long Real::exponent2() const {
  if (is_zero() || !is_finite()) return mpfr_get_emin_min();
  return mpfr_get_exp(v_);
}

void Real::widen_to(unsigned bits) {
  if (bits > precision()) mpfr_prec_round(v_, bits, MPFR_RNDN);
}

Real& Real::operator+=(const Real& o) {
  widen_to(o.precision());
  mpfr_add(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
Real& Real::operator-=(const Real& o) {
  widen_to(o.precision());
  mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
Real& Real::operator*=(const Real& o) {
  widen_to(o.precision());
  mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
Real& Real::operator/=(const Real& o) {
  widen_to(o.precision());
  mpfr_div(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
Real& Real::operator+=(long o) {
  mpfr_add_si(v_, v_, o, MPFR_RNDN);
  return *this;
}
Real& Real::operator-=(long o) {
  mpfr_sub_si(v_, v_, o, MPFR_RNDN);
  return *this;
}
Real& Real::operator*=(long o) {
  mpfr_mul_si(v_, v_, o, MPFR_RNDN);
  return *this;
}
Real& Real::operator/=(long o) {
  mpfr_div_si(v_, v_, o, MPFR_RNDN);
  return *this;
}

Real Real::operator-() const {
  Real r(precision());
  mpfr_neg(r.v_, v_, MPFR_RNDN);
  return r;
}

Real operator+(const Real& a, const Real& b) {
  Real r(max_bits(a, b));
  mpfr_add(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}
Real operator-(const Real& a, const Real& b) {
  Real r(max_bits(a, b));
  mpfr_sub(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}
Real operator*(const Real& a, const Real& b) {
  Real r(max_bits(a, b));
  mpfr_mul(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}
Real operator/(const Real& a, const Real& b) {
  Real r(max_bits(a, b));
  mpfr_div(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}
Real operator+(const Real& a, long b) {
  Real r(a.precision());
  mpfr_add_si(r.get(), a.get(), b, MPFR_RNDN);
  return r;
}
Real operator-(const Real& a, long b) {
  Real r(a.precision());
  mpfr_sub_si(r.get(), a.get(), b, MPFR_RNDN);
  return r;
}
Real operator*(const Real& a, long b) {
  Real r(a.precision());
  mpfr_mul_si(r.get(), a.get(), b, MPFR_RNDN);
  return r;
}
Real operator/(const Real& a, long b) {
  Real r(a.precision());
  mpfr_div_si(r.get(), a.get(), b, MPFR_RNDN);
  return r;
}
Real operator+(long a, const Real& b) { return b + a; }
Real operator-(long a, const Real& b) {
  Real r(b.precision());
  mpfr_si_sub(r.get(), a, b.get(), MPFR_RNDN);
  return r;
}
Real operator*(long a, const Real& b) { return b * a; }
Real operator/(long a, const Real& b) {
  Real r(b.precision());
  mpfr_si_div(r.get(), a, b.get(), MPFR_RNDN);
  return r;
}

bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.get(), b.get()) != 0; }
bool operator<=(const Real& a, const Real& b) { return mpfr_lessequal_p(a.get(), b.get()) != 0; }
bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.get(), b.get()) != 0; }
bool operator>=(const Real& a, const Real& b) { return mpfr_greaterequal_p(a.get(), b.get()) != 0; }
bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.get(), b.get()) != 0; }
bool operator!=(const Real& a, const Real& b) { return !(a == b); }
bool operator<(const Real& a, long b) { return mpfr_cmp_si(a.get(), b) < 0; }
bool operator<=(const Real& a, long b) { return mpfr_cmp_si(a.get(), b) <= 0; }
bool operator>(const Real& a, long b) { return mpfr_cmp_si(a.get(), b) > 0; }
bool operator>=(const Real& a, long b) { return mpfr_cmp_si(a.get(), b) >= 0; }
bool operator==(const Real& a, long b) { return mpfr_cmp_si(a.get(), b) == 0; }

#define AKTOWER_UNARY(name, fn)                  \
  Real name(const Real& x) {                     \
    Real r(x.precision());                       \
    fn(r.get(), x.get(), MPFR_RNDN);             \
    return r;                                    \
  }

AKTOWER_UNARY(abs, mpfr_abs)
AKTOWER_UNARY(sqrt, mpfr_sqrt)
AKTOWER_UNARY(exp, mpfr_exp)
AKTOWER_UNARY(log, mpfr_log)
AKTOWER_UNARY(log2, mpfr_log2)
AKTOWER_UNARY(tanh, mpfr_tanh)
AKTOWER_UNARY(atanh, mpfr_atanh)
AKTOWER_UNARY(cosh, mpfr_cosh)
AKTOWER_UNARY(sinh, mpfr_sinh)

#undef AKTOWER_UNARY

Real floor(const Real& x) {
  Real r(x.precision());
  mpfr_floor(r.get(), x.get());
  return r;
}

Real frac(const Real& x) {
  Real r(x.precision());
  mpfr_floor(r.get(), x.get());
  mpfr_sub(r.get(), x.get(), r.get(), MPFR_RNDN);
  return r;
}

Real pow(const Real& x, const Real& y) {
  Real r(max_bits(x, y));
  mpfr_pow(r.get(), x.get(), y.get(), MPFR_RNDN);
  return r;
}

Real pow(const Real& x, long n) {
  Real r(x.precision());
  mpfr_pow_si(r.get(), x.get(), n, MPFR_RNDN);
  return r;
}

Real ldexp(const Real& x, long e) {
  Real r(x.precision());
  mpfr_mul_2si(r.get(), x.get(), e, MPFR_RNDN);
  return r;
}

const Real& min(const Real& a, const Real& b) { return b < a ? b : a; }
const Real& max(const Real& a, const Real& b) { return a < b ? b : a; }

}  // namespace aktower
