#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aktower/real.hpp"

namespace aktower {

// coeff * base^(-exponent), kept symbolic so tail bounds of fast series stay cheap.
struct Magnitude {
  BigRational coeff{0};
  BigInt base{1};
  BigInt exponent{0};

  static Magnitude exact(const BigRational& v) { return Magnitude{v, 1, 0}; }
  static Magnitude inverse_power(const BigInt& q, const BigInt& e) { return Magnitude{1, q, e}; }
  bool is_zero() const { return coeff == 0; }
  Real log2(unsigned bits) const;  // -inf for zero
  Real value(unsigned bits) const;
  std::string to_string() const;
};

// -1, 0, 1 for a < b, undecided, a > b. Undecided only for near-ties too large
// to settle exactly.
int compare(const Magnitude& a, const Magnitude& b);
bool certainly_le(const Magnitude& a, const Magnitude& b);
bool certainly_lt(const Magnitude& a, const Magnitude& b);

struct Convergent {
  int index = 0;
  BigInt p;
  BigInt q{1};
  Magnitude upper;  // |tau - p/q| <= upper
  Magnitude lower;  // |tau - p/q| >= lower
  int side = 0;     // sign of tau - p/q; 0 when p/q is tau itself
  BigRational value() const { return BigRational(p, q); }
};

struct ScanBudget {
  int max_terms = 200;
  long max_q_bits = 1L << 20;
};

// Single-consumer iterator over approximants with strictly increasing q.
class ConvergentStream {
 public:
  virtual ~ConvergentStream() = default;
  virtual std::optional<Convergent> next() = 0;
};

// Parsed target: cf:a0,a1,...[,(period)] | series:base=b,exponents=factorial|power:c|geometric:r | rat:p/q
class Target {
 public:
  enum class Kind { continued_fraction, series, rational };
  enum class Exponents { factorial, power, geometric };

  static Target parse(std::string_view text);
  static Target from_continued_fraction(std::vector<BigInt> prefix, std::vector<BigInt> period);
  static Target from_rational(const BigRational& r);

  Kind kind() const { return kind_; }
  std::string canonical() const;
  std::unique_ptr<ConvergentStream> stream() const;
  // Approximation within 2^-bits (from a deep convergent).
  Real approximate(unsigned bits) const;

  // Series exponent e_k for k >= 1.
  BigInt series_exponent(long k) const;

 private:
  Kind kind_ = Kind::rational;
  std::vector<BigInt> prefix_, period_;
  BigInt base_{10};
  Exponents family_ = Exponents::factorial;
  long family_param_ = 0;
  BigRational rational_;
};

Target parse_target(std::string_view text);

// Stream of convergents of [a0; a1, ...]; with an empty period the expansion
// is finite and the last convergent is exact.
std::unique_ptr<ConvergentStream> convergents(std::vector<BigInt> prefix, std::vector<BigInt> period = {});

// Pulls up to the budget, stopping at the first q beyond max_q_bits.
std::vector<Convergent> take(ConvergentStream& s, const ScanBudget& budget);

std::optional<Convergent> find_liouville_certificate(ConvergentStream& s, int n, const ScanBudget& budget);
// Throws Errc::target when the budget runs out; never a proof of non-Liouville.
Convergent liouville_certificate(ConvergentStream& s, int n, const ScanBudget& budget);

// Convergents with certified |tau - p/q| <= K / q^(2 + delta).
std::vector<Convergent> diophantine_scan(ConvergentStream& s, const Real& K, const Real& delta, const ScanBudget& budget);

using LiftMap = std::function<Real(const Real&)>;

struct RotationEstimate {
  Real value;
  Real error_bar;
};

// (F^N(x) - x) / N with the standard 1/N error bar.
RotationEstimate rotation_number_estimate(const LiftMap& lift, const Real& x, long iterations);

}  // namespace aktower
