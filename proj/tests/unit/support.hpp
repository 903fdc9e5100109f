#pragma once

#include <doctest.h>

#include <random>
#include <string>

#include "aktower/real.hpp"

namespace testing {

inline aktower::Real R(const char* text, unsigned bits = 256) { return aktower::Real::parse(text, bits); }

// |a - b| <= 2^e
inline bool near(const aktower::Real& a, const aktower::Real& b, long e) {
  return aktower::abs(a - b) <= aktower::Real::pow2(e, a.precision());
}

inline bool near(const aktower::Real& a, const char* b, long e) { return near(a, R(b, a.precision()), e); }

inline std::string show(const aktower::Real& x) { return x.to_decimal(30); }

// Deterministic generator for property tests.
struct Gen {
  explicit Gen(std::uint64_t seed) : rng(seed) {}
  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }
  // Uniform in [lo, hi) with a random tail below the double resolution.
  aktower::Real real(double lo, double hi, unsigned bits = 256) {
    aktower::Real u(uniform() * (1.0 - 0x1p-40), bits);
    u += aktower::Real(uniform(), bits) * aktower::Real::pow2(-60, bits);
    return aktower::Real(lo, bits) + u * aktower::Real(hi - lo, bits);
  }
  std::mt19937_64 rng;
};

}  // namespace testing
