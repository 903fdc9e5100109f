#pragma once

#include <vector>

#include "aktower/real.hpp"

namespace aktower {

inline constexpr int kMaxBrunoOrder = 16;

// Multiplicities (m_1, ..., m_n) with 1*m_1 + 2*m_2 + ... + n*m_n = n.
struct BrunoTuple {
  int n = 0;
  std::vector<int> m;  // m[j - 1] is the multiplicity of the j-th derivative

  int total() const;  // m_1 + ... + m_n, the order of the outer derivative
  bool operator==(const BrunoTuple& o) const { return n == o.n && m == o.m; }
};

std::vector<BrunoTuple> enumerate_bruno_tuples(int n);
BigInt bruno_coefficient(const BrunoTuple& t);
BigInt bruno_coefficient_sum(int n);

// Truncated Taylor data of a scalar map at an anchor point, stored as plain
// derivatives: coeff(k) = f^(k)(anchor).
class Jet {
 public:
  Jet(Real anchor, std::vector<Real> derivatives);

  static Jet identity(const Real& x, int order);
  static Jet constant(const Real& x, const Real& value, int order);

  int order() const { return static_cast<int>(d_.size()) - 1; }
  const Real& anchor() const { return anchor_; }
  const Real& value() const { return d_[0]; }
  const Real& operator[](int k) const { return d_[static_cast<size_t>(k)]; }
  Real& operator[](int k) { return d_[static_cast<size_t>(k)]; }
  const std::vector<Real>& derivatives() const { return d_; }
  Jet truncated(int order) const;

 private:
  Real anchor_;
  std::vector<Real> d_;
};

// Default anchor tolerance: 2^-(precision/2) relative to max(1, |value|).
Real default_anchor_tolerance(const Real& value);

// Jet of outer∘inner at inner.anchor(); outer must be anchored at inner.value().
Jet jet_compose(const Jet& outer, const Jet& inner, int n);
Jet jet_compose(const Jet& outer, const Jet& inner, int n, const Real& tolerance);

// Jet of the inverse map at j.value(); |f'| must be at least `threshold`.
Jet jet_invert(const Jet& j, int n, const Real& threshold);
Jet jet_invert(const Jet& j, int n);

}  // namespace aktower
