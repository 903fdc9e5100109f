#pragma once

#include <memory>
#include <vector>

#include "aktower/bump.hpp"

namespace aktower {

struct DerivativeRange {
  Real min;
  Real max;
};

// A grid maximum together with a Lipschitz-slack upper bound.
struct NormEstimate {
  Real estimate;
  Real bound;
};

// Constants of the staircase norm law: kappa_n from the bump, xi_n from the
// inverse-derivative recursion, rho_n = max(kappa_0..kappa_n, xi_n).
struct StaircaseConstants {
  std::vector<Real> kappa;
  std::vector<Real> xi;
  std::vector<Real> rho;
};

StaircaseConstants staircase_constants(const BumpProfile& bump, int max_n);

// Period-s circle diffeomorphism A = Id + a with a of period s: on [0, delta]
// A(t) = t + (s - 2 delta) g(t/delta); on [delta, s] it is the reflection
// A(t) = s - G(s - t) where G inverts the first piece.
class Staircase {
 public:
  Staircase(const BigRational& s, const Real& delta, std::shared_ptr<const BumpProfile> bump);

  const BigRational& s() const { return s_; }
  const BigInt& period_count() const { return count_; }
  const Real& s_real() const { return s_real_; }
  const Real& delta() const { return delta_; }
  const BumpProfile& bump() const { return *bump_; }
  std::shared_ptr<const BumpProfile> bump_ptr() const { return bump_; }
  unsigned precision() const { return bits_; }

  // Lift evaluation: valid for every real x, with A(x + 1) = A(x) + 1.
  Real eval(const Real& x) const;
  Real eval_inverse(const Real& y) const;
  Jet jet(const Real& x, int n) const;
  Jet inverse_jet(const Real& y, int n) const;
  Real derivative(const Real& x) const;

  // Pieces on one period. left: [0, delta] -> [0, s - delta]; G is its inverse.
  Real left(const Real& t) const;
  Jet left_jet(const Real& t, int n) const;
  Real left_inverse(const Real& y) const;
  Real local(const Real& t) const;          // t in [0, s]
  Real local_inverse(const Real& y) const;  // y in [0, s]

  // 1 + (s - 2 delta)/delta * max g', the largest slope of A (attained).
  Real max_slope() const;
  DerivativeRange derivative_range(int samples = 4096) const;
  NormEstimate norm(int n, int samples = 1024) const;
  // rho_n / delta^(n^2)
  Real norm_bound(int n) const;

 private:
  // Splits x = k*s + t with integer k and t in [0, s).
  void reduce(const Real& x, Real& k_over_n, Real& t) const;
  Real solve_left(const Real& y) const;  // u in [0, 1] with u + sigma g(u) = y/delta
  Real solve_rise(const Real& z) const;  // w in [-1, 1] with w + lambda ramp(w) = z
  Real solve_rise_far(const Real& z, const Real& tol) const;

  BigRational s_;
  BigInt count_;
  unsigned bits_;
  Real s_real_;
  Real delta_;
  Real sigma_;   // (s - 2 delta)/delta
  Real lambda_;  // sigma * slope
  std::shared_ptr<const BumpProfile> bump_;
  std::vector<Real> knot_y_;  // u + sigma g(u) at the bump knots
};

Staircase build_staircase(const BigRational& s, const Real& delta, std::shared_ptr<const BumpProfile> bump);
Real eval_A(const Staircase& st, const Real& x);
Real eval_A_inv(const Staircase& st, const Real& y);
Jet staircase_jet(const Staircase& st, const Real& x, int n);
NormEstimate staircase_norm(const Staircase& st, int n);
DerivativeRange derivative_range(const Staircase& st);

}  // namespace aktower
