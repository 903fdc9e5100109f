#pragma once

#include <memory>
#include <mutex>
#include <vector>

#include "aktower/jet.hpp"
#include "aktower/real.hpp"

namespace aktower {

// The normalized bump C*exp(-1/(1-t^2)) on [-1, 1] with tabulated integrals.
// Immutable after construction; instances are shared per (precision, cells).
class Mollifier {
 public:
  static std::shared_ptr<const Mollifier> get(unsigned bits, int cells = 0);

  Mollifier(unsigned bits, int cells);

  unsigned precision() const { return bits_; }
  int cells() const { return cells_; }
  int taylor_order() const { return order_; }
  const Real& normalization() const { return norm_; }

  // cdf(w) = integral of the density over [-1, w]; moment(w) likewise for t*density.
  void cdf_and_moment(const Real& w, Real& cdf, Real& moment) const;
  Real cdf(const Real& w) const;
  // Integral of cdf over [-1, w]: 0 left of the support, w right of it.
  Real ramp(const Real& w) const;
  Real density(const Real& w) const;
  // density and its derivatives up to `order` at w (all zero outside (-1, 1)).
  std::vector<Real> density_derivatives(const Real& w, int order) const;

 private:
  void build();
  unsigned bits_;
  unsigned work_bits_;
  int cells_;
  int order_ = 0;
  Real half_width_;   // tabulated range is [-half_width_, 0] in v = atanh(t)
  Real cell_width_;
  Real norm_;
  std::vector<Real> centers_;
  std::vector<Real> cdf_at_center_;
  std::vector<Real> moment_at_center_;
  std::vector<std::vector<Real>> cdf_coeffs_;     // cdf(c + z) = cdf(c) + z * sum a_k z^k
  std::vector<std::vector<Real>> moment_coeffs_;
};

struct BumpParams {
  BigRational epsilon{1, 8};
  BigRational eta{1, 16};
  int quadrature_cells = 0;  // 0 picks a default from the precision
  int max_order = 10;
};

void validate(const BumpParams& p);

// The smooth step g: 0 on [0, eps-eta], 1 on [1-eps+eta, 1], linear in the
// middle, obtained by mollifying the clamped ramp on [eps, 1-eps].
class BumpProfile {
 public:
  enum class Zone { low_flat, rise, linear, settle, high_flat };

  BumpProfile(const BumpParams& params, unsigned bits);
  static std::shared_ptr<const BumpProfile> make(const BumpParams& params, unsigned bits);

  const BumpParams& params() const { return params_; }
  unsigned precision() const { return bits_; }
  const Real& epsilon() const { return eps_; }
  const Real& eta() const { return eta_; }
  const Real& slope() const { return slope_; }  // 1/(1-2eps)
  const Mollifier& mollifier() const { return *moll_; }
  // Zone boundaries eps-eta, eps+eta, 1-eps-eta, 1-eps+eta.
  const Real& knot(int i) const { return knots_[static_cast<size_t>(i)]; }

  Zone zone(const Real& x) const;
  Real eval(const Real& x) const;
  // g, g', g'' in one pass (used by the staircase root finder).
  void eval3(const Real& x, Real& g0, Real& g1, Real& g2) const;
  Jet jet(const Real& x, int n) const;
  // Exact value of g at the knots: 0, eta*slope, 1-eta*slope, 1.
  Real knot_value(int i) const;

  // Upper bound for max|g^(n)| + 1 (cached).
  Real kappa(int n) const;

 private:
  Real kappa_uncached(int n) const;

  BumpParams params_;
  unsigned bits_;
  Real eps_, eta_, slope_;
  std::vector<Real> knots_;
  std::shared_ptr<const Mollifier> moll_;
  mutable std::mutex kappa_mutex_;
  mutable std::vector<std::unique_ptr<Real>> kappa_cache_;
};

Real eval_g(const BumpProfile& p, const Real& x);
Jet g_jet(const BumpProfile& p, const Real& x, int n);
Real kappa_bound(const BumpProfile& p, int n);

}  // namespace aktower
