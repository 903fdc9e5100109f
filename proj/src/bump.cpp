#include "aktower/bump.hpp"

#include <cmath>
#include <map>
#include <tuple>

namespace aktower {

namespace {

constexpr int kDefaultCells = 256;
constexpr unsigned kGuardBits = 32;
constexpr int kKappaSamples = 8192;

// c[k] -= sum_{i=1..k} a[i] * b[k-i], then c[k] /= a[0]  (series division b = c / a)
void series_divide(const std::vector<Real>& num, const std::vector<Real>& den, std::vector<Real>& out, unsigned bits) {
  size_t n = num.size();
  out.assign(n, Real(bits));
  Real t(bits);
  for (size_t k = 0; k < n; ++k) {
    mpfr_set(out[k].get(), num[k].get(), MPFR_RNDN);
    for (size_t i = 1; i <= k; ++i) {
      mpfr_mul(t.get(), den[i].get(), out[k - i].get(), MPFR_RNDN);
      mpfr_sub(out[k].get(), out[k].get(), t.get(), MPFR_RNDN);
    }
    mpfr_div(out[k].get(), out[k].get(), den[0].get(), MPFR_RNDN);
  }
}

void series_multiply(const std::vector<Real>& a, const std::vector<Real>& b, std::vector<Real>& out, unsigned bits) {
  size_t n = a.size();
  out.assign(n, Real(bits));
  Real t(bits);
  for (size_t k = 0; k < n; ++k)
    for (size_t i = 0; i <= k; ++i) {
      mpfr_mul(t.get(), a[i].get(), b[k - i].get(), MPFR_RNDN);
      mpfr_add(out[k].get(), out[k].get(), t.get(), MPFR_RNDN);
    }
}

// Taylor coefficients of (even, odd) hyperbolic pair scaled by `rate`:
// coefficient k is rate^k/k! times `even_val` for even k and `odd_val` for odd k.
std::vector<Real> hyperbolic_series(const Real& even_val, const Real& odd_val, long rate, size_t n, unsigned bits) {
  std::vector<Real> s;
  s.reserve(n);
  Real scale(1L, bits);
  for (size_t k = 0; k < n; ++k) {
    if (k > 0) {
      scale *= rate;
      scale /= static_cast<long>(k);
    }
    s.push_back((k % 2 == 0 ? even_val : odd_val) * scale);
  }
  return s;
}

Real horner(const std::vector<Real>& a, const Real& z, unsigned bits) {
  Real acc(bits);
  if (a.empty()) return acc;
  mpfr_set(acc.get(), a.back().get(), MPFR_RNDN);
  for (size_t k = a.size() - 1; k-- > 0;) mpfr_fma(acc.get(), acc.get(), z.get(), a[k].get(), MPFR_RNDN);
  return acc;
}

// Derivatives of C*exp(-1/(1-w^2)) via phi' = q' phi and Leibniz.
std::vector<Real> bump_derivatives(const Real& norm, const Real& w, int order, unsigned bits) {
  std::vector<Real> d(static_cast<size_t>(order) + 1, Real(bits));
  Real one(1L, bits);
  if (abs(w) >= one) return d;
  Real a = one - w;  // 1 - w
  Real b = one + w;  // 1 + w
  Real e = exp(-1L / (a * b));
  d[0] = norm.with_precision(bits) * e;
  if (order == 0) return d;
  // q^(k) = -(k!/2) ((1-w)^-(k+1) + (-1)^k (1+w)^-(k+1)), k >= 1
  std::vector<Real> q(static_cast<size_t>(order) + 1, Real(bits));
  Real ia = one / a, ib = one / b;
  Real pa = ia, pb = ib;
  Real fact(1L, bits);
  for (int k = 1; k <= order; ++k) {
    pa *= ia;
    pb *= ib;
    fact *= static_cast<long>(k);
    Real term = (k % 2 == 0) ? pa + pb : pa - pb;
    q[static_cast<size_t>(k)] = -(fact * term) / 2L;
  }
  std::vector<long> binom(static_cast<size_t>(order) + 1, 0);
  binom[0] = 1;
  for (int k = 0; k < order; ++k) {
    // binom holds row k of Pascal's triangle
    for (int i = k; i >= 1; --i) binom[static_cast<size_t>(i)] += binom[static_cast<size_t>(i - 1)];
    Real sum(bits);
    for (int i = 0; i <= k; ++i) sum += q[static_cast<size_t>(i + 1)] * d[static_cast<size_t>(k - i)] * binom[static_cast<size_t>(i)];
    d[static_cast<size_t>(k + 1)] = sum;
  }
  return d;
}

}  // namespace

std::shared_ptr<const Mollifier> Mollifier::get(unsigned bits, int cells) {
  if (cells <= 0) cells = kDefaultCells;
  static std::mutex mutex;
  static std::map<std::pair<unsigned, int>, std::shared_ptr<const Mollifier>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_pair(bits, cells);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto m = std::make_shared<const Mollifier>(bits, cells);
  cache.emplace(key, m);
  return m;
}

Mollifier::Mollifier(unsigned bits, int cells)
    : bits_(bits),
      work_bits_(bits + kGuardBits),
      cells_(cells),
      half_width_(bits + kGuardBits),
      cell_width_(bits + kGuardBits),
      norm_(bits) {
  if (cells < 8 || cells % 2 != 0) throw Error(Errc::invalid_argument, "mollifier cell count must be even and at least 8");
  if (bits < kMinPrecision) throw Error(Errc::precision, "precision below 64 bits");
  build();
}

void Mollifier::build() {
  const unsigned wb = work_bits_;
  const long target_bits = static_cast<long>(bits_) + 48;
  // Beyond |v| = acosh(sqrt(target * ln 2)) the density is below 2^-target.
  Real cosh_limit = sqrt(Real(target_bits, wb) * Real::ln2(wb));
  mpfr_acosh(half_width_.get(), cosh_limit.get(), MPFR_RNDU);
  const int half_cells = cells_ / 2;
  cell_width_ = half_width_ / static_cast<long>(half_cells);
  Real radius = cell_width_ / 2L;
  // Coefficients of the density are bounded by 1.3 * 2^k on this strip, so each
  // term gains log2(1/(2*radius)) bits.
  double gain = -std::log2(2.0 * radius.to_double());
  if (gain < 1.0) throw Error(Errc::precision, "mollifier cells too wide for the requested precision");
  order_ = static_cast<int>(std::ceil(static_cast<double>(target_bits + 8) / gain)) + 4;
  const size_t n = static_cast<size_t>(order_);
  Real tol = Real::pow2(-target_bits, wb);

  centers_.clear();
  cdf_coeffs_.assign(static_cast<size_t>(half_cells), {});
  moment_coeffs_.assign(static_cast<size_t>(half_cells), {});
  std::vector<Real> S, Q, W, F, Sh, Ch, P, Mden;
  for (int j = 0; j < half_cells; ++j) {
    Real c = -half_width_ + cell_width_ * static_cast<long>(j) + radius;
    centers_.push_back(c);
    Real c2 = c * 2L;
    Real sh2 = sinh(c2), ch2 = cosh(c2), sh1 = sinh(c), ch1 = cosh(c);
    // w = exp(-cosh^2 v) satisfies w' = -sinh(2v) w.
    S = hyperbolic_series(sh2, ch2, 2, n, wb);
    W.assign(n, Real(wb));
    W[0] = exp(-(ch1 * ch1));
    Real t(wb);
    for (size_t k = 0; k + 1 < n; ++k) {
      Real acc(wb);
      for (size_t i = 0; i <= k; ++i) {
        mpfr_mul(t.get(), S[i].get(), W[k - i].get(), MPFR_RNDN);
        mpfr_add(acc.get(), acc.get(), t.get(), MPFR_RNDN);
      }
      W[k + 1] = -acc / static_cast<long>(k + 1);
    }
    // cosh^2 v = (1 + cosh 2v)/2
    Q = hyperbolic_series(ch2, sh2, 2, n, wb);
    for (auto& q : Q) q /= 2L;
    Q[0] += Real(1L, wb) / 2L;
    series_divide(W, Q, F, wb);  // density in v
    Sh = hyperbolic_series(sh1, ch1, 1, n, wb);
    Ch = hyperbolic_series(ch1, sh1, 1, n, wb);
    series_multiply(F, Sh, P, wb);
    series_divide(P, Ch, Mden, wb);  // tanh(v) * density
    auto& cf = cdf_coeffs_[static_cast<size_t>(j)];
    auto& mf = moment_coeffs_[static_cast<size_t>(j)];
    cf.clear();
    mf.clear();
    for (size_t k = 0; k < n; ++k) {
      cf.push_back(F[k] / static_cast<long>(k + 1));
      mf.push_back(Mden[k] / static_cast<long>(k + 1));
    }
    // The last two terms must already be negligible on the cell.
    Real zk = pow(radius, static_cast<long>(n - 2));
    for (size_t k = n - 2; k < n; ++k) {
      if (abs(cf[k]) * zk > tol || abs(mf[k]) * zk > tol)
        throw Error(Errc::precision, "mollifier series did not converge to the requested precision");
      zk *= radius;
    }
    // Trim trailing coefficients that cannot affect the result.
    auto trim = [&](std::vector<Real>& a) {
      Real zpow = pow(radius, static_cast<long>(a.size()));
      while (a.size() > 1) {
        zpow /= radius;
        if (abs(a.back()) * zpow * radius > tol) break;
        a.pop_back();
      }
    };
    trim(cf);
    trim(mf);
  }

  // Accumulate values at the cell centres, starting from -half_width.
  cdf_at_center_.assign(static_cast<size_t>(half_cells), Real(wb));
  moment_at_center_.assign(static_cast<size_t>(half_cells), Real(wb));
  Real minus_r = -radius;
  Real cdf_run(wb), mom_run(wb);
  for (int j = 0; j < half_cells; ++j) {
    const auto& cf = cdf_coeffs_[static_cast<size_t>(j)];
    const auto& mf = moment_coeffs_[static_cast<size_t>(j)];
    // Integral from the left edge to the centre is -(integral from centre to left edge).
    cdf_run -= minus_r * horner(cf, minus_r, wb);
    mom_run -= minus_r * horner(mf, minus_r, wb);
    cdf_at_center_[static_cast<size_t>(j)] = cdf_run;
    moment_at_center_[static_cast<size_t>(j)] = mom_run;
    cdf_run += radius * horner(cf, radius, wb);
    mom_run += radius * horner(mf, radius, wb);
  }
  // cdf_run is now the mass of [-inf, 0]; the density is even.
  Real total = cdf_run * 2L;
  Real scale = Real(1L, wb) / total;
  norm_ = scale.with_precision(bits_);
  for (int j = 0; j < half_cells; ++j) {
    cdf_at_center_[static_cast<size_t>(j)] *= scale;
    moment_at_center_[static_cast<size_t>(j)] *= scale;
    for (auto& a : cdf_coeffs_[static_cast<size_t>(j)]) a *= scale;
    for (auto& a : moment_coeffs_[static_cast<size_t>(j)]) a *= scale;
  }
}

void Mollifier::cdf_and_moment(const Real& w, Real& cdf, Real& moment) const {
  cdf = Real(bits_);
  moment = Real(bits_);
  if (w <= -1L) return;
  if (w >= 1L) {
    cdf = Real(1L, bits_);
    return;
  }
  Real v = atanh(w.with_precision(work_bits_));
  bool mirrored = v.sign() > 0;
  if (mirrored) v = -v;
  if (v < -half_width_) {
    if (mirrored) cdf = Real(1L, bits_);
    return;
  }
  Real pos = (v + half_width_) / cell_width_;
  long j = static_cast<long>(std::floor(pos.to_double()));
  const long last = static_cast<long>(centers_.size()) - 1;
  if (j < 0) j = 0;
  if (j > last) j = last;
  size_t k = static_cast<size_t>(j);
  Real z = v - centers_[k];
  Real c = cdf_at_center_[k] + z * horner(cdf_coeffs_[k], z, work_bits_);
  Real m = moment_at_center_[k] + z * horner(moment_coeffs_[k], z, work_bits_);
  if (mirrored) c = 1L - c;
  cdf = c.with_precision(bits_);
  moment = m.with_precision(bits_);
}

Real Mollifier::cdf(const Real& w) const {
  Real c(bits_), m(bits_);
  cdf_and_moment(w, c, m);
  return c;
}

Real Mollifier::ramp(const Real& w) const {
  if (w <= -1L) return Real(bits_);
  if (w >= 1L) return w.with_precision(bits_);
  Real c(bits_), m(bits_);
  cdf_and_moment(w, c, m);
  return w * c - m;
}

Real Mollifier::density(const Real& w) const { return bump_derivatives(norm_, w.with_precision(bits_), 0, bits_)[0]; }

std::vector<Real> Mollifier::density_derivatives(const Real& w, int order) const {
  return bump_derivatives(norm_, w.with_precision(bits_), order, bits_);
}

void validate(const BumpParams& p) {
  if (!(p.epsilon > 0) || p.epsilon > BigRational(1, 4))
    throw Error(Errc::invalid_argument, "bump plateau epsilon must lie in (0, 1/4]");
  if (!(p.eta > 0) || !(p.eta < p.epsilon))
    throw Error(Errc::invalid_argument, "mollifier radius eta must lie in (0, epsilon)");
  if (p.max_order < 1 || p.max_order > kMaxBrunoOrder)
    throw Error(Errc::invalid_argument, "bump max order must lie in [1, 16]");
  if (p.quadrature_cells < 0 || (p.quadrature_cells > 0 && (p.quadrature_cells < 8 || p.quadrature_cells % 2 != 0)))
    throw Error(Errc::invalid_argument, "quadrature cell count must be 0 or an even number >= 8");
}

BumpProfile::BumpProfile(const BumpParams& params, unsigned bits)
    : params_(params), bits_(bits), eps_(bits), eta_(bits), slope_(bits) {
  validate(params_);
  eps_ = Real(params_.epsilon, bits);
  eta_ = Real(params_.eta, bits);
  slope_ = Real(1L / (1L - BigRational(2) * params_.epsilon), bits);
  BigRational e = params_.epsilon, h = params_.eta;
  knots_ = {Real(e - h, bits), Real(e + h, bits), Real(1 - e - h, bits), Real(1 - e + h, bits)};
  moll_ = Mollifier::get(bits, params_.quadrature_cells);
  kappa_cache_.resize(kMaxBrunoOrder + 1);
}

std::shared_ptr<const BumpProfile> BumpProfile::make(const BumpParams& params, unsigned bits) {
  static std::mutex mutex;
  static std::map<std::tuple<std::string, std::string, int, int, unsigned>, std::shared_ptr<const BumpProfile>> cache;
  auto key = std::make_tuple(to_string(params.epsilon), to_string(params.eta), params.quadrature_cells, params.max_order, bits);
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto p = std::make_shared<const BumpProfile>(params, bits);
  std::lock_guard<std::mutex> lock(mutex);
  return cache.emplace(key, p).first->second;
}

BumpProfile::Zone BumpProfile::zone(const Real& x) const {
  if (x <= knots_[0]) return Zone::low_flat;
  if (x < knots_[1]) return Zone::rise;
  if (x <= knots_[2]) return Zone::linear;
  if (x < knots_[3]) return Zone::settle;
  return Zone::high_flat;
}

Real BumpProfile::knot_value(int i) const {
  switch (i) {
    case 0: return Real(bits_);
    case 1: return eta_ * slope_;
    case 2: return 1L - eta_ * slope_;
    default: return Real(1L, bits_);
  }
}

Real BumpProfile::eval(const Real& x) const {
  if (x < 0L || x > 1L) throw Error(Errc::domain, "bump argument outside [0, 1]: " + x.to_decimal(20));
  switch (zone(x)) {
    case Zone::low_flat: return Real(bits_);
    case Zone::high_flat: return Real(1L, bits_);
    case Zone::linear: return (x - eps_) * slope_;
    case Zone::rise: return eta_ * slope_ * moll_->ramp((x - eps_) / eta_);
    case Zone::settle: {
      Real w2 = (x - 1L + eps_) / eta_;
      return slope_ * ((x - eps_) - eta_ * moll_->ramp(w2));
    }
  }
  return Real(bits_);
}

void BumpProfile::eval3(const Real& x, Real& g0, Real& g1, Real& g2) const {
  if (x < 0L || x > 1L) throw Error(Errc::domain, "bump argument outside [0, 1]: " + x.to_decimal(20));
  g1 = Real(bits_);
  g2 = Real(bits_);
  switch (zone(x)) {
    case Zone::low_flat: g0 = Real(bits_); return;
    case Zone::high_flat: g0 = Real(1L, bits_); return;
    case Zone::linear:
      g0 = (x - eps_) * slope_;
      g1 = slope_;
      return;
    case Zone::rise: {
      Real w = (x - eps_) / eta_;
      Real c(bits_), m(bits_);
      moll_->cdf_and_moment(w, c, m);
      g0 = eta_ * slope_ * (w * c - m);
      g1 = slope_ * c;
      g2 = slope_ * moll_->density(w) / eta_;
      return;
    }
    case Zone::settle: {
      Real w = (x - 1L + eps_) / eta_;
      Real c(bits_), m(bits_);
      moll_->cdf_and_moment(w, c, m);
      g0 = slope_ * ((x - eps_) - eta_ * (w * c - m));
      g1 = slope_ * (1L - c);
      g2 = -(slope_ * moll_->density(w) / eta_);
      return;
    }
  }
}

Jet BumpProfile::jet(const Real& x, int n) const {
  if (n < 0 || n > params_.max_order)
    throw Error(Errc::bounds, "bump jet order " + std::to_string(n) + " above the configured maximum");
  std::vector<Real> d(static_cast<size_t>(n) + 1, Real(bits_));
  Zone z = zone(x);
  d[0] = eval(x);
  if (n >= 1) {
    if (z == Zone::linear) d[1] = slope_;
    if (z == Zone::rise) d[1] = slope_ * moll_->cdf((x - eps_) / eta_);
    if (z == Zone::settle) d[1] = slope_ * (1L - moll_->cdf((x - 1L + eps_) / eta_));
  }
  if (n >= 2 && (z == Zone::rise || z == Zone::settle)) {
    Real w = (z == Zone::rise) ? (x - eps_) / eta_ : (x - 1L + eps_) / eta_;
    auto phi = moll_->density_derivatives(w, n - 2);
    Real scale = slope_ / eta_;  // eta^(1-k) * slope for k = 2
    if (z == Zone::settle) scale = -scale;
    for (int k = 2; k <= n; ++k) {
      d[static_cast<size_t>(k)] = phi[static_cast<size_t>(k - 2)] * scale;
      scale /= eta_;
    }
  }
  return Jet(x, std::move(d));
}

Real BumpProfile::kappa(int n) const {
  if (n < 0 || n > kMaxBrunoOrder) throw Error(Errc::bounds, "kappa order " + std::to_string(n) + " out of range");
  std::lock_guard<std::mutex> lock(kappa_mutex_);
  auto& slot = kappa_cache_[static_cast<size_t>(n)];
  if (!slot) slot = std::make_unique<Real>(kappa_uncached(n));
  return *slot;
}

Real BumpProfile::kappa_uncached(int n) const {
  if (n == 0) return Real(2L, bits_);
  if (n == 1) return slope_ + 1L;
  // On the rise zone g^(n) = eta^(1-n) * slope * phi^(n-2)(w); the settle zone
  // mirrors it, and |phi^(j)| is even in w, so sampling w in [0, 1) suffices.
  unsigned pk = std::min(bits_, 128u);
  Real norm = moll_->normalization().with_precision(pk);
  Real max_a(pk), max_b(pk);
  for (int i = 0; i < kKappaSamples; ++i) {
    Real w = Real(static_cast<long>(i), pk) / static_cast<long>(kKappaSamples);
    auto d = bump_derivatives(norm, w, n - 1, pk);
    Real a = abs(d[static_cast<size_t>(n - 2)]);
    Real b = abs(d[static_cast<size_t>(n - 1)]);
    if (a > max_a) max_a = a;
    if (b > max_b) max_b = b;
  }
  Real slack = max_b / static_cast<long>(2 * kKappaSamples);
  Real bound = (max_a + slack) * slope_.with_precision(pk) * pow(eta_.with_precision(pk), static_cast<long>(1 - n));
  return (bound + 1L).with_precision(bits_);
}

Real eval_g(const BumpProfile& p, const Real& x) { return p.eval(x); }
Jet g_jet(const BumpProfile& p, const Real& x, int n) { return p.jet(x, n); }
Real kappa_bound(const BumpProfile& p, int n) { return p.kappa(n); }

}  // namespace aktower
