#include "aktower/staircase.hpp"

#include <optional>
#include <string>

namespace aktower {

namespace {

constexpr int kRootIterations = 400;

Real clamp01(const Real& u) {
  if (u.sign() < 0) return Real(u.precision());
  if (u > 1L) return Real(1L, u.precision());
  return u;
}

// Sample abscissae in u = t/delta: the flat and linear zones contribute
// constant derivatives, so one point each suffices; the curved zones are dense.
std::vector<Real> norm_grid(const BumpProfile& bump, int samples) {
  unsigned bits = bump.precision();
  std::vector<Real> u;
  u.emplace_back(0L, bits);
  for (int zone = 0; zone < 2; ++zone) {
    const Real& lo = bump.knot(2 * zone);
    const Real& hi = bump.knot(2 * zone + 1);
    Real step = (hi - lo) / static_cast<long>(samples - 1);
    for (int i = 0; i < samples; ++i) u.push_back(lo + step * static_cast<long>(i));
    if (zone == 0) u.push_back(Real(BigRational(1, 2), bits));
  }
  u.emplace_back(1L, bits);
  return u;
}

}  // namespace

StaircaseConstants staircase_constants(const BumpProfile& bump, int max_n) {
  if (max_n < 0 || max_n > kMaxBrunoOrder) throw Error(Errc::bounds, "staircase constant order out of range");
  unsigned bits = bump.precision();
  StaircaseConstants c;
  for (int n = 0; n <= max_n; ++n) c.kappa.push_back(bump.kappa(n));
  for (int n = 0; n <= max_n; ++n) {
    if (n <= 1) {
      // G <= 1 and 0 < G' <= 1 because A' >= 1 on the first piece.
      c.xi.emplace_back(1L, bits);
      continue;
    }
    Real prod(1L, bits);
    for (int j = 1; j <= n; ++j) prod *= pow(c.kappa[static_cast<size_t>(j)], static_cast<long>(n));
    Real others(BigInt(bruno_coefficient_sum(n) - 1), bits);  // every tuple except m_1 = n
    Real candidate = others * c.xi.back() * prod;
    c.xi.push_back(max(c.xi.back(), candidate));
  }
  Real running(bits);
  for (int n = 0; n <= max_n; ++n) {
    running = max(running, c.kappa[static_cast<size_t>(n)]);
    c.rho.push_back(max(running, c.xi[static_cast<size_t>(n)]));
  }
  return c;
}

Staircase::Staircase(const BigRational& s, const Real& delta, std::shared_ptr<const BumpProfile> bump)
    : s_(s), bits_(bump ? bump->precision() : kDefaultPrecision), s_real_(bits_), delta_(bits_), sigma_(bits_),
      lambda_(bits_), bump_(std::move(bump)) {
  if (!bump_) throw Error(Errc::construction, "staircase needs a bump profile");
  s_.canonicalize();
  if (s_ <= 0 || s_ > BigRational(1, 2) || s_.get_num() != 1)
    throw Error(Errc::construction, "staircase period s = " + to_string(s_) + " is not 1/N for an integer N >= 2");
  count_ = s_.get_den();
  s_real_ = Real(s_, bits_);
  delta_ = delta.with_precision(bits_);
  if (delta_.sign() <= 0) throw Error(Errc::construction, "staircase width delta must be positive");
  if (!(delta_ * 2L < s_real_))
    throw Error(Errc::construction, "staircase width delta = " + delta_.to_decimal(20) + " is not below s/2");
  sigma_ = (s_real_ - delta_ * 2L) / delta_;
  lambda_ = sigma_ * bump_->slope();
  for (int i = 0; i < 4; ++i) knot_y_.push_back(bump_->knot(i) + sigma_ * bump_->knot_value(i));
}

void Staircase::reduce(const Real& x, Real& k_over_n, Real& t) const {
  Real n(count_, bits_);
  Real y = x.with_precision(bits_) * n;
  Real k = floor(y);
  k_over_n = k / n;
  t = (y - k) / n;
}

Real Staircase::left(const Real& t) const {
  Real u = clamp01(t.with_precision(bits_) / delta_);
  return t + (s_real_ - delta_ * 2L) * bump_->eval(u);
}

Jet Staircase::left_jet(const Real& t, int n) const {
  Real tt = t.with_precision(bits_);
  Real u = clamp01(tt / delta_);
  Jet g = bump_->jet(u, n);
  Real rise = s_real_ - delta_ * 2L;
  std::vector<Real> d;
  d.reserve(static_cast<size_t>(n) + 1);
  d.push_back(tt + rise * g[0]);
  Real scale = rise;
  for (int j = 1; j <= n; ++j) {
    scale /= delta_;
    Real v = scale * g[j];
    if (j == 1) v += 1L;
    d.push_back(std::move(v));
  }
  return Jet(tt, std::move(d));
}

// z >= 1: the gap z - w stays above z - 1, so plain Newton in w is well scaled.
Real Staircase::solve_rise_far(const Real& z, const Real& tol) const {
  const Mollifier& moll = bump_->mollifier();
  Real a(-1L, bits_);
  Real b(1L, bits_);
  Real w = (a + b) / 2L;
  Real c(bits_), m(bits_);
  for (int it = 0; it < kRootIterations; ++it) {
    moll.cdf_and_moment(w, c, m);
    Real r = w * c - m;
    Real d = z - w;
    Real next(bits_);
    if (r.sign() <= 0) {
      a = w;
      next = (a + b) / 2L;
    } else {
      Real res = log(lambda_ * r) - log(d);
      if (res.sign() > 0)
        b = w;
      else
        a = w;
      Real step = res / (c / r + 1L / d);
      if (abs(step) <= tol) return w - step;
      next = w - step;
      if (!(next > a && next < b)) next = (a + b) / 2L;
    }
    if (abs(next - w) <= tol || b - a <= tol) return next;
    w = next;
  }
  throw Error(Errc::numeric, "staircase inverse did not converge for z = " + z.to_decimal(20));
}

Real Staircase::solve_rise(const Real& z) const {
  const Mollifier& moll = bump_->mollifier();
  Real one(1L, bits_);
  Real b = min(one, z);
  if (!(b > -1L)) return Real(-1L, bits_);
  Real tiny = Real::pow2(-static_cast<long>(bits_) - 4, bits_);
  if (lambda_ * moll.ramp(b) <= tiny) return b;
  Real tol = Real::pow2(-static_cast<long>(bits_) + 6, bits_);
  if (z >= one) return solve_rise_far(z, tol);
  // Unknown L = log(z - w). g(L) = log(lambda ramp(z - e^L)) - L is decreasing
  // and has slope near -1 where the gap z - w is tiny, which is where Newton
  // in w itself stalls (the root can sit within 2^-400 of z).
  Real c(bits_), m(bits_);
  auto g = [&](const Real& L, Real& slope) -> std::optional<Real> {
    Real e = exp(L);
    Real w = z - e;
    moll.cdf_and_moment(w, c, m);
    Real r = w * c - m;
    if (r.sign() <= 0) return std::nullopt;  // below the support: g = -infinity
    slope = -(c / r) * e - 1L;
    return log(lambda_ * r) - L;
  };
  Real hi = log(z + 1L);
  Real lo = log(lambda_ * moll.ramp(b)) - 1L;
  Real slope(bits_);
  // widen the low end until g > 0 there
  for (int i = 0; i < 64; ++i) {
    auto v = g(lo, slope);
    if (v && v->sign() > 0) break;
    lo -= Real(1L, bits_) + abs(lo);
  }
  Real L = lo;
  for (int it = 0; it < kRootIterations; ++it) {
    auto v = g(L, slope);
    Real next(bits_);
    if (!v) {
      hi = L;
      next = (lo + hi) / 2L;
    } else {
      if (v->sign() > 0) lo = L;
      else hi = L;
      Real step = *v / slope;
      next = L - step;
      if (abs(step) * exp(L) <= tol) return z - exp(next);
      if (!(next > lo && next < hi)) next = (lo + hi) / 2L;
    }
    if ((hi - lo) * exp(hi) <= tol) return z - exp(next);
    L = next;
  }
  throw Error(Errc::numeric, "staircase inverse did not converge for z = " + z.to_decimal(20));
}

Real Staircase::solve_left(const Real& y) const {
  Real Y = y.with_precision(bits_) / delta_;
  const Real& eps = bump_->epsilon();
  const Real& eta = bump_->eta();
  if (Y <= knot_y_[0]) return clamp01(Y);
  if (Y >= knot_y_[3]) return clamp01(Y - sigma_);
  if (Y >= knot_y_[1] && Y <= knot_y_[2]) return (Y + sigma_ * eps * bump_->slope()) / (1L + lambda_);
  if (Y < knot_y_[1]) return eps + eta * solve_rise((Y - eps) / eta);
  // Settle zone: with u' = 1 - u the equation becomes the rise equation for 1 + sigma - Y.
  Real mirrored = 1L + sigma_ - Y;
  return 1L - (eps + eta * solve_rise((mirrored - eps) / eta));
}

Real Staircase::left_inverse(const Real& y) const { return solve_left(y) * delta_; }

Real Staircase::local(const Real& t) const {
  if (t <= delta_) return left(t);
  return s_real_ - left_inverse(s_real_ - t);
}

Real Staircase::local_inverse(const Real& y) const {
  if (y <= s_real_ - delta_) return left_inverse(y);
  return s_real_ - left(s_real_ - y);
}

Real Staircase::eval(const Real& x) const {
  Real base(bits_), t(bits_);
  reduce(x, base, t);
  return base + local(t);
}

Real Staircase::eval_inverse(const Real& y) const {
  Real base(bits_), t(bits_);
  reduce(y, base, t);
  return base + local_inverse(t);
}

Jet Staircase::jet(const Real& x, int n) const {
  Real base(bits_), t(bits_);
  reduce(x, base, t);
  std::vector<Real> d;
  if (t <= delta_) {
    d = left_jet(t, n).derivatives();
    d[0] += base;
  } else {
    Real tl = left_inverse(s_real_ - t);
    Jet inv = jet_invert(left_jet(tl, n), n);
    d = inv.derivatives();
    d[0] = base + s_real_ - tl;
    for (int j = 2; j <= n; j += 2) d[static_cast<size_t>(j)] = -d[static_cast<size_t>(j)];
  }
  return Jet(x.with_precision(bits_), std::move(d));
}

Jet Staircase::inverse_jet(const Real& y, int n) const {
  Real base(bits_), t(bits_);
  reduce(y, base, t);
  std::vector<Real> d;
  if (t <= s_real_ - delta_) {
    Real tl = left_inverse(t);
    d = jet_invert(left_jet(tl, n), n).derivatives();
    d[0] = base + tl;
  } else {
    Jet j = left_jet(s_real_ - t, n);
    d = j.derivatives();
    d[0] = base + s_real_ - j[0];
    for (int k = 2; k <= n; k += 2) d[static_cast<size_t>(k)] = -d[static_cast<size_t>(k)];
  }
  return Jet(y.with_precision(bits_), std::move(d));
}

Real Staircase::derivative(const Real& x) const { return jet(x, 1)[1]; }

Real Staircase::max_slope() const { return 1L + lambda_; }

DerivativeRange Staircase::derivative_range(int samples) const {
  if (samples < 2) throw Error(Errc::invalid_argument, "derivative range needs at least two samples");
  auto grid = norm_grid(*bump_, samples / 2 + 1);
  Real hi(1L, bits_);
  Real prev_d2(bits_);
  Real slack(bits_);
  for (size_t i = 0; i < grid.size(); ++i) {
    Jet j = left_jet(grid[i] * delta_, 2);
    if (j[1] > hi) hi = j[1];
    if (i > 0) {
      Real gap = (grid[i] - grid[i - 1]) * delta_;
      Real s = max(abs(j[2]), abs(prev_d2)) * gap / 2L;
      if (s > slack) slack = s;
    }
    prev_d2 = j[2];
  }
  // g' never exceeds the ramp slope, so the largest slope is attained on the
  // linear zone and the slack cannot push past it; on [delta, s] A' = 1/A'(left).
  // lo >= 1 always, so the reflected piece supplies the minimum 1/top.
  Real top = min(hi + slack, max_slope());
  return DerivativeRange{1L / top, top};
}

NormEstimate Staircase::norm(int n, int samples) const {
  if (n < 0) throw Error(Errc::bounds, "norm order must be non-negative");
  if (n + 1 > bump_->params().max_order)
    throw Error(Errc::bounds, "norm order " + std::to_string(n) + " needs jets above the bump's max order");
  Real one(1L, bits_);
  NormEstimate out{one, one};  // |A|, |A^-1| <= 1 on [0, 1]
  if (n == 0) return out;
  if (samples < 2) throw Error(Errc::invalid_argument, "norm scan needs at least two samples");
  auto grid = norm_grid(*bump_, samples);
  const int order = n + 1;
  std::vector<Jet> fwd, inv;
  fwd.reserve(grid.size());
  inv.reserve(grid.size());
  for (const Real& u : grid) {
    fwd.push_back(left_jet(u * delta_, order));
    inv.push_back(jet_invert(fwd.back(), order));
  }
  auto scan = [&](const std::vector<Jet>& jets, auto position) {
    for (size_t p = 0; p < jets.size(); ++p) {
      for (int i = 1; i <= n; ++i) {
        Real v = abs(jets[p][i]);
        if (v > out.estimate) out.estimate = v;
        Real b = v;
        for (size_t q : {p == 0 ? p : p - 1, p + 1 < jets.size() ? p + 1 : p}) {
          if (q == p) continue;
          Real gap = abs(position(q) - position(p)) / 2L;
          Real lip = max(abs(jets[p][i + 1]), abs(jets[q][i + 1]));
          Real cand = v + lip * gap;
          if (cand > b) b = cand;
        }
        if (b > out.bound) out.bound = b;
      }
    }
  };
  scan(fwd, [&](size_t q) { return fwd[q].anchor(); });
  scan(inv, [&](size_t q) { return inv[q].anchor(); });
  return out;
}

Real Staircase::norm_bound(int n) const {
  auto c = staircase_constants(*bump_, n);
  return c.rho[static_cast<size_t>(n)] / pow(delta_, static_cast<long>(n) * n);
}

Staircase build_staircase(const BigRational& s, const Real& delta, std::shared_ptr<const BumpProfile> bump) {
  return Staircase(s, delta, std::move(bump));
}

Real eval_A(const Staircase& st, const Real& x) { return st.eval(x); }
Real eval_A_inv(const Staircase& st, const Real& y) { return st.eval_inverse(y); }
Jet staircase_jet(const Staircase& st, const Real& x, int n) { return st.jet(x, n); }
NormEstimate staircase_norm(const Staircase& st, int n) { return st.norm(n); }
DerivativeRange derivative_range(const Staircase& st) { return st.derivative_range(); }

}  // namespace aktower
