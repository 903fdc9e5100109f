#include "aktower/measure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace aktower {

using nlohmann::ordered_json;

namespace {

std::string dec(const Real& x, int digits = 20) { return x.is_finite() ? x.to_decimal(digits) : "nan"; }

Real ceil_real(const Real& x) {
  Real f = floor(x);
  return f < x ? f + 1L : f;
}

const TowerStage& staircase_stage(const Tower& t, int n) {
  const TowerStage& st = t.stage(n);
  if (st.delta <= 0L) throw Error(Errc::domain, "E_" + std::to_string(n) + " needs a stage with positive delta");
  return st;
}

}  // namespace

// ---------------------------------------------------------------- distribution functions

DistributionFunction::DistributionFunction(Chain h, std::string label) : h_(std::move(h)), label_(std::move(label)) {}

DistributionFunction DistributionFunction::of(const Tower& t, int k) {
  if (!t.evaluable(k))
    throw Error(Errc::capacity, "h_" + std::to_string(k) + " has scales below the working precision");
  return DistributionFunction(t.h(k), "h_" + std::to_string(k));
}

DistributionFunction DistributionFunction::identity(unsigned bits) { return DistributionFunction(Chain(bits), "identity"); }

DistributionFunction DistributionFunction::rational_orbit(long q, const Real& delta, std::shared_ptr<const BumpProfile> bump) {
  if (q < 2) throw Error(Errc::invalid_argument, "periodic-orbit reference needs q >= 2");
  unsigned bits = bump->precision();
  auto a = std::make_shared<Staircase>(BigRational(1, q), delta, std::move(bump));
  return DistributionFunction(Chain({a}, bits), "orbit-" + std::to_string(q));
}

// ---------------------------------------------------------------- interval unions

IntervalUnion IntervalUnion::full_circle(unsigned bits) {
  IntervalUnion u;
  u.arcs_.push_back(Arc{Real(0L, bits), Real(1L, bits)});
  return u;
}

void IntervalUnion::add(const Real& a, const Real& b) {
  Real len = b - a;
  if (!(len > 0L) || len > 1L) throw Error(Errc::domain, "arc length must lie in (0, 1]");
  if (len == 1L) {
    arcs_.push_back(Arc{Real(0L, a.precision()), Real(1L, a.precision())});
  } else {
    Real a0 = frac(a);
    Real b0 = a0 + len;
    if (b0 > 1L) {
      arcs_.push_back(Arc{a0, Real(1L, a.precision())});
      arcs_.push_back(Arc{Real(0L, a.precision()), b0 - 1L});
    } else {
      arcs_.push_back(Arc{a0, b0});
    }
  }
  sorted_ = false;
}

void IntervalUnion::normalize() {
  if (sorted_) return;
  std::sort(arcs_.begin(), arcs_.end(), [](const Arc& x, const Arc& y) { return x.a < y.a; });
  std::vector<Arc> merged;
  for (auto& arc : arcs_) {
    if (!merged.empty() && arc.a <= merged.back().b) {
      if (arc.b > merged.back().b) merged.back().b = arc.b;
    } else {
      merged.push_back(std::move(arc));
    }
  }
  arcs_ = std::move(merged);
  sorted_ = true;
}

Real IntervalUnion::total_length() const {
  Real sum(0L, arcs_.empty() ? kDefaultPrecision : arcs_[0].a.precision());
  for (const auto& arc : arcs_) sum += arc.b - arc.a;
  return sum;
}

Real IntervalUnion::max_arc_length() const {
  Real best(0L, arcs_.empty() ? kDefaultPrecision : arcs_[0].a.precision());
  for (const auto& arc : arcs_) best = max(best, arc.b - arc.a);
  return best;
}

IntervalUnion IntervalUnion::intersect(const IntervalUnion& other) const {
  IntervalUnion a = *this, b = other;
  a.normalize();
  b.normalize();
  IntervalUnion out;
  size_t i = 0, j = 0;
  while (i < a.arcs_.size() && j < b.arcs_.size()) {
    const Arc& x = a.arcs_[i];
    const Arc& y = b.arcs_[j];
    const Real& lo = max(x.a, y.a);
    const Real& hi = min(x.b, y.b);
    if (lo < hi) out.arcs_.push_back(Arc{lo, hi});
    if (x.b < y.b) ++i;
    else ++j;
  }
  out.sorted_ = true;
  return out;
}

// ---------------------------------------------------------------- masses

Real measure_ball(const DistributionFunction& h, const Real& x, const Real& r) {
  if (!(r > 0L) || !(r < Real(1L, r.precision()) / 2L)) throw Error(Errc::domain, "ball radius must lie in (0, 1/2)");
  return h.lift(x + r) - h.lift(x - r);
}

Real measure_of(const DistributionFunction& h, const IntervalUnion& set) {
  IntervalUnion u = set;
  u.normalize();
  Real sum(0L, h.precision());
  for (const auto& arc : u.arcs()) sum += h.lift(arc.b) - h.lift(arc.a);
  return sum;
}

IntervalUnion::Arc e_n_arc(const Tower& t, int n, const BigInt& i) {
  const TowerStage& st = staircase_stage(t, n);
  Chain hn = t.h(n);
  Real base(BigRational(st.s * i), t.precision());
  return IntervalUnion::Arc{hn.eval_inverse(base), hn.eval_inverse(base + st.delta)};
}

IntervalUnion build_E_n(const Tower& t, int n, size_t max_arcs) {
  const TowerStage& st = staircase_stage(t, n);
  if (!t.evaluable(n)) throw Error(Errc::capacity, "E_" + std::to_string(n) + " lies below the working precision");
  BigRational inv = BigRational(1) / st.s;
  BigInt count = inv.get_num() / inv.get_den();
  if (count > static_cast<unsigned long>(max_arcs))
    throw Error(Errc::capacity, "E_" + std::to_string(n) + " has " + to_string(count) + " arcs, above the limit " +
                                    std::to_string(max_arcs));
  IntervalUnion u;
  Chain hn = t.h(n);
  long k = count.get_si();
  for (long i = 0; i < k; ++i) {
    Real base(BigRational(st.s * i), t.precision());
    Real a = hn.eval_inverse(base);
    Real b = hn.eval_inverse(base + st.delta);
    if (b - a >= 1L) return IntervalUnion::full_circle(t.precision());
    u.add(a, b);
  }
  u.normalize();
  return u;
}

IntervalUnion build_G_k(const Tower& t, int k, size_t max_arcs) {
  if (k < 1 || k > t.depth()) throw Error(Errc::bounds, "G_k needs 1 <= k <= depth");
  IntervalUnion g = build_E_n(t, k, max_arcs);
  for (int n = k + 1; n <= t.depth(); ++n) g = g.intersect(build_E_n(t, n, max_arcs));
  return g;
}

// ---------------------------------------------------------------- sampling

Real Sampler::uniform() {
  int words = static_cast<int>((bits_ + 63) / 64);
  BigInt z = 0;
  for (int w = 0; w < words; ++w) {
    z <<= 64;
    std::uint64_t v = rng_();
    z += BigInt(static_cast<unsigned long>(v >> 32)) * BigInt(4294967296UL) + BigInt(static_cast<unsigned long>(v & 0xffffffffUL));
  }
  return ldexp(Real(z, bits_), -64L * words);
}

BigInt Sampler::index(const BigInt& count) {
  if (count <= 0) throw Error(Errc::invalid_argument, "empty index range");
  size_t bits = mpz_sizeinbase(count.get_mpz_t(), 2) + 64;
  BigInt z = 0;
  for (size_t got = 0; got < bits; got += 32) {
    z <<= 32;
    z += static_cast<unsigned long>(rng_() >> 32);
  }
  return BigInt(z % count);
}

std::vector<Real> sample_E_n(const Tower& t, int n, size_t count, Sampler& sampler) {
  const TowerStage& st = staircase_stage(t, n);
  if (!t.evaluable(n)) throw Error(Errc::capacity, "E_" + std::to_string(n) + " lies below the working precision");
  BigRational inv = BigRational(1) / st.s;
  BigInt arcs = inv.get_num() / inv.get_den();
  Chain hn = t.h(n);
  Real width = min(st.delta, Real(st.s, t.precision()));
  std::vector<Real> out;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    BigInt idx = sampler.index(arcs);
    Real base(BigRational(st.s * idx), t.precision());
    out.push_back(frac(hn.eval_inverse(base + sampler.uniform() * width)));
  }
  return out;
}

std::vector<Real> sample_measure(const DistributionFunction& h, size_t count, Sampler& sampler) {
  std::vector<Real> out;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) out.push_back(frac(h.inverse(sampler.uniform())));
  return out;
}

std::vector<ScaleSpec> stage_scales(const Tower& t) {
  std::vector<ScaleSpec> out;
  unsigned bits = t.precision();
  Real half = Real(1L, bits) / 2L;
  for (int n = 2; n <= t.depth(); ++n) {
    const TowerStage& st = t.stage(n);
    if (st.identity) continue;
    if (st.delta > 0L) {
      Real r = st.delta / st.m;
      if (r < half) out.push_back(ScaleSpec{r, "r_n", n});
    }
    Real rt = pow(3L * st.M, -static_cast<long>(n));
    if (rt < half) out.push_back(ScaleSpec{rt, "r~_n", n});
  }
  std::stable_sort(out.begin(), out.end(), [](const ScaleSpec& a, const ScaleSpec& b) { return a.r > b.r; });
  return out;
}

std::vector<ScaleSpec> dyadic_scales(int from_exponent, int to_exponent, unsigned bits) {
  std::vector<ScaleSpec> out;
  for (int e = from_exponent; e <= to_exponent; ++e) out.push_back(ScaleSpec{Real::pow2(-e, bits), "dyadic", 0});
  return out;
}

// ---------------------------------------------------------------- scans

void pointwise_dim_scan(const DistributionFunction& h, const std::vector<Real>& points,
                        const std::vector<ScaleSpec>& scales, const std::string& group, DimensionReport& report) {
  unsigned bits = h.precision();
  Real floor_mass = Real::pow2(-static_cast<long>(bits) + 24, bits);
  bool any_stage = std::any_of(scales.begin(), scales.end(), [](const ScaleSpec& s) { return s.ladder != "dyadic"; });
  for (const Real& x : points) {
    PointSummary ps{x, group, std::nullopt, std::nullopt};
    for (const ScaleSpec& sc : scales) {
      ScanRow row{x, sc, measure_ball(h, x, sc.r), Real(bits), false, group};
      if (!(row.mass > floor_mass)) {
        row.flagged = true;
        mpfr_set_nan(row.ratio.get());
      } else {
        row.ratio = log(row.mass) / log(sc.r);
        if (!any_stage || sc.ladder != "dyadic") {
          if (!ps.lower || row.ratio < *ps.lower) ps.lower = row.ratio;
          if (!ps.upper || row.ratio > *ps.upper) ps.upper = row.ratio;
        }
      }
      report.rows.push_back(std::move(row));
    }
    report.points.push_back(std::move(ps));
  }
}

namespace {

// Greedy sweep on the line cut at arc `start`; gives up once `limit` is reached.
template <class Num>
Num greedy_from(const std::vector<Num>& a, const std::vector<Num>& b, size_t start, const Num& eps, const Num& limit,
                Num (*ceil_fn)(const Num&)) {
  size_t k = a.size();
  Num count = a[0] - a[0];
  Num end = a[start];
  bool started = false;
  for (size_t j = 0; j < k; ++j) {
    size_t idx = (start + j) % k;
    Num lo = a[idx], hi = b[idx];
    if (idx < start) {
      lo += 1L;
      hi += 1L;
    }
    if (started && hi <= end) continue;
    Num from = (started && end > lo) ? end : lo;
    Num need = ceil_fn((hi - from) / eps);
    count += need;
    end = from + need * eps;
    started = true;
    if (count >= limit) break;
  }
  return count;
}

double ceil_double(const double& x) { return std::ceil(x); }
Real ceil_real_fn(const Real& x) { return ceil_real(x); }

}  // namespace

BigInt min_cover_count(const IntervalUnion& set, const Real& eps) {
  if (!(eps > 0L)) throw Error(Errc::domain, "covering scale must be positive");
  IntervalUnion u = set;
  u.normalize();
  size_t k = u.size();
  if (k == 0) return 0;
  if (eps >= 1L) return 1;
  std::vector<Real> a, b;
  for (const auto& arc : u.arcs()) {
    a.push_back(arc.a);
    b.push_back(arc.b);
  }
  Real big = ceil_real(Real(static_cast<long>(k), eps.precision()) + 1L / eps) + 1L;
  size_t best_start = 0;
  if (k <= 256) {
    Real best = big;
    for (size_t i = 0; i < k; ++i) {
      Real c = greedy_from<Real>(a, b, i, eps, best, ceil_real_fn);
      if (c < best) best = c;
    }
    return best.floor_int();
  }
  // Many arcs: pick the start in double precision, then recount it exactly.
  std::vector<double> ad, bd;
  for (size_t i = 0; i < k; ++i) {
    ad.push_back(a[i].to_double());
    bd.push_back(b[i].to_double());
  }
  double e = eps.to_double(), best = big.to_double();
  for (size_t i = 0; i < k; ++i) {
    double c = greedy_from<double>(ad, bd, i, e, best, ceil_double);
    if (c < best) {
      best = c;
      best_start = i;
    }
  }
  return greedy_from<Real>(a, b, best_start, eps, big, ceil_real_fn).floor_int();
}

CoveringCurve box_counting(const IntervalUnion& set, const std::vector<Real>& eps, const std::string& label) {
  CoveringCurve c;
  c.label = label;
  std::vector<double> xs, ys;
  for (const Real& e : eps) {
    if (!(e > 0L) || !(e < 1L)) throw Error(Errc::domain, "covering scale must lie in (0, 1)");
    BigInt n = min_cover_count(set, e);
    c.points.emplace_back(e, n);
    Real logn = n > 0 ? log(Real(n, e.precision())) : Real(0L, e.precision());
    Real ratio = logn / -log(e);
    c.ratios.push_back(ratio);
    xs.push_back((-log(e)).to_double());
    ys.push_back(logn.to_double());
  }
  unsigned bits = eps.empty() ? kDefaultPrecision : eps[0].precision();
  c.fit_slope = Real(0L, bits);
  if (xs.size() == 1) {
    c.fit_slope = c.ratios[0];
  } else if (xs.size() > 1) {
    double mx = 0, my = 0;
    for (size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(ys.size());
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    c.fit_slope = Real(sxx > 0 ? sxy / sxx : 0.0, bits);
  }
  return c;
}

HolderFit holder_fit(const DistributionFunction& h, const Real& beta, const std::vector<std::pair<Real, Real>>& pairs) {
  unsigned bits = h.precision();
  HolderFit f{beta, Real(0L, bits), pairs.size(), Real(bits), Real(bits)};
  for (const auto& [x, y] : pairs) {
    Real gap = abs(y - x);
    if (gap.is_zero()) continue;
    Real ratio = abs(h.lift(y) - h.lift(x)) / pow(gap, beta);
    if (ratio > f.max_ratio) {
      f.max_ratio = ratio;
      f.worst_x = x;
      f.worst_y = y;
    }
  }
  return f;
}

std::vector<std::pair<Real, Real>> holder_pairs(const Tower& t, size_t count, Sampler& sampler, std::optional<Real> max_gap) {
  unsigned bits = t.precision();
  Real half = Real(1L, bits) / 2L;
  std::vector<int> staged;
  for (int n = 1; n <= t.depth(); ++n)
    if (t.stage(n).delta > 0L && t.evaluable(n)) staged.push_back(n);
  std::vector<std::pair<Real, Real>> out;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    std::uint64_t pick = sampler.engine()();
    Real scale = half;
    Real x = sampler.uniform();
    if (!staged.empty() && pick % 5 != 0) {
      int n = staged[(pick >> 8) % staged.size()];
      const TowerStage& st = t.stage(n);
      Real s(st.s, bits);
      Real s_prev = n > 1 ? Real(t.stage(n - 1).s, bits) : half;
      switch ((pick >> 16) % 4) {
        case 0: scale = st.delta; break;
        case 1: scale = st.delta / st.m; break;
        case 2: scale = s; break;
        default: scale = s_prev; break;
      }
      if ((pick >> 24) % 2 == 0) {
        BigRational inv = BigRational(1) / st.s;
        BigInt idx = sampler.index(inv.get_num() / inv.get_den());
        Real base(BigRational(st.s * idx), bits);
        x = frac(t.h(n).eval_inverse(base + sampler.uniform() * min(st.delta, s)));
      }
    }
    // Gap spread over two decades below the stratum scale.
    Real gap = scale * exp(-sampler.uniform() * Real(4.6, bits));
    gap = min(gap, half);
    if (max_gap && gap > *max_gap) gap = *max_gap * sampler.uniform();
    if (gap.is_zero()) gap = Real::pow2(-static_cast<long>(bits) / 2, bits);
    out.emplace_back(x, x + gap);
  }
  return out;
}

DimSummary dim_summary(const std::vector<DimensionReport>& reports) {
  if (reports.empty()) throw Error(Errc::invalid_argument, "dimension summary needs at least one report");
  unsigned bits = kDefaultPrecision;
  DimSummary s;
  bool have_point = false, have_curve = false;
  for (const auto& r : reports) {
    for (const auto& p : r.points) {
      if (!p.lower) continue;
      bits = p.lower->precision();
      if (!have_point) {
        s.lower_pointwise = *p.lower;
        s.upper_pointwise = *p.upper;
        have_point = true;
      } else {
        s.lower_pointwise = min(s.lower_pointwise, *p.lower);
        s.upper_pointwise = max(s.upper_pointwise, *p.upper);
      }
    }
    for (const auto& c : r.curves)
      for (const Real& q : c.ratios) {
        if (!have_curve) {
          s.lower_box = q;
          s.upper_box = q;
          have_curve = true;
        } else {
          s.lower_box = min(s.lower_box, q);
          s.upper_box = max(s.upper_box, q);
        }
      }
  }
  if (!have_point) throw Error(Errc::invalid_argument, "no unflagged pointwise rows to summarize");
  s.hausdorff_proxy = s.lower_pointwise;
  if (!have_curve) {
    s.lower_box = s.upper_box = Real(bits);
    mpfr_set_nan(s.lower_box.get());
    mpfr_set_nan(s.upper_box.get());
    s.notes.push_back("no covering curves: box proxies unavailable");
    s.ordering_holds = false;
  } else {
    s.ordering_holds = s.hausdorff_proxy <= s.lower_box && s.lower_box <= s.upper_box;
  }
  s.notes.push_back("finite-stage proxies along the supplied scales; not limits");
  s.notes.push_back("Hausdorff proxy = minimum over points of the lower pointwise proxy");
  return s;
}

// ---------------------------------------------------------------- drivers

DimensionReport analyze_tower(const Tower& t, const DimOptions& opt) {
  const int N = t.depth();
  DimensionReport rep;
  rep.stage = N + 1;
  auto h = DistributionFunction::of(t, N + 1);
  rep.source = h.label();
  unsigned bits = t.precision();
  Sampler sampler(opt.seed, bits);
  auto scales = stage_scales(t);
  auto dyadic = dyadic_scales(opt.dyadic_from, opt.dyadic_to, bits);
  if (t.rotation_only()) {
    // Lebesgue measure: log(2r)/log r tends to 1 only like 1 + 1/log2(r), so
    // the ladder starts deep enough for the 0.01 band.
    int from = std::min(128, static_cast<int>(bits / 2));
    int to = std::max(from, static_cast<int>(bits) - 56);
    dyadic = dyadic_scales(from, to, bits);
    rep.notes.push_back("rotation-only tower: h is the identity; dyadic ladder 2^-" + std::to_string(from) + "..2^-" +
                        std::to_string(to));
  }
  std::vector<ScaleSpec> all = scales;
  all.insert(all.end(), dyadic.begin(), dyadic.end());

  for (int n = 2; n <= N; ++n) {
    if (!(t.stage(n).delta > 0L)) continue;
    auto pts = sample_E_n(t, n, opt.points_per_stage, sampler);
    pointwise_dim_scan(h, pts, all, "E_" + std::to_string(n), rep);
  }
  auto mu_pts = sample_measure(h, opt.points_per_stage, sampler);
  pointwise_dim_scan(h, mu_pts, all, "measure", rep);

  std::vector<Real> eps;
  for (const auto& sc : scales)
    if (sc.ladder == "r_n") eps.push_back(sc.r);
  for (int e = opt.dyadic_from; e <= std::min(opt.dyadic_to, 24); ++e) eps.push_back(Real::pow2(-e, bits));
  const size_t arc_limit = size_t(1) << 16;
  for (int n = 2; n <= N; ++n) {
    try {
      rep.curves.push_back(box_counting(build_E_n(t, n, arc_limit), eps, "E_" + std::to_string(n)));
    } catch (const Error& e) {
      if (e.code() != Errc::capacity && e.code() != Errc::domain) throw;
      rep.notes.push_back("E_" + std::to_string(n) + " skipped: " + e.what());
    }
  }
  if (N >= 2) {
    try {
      rep.curves.push_back(box_counting(build_G_k(t, 2, arc_limit), eps, "G_2"));
      rep.notes.push_back("G_2 intersects E_2..E_" + std::to_string(N) + " only (finite-stage proxy)");
    } catch (const Error& e) {
      if (e.code() != Errc::capacity && e.code() != Errc::domain) throw;
      rep.notes.push_back(std::string("G_2 skipped: ") + e.what());
    }
  }
  if (t.rotation_only()) rep.curves.push_back(box_counting(IntervalUnion::full_circle(bits), eps, "circle"));
  const BigRational& beta = t.config().beta;
  if (beta > 0 && beta < 1) {
    BigRational g = gamma_of(beta);
    rep.gamma = Real(g, bits);
    Real sigma = Real(BigRational(BigRational(1) / (beta + g) - 1), bits);
    rep.sigma = min(sigma, Real(1L, bits));
    auto pairs = holder_pairs(t, opt.holder_pairs, sampler);
    rep.holder = holder_fit(h, Real(beta, bits), pairs);
  }
  return rep;
}

DimensionReport analyze_baseline(const DistributionFunction& h, const IntervalUnion& support, const DimOptions& opt,
                                 int scale_from, int scale_to, int eps_from, int eps_to) {
  DimensionReport rep;
  rep.source = h.label();
  unsigned bits = h.precision();
  Sampler sampler(opt.seed, bits);
  auto pts = sample_measure(h, opt.points_per_stage, sampler);
  pointwise_dim_scan(h, pts, dyadic_scales(scale_from, scale_to, bits), "measure", rep);
  std::vector<Real> eps;
  for (int e = eps_from; e <= eps_to; ++e) eps.push_back(Real::pow2(-e, bits));
  rep.curves.push_back(box_counting(support, eps, "support"));
  return rep;
}

// ---------------------------------------------------------------- output

std::string rows_csv(const DimensionReport& r) {
  std::ostringstream out;
  out << "group,x,ladder,stage,r,mass,ratio,flagged\n";
  for (const auto& row : r.rows)
    out << row.group << ',' << dec(row.x) << ',' << row.scale.ladder << ',' << row.scale.stage << ',' << dec(row.scale.r)
        << ',' << dec(row.mass) << ',' << (row.flagged ? std::string("nan") : dec(row.ratio, 12)) << ','
        << (row.flagged ? 1 : 0) << '\n';
  return out.str();
}

std::string curves_csv(const DimensionReport& r) {
  std::ostringstream out;
  out << "label,eps,N,ratio\n";
  for (const auto& c : r.curves)
    for (size_t i = 0; i < c.points.size(); ++i)
      out << c.label << ',' << dec(c.points[i].first) << ',' << to_string(c.points[i].second) << ','
          << dec(c.ratios[i], 12) << '\n';
  return out.str();
}

std::string report_json(const DimensionReport& r, const DimSummary& s) {
  ordered_json j;
  j["schema"] = 1;
  j["kind"] = "dimension-report";
  j["source"] = r.source;
  j["stage"] = r.stage;
  j["summary"] = {{"hausdorff_proxy", dec(s.hausdorff_proxy, 12)},
                  {"lower_pointwise", dec(s.lower_pointwise, 12)},
                  {"upper_pointwise", dec(s.upper_pointwise, 12)},
                  {"lower_box", dec(s.lower_box, 12)},
                  {"upper_box", dec(s.upper_box, 12)},
                  {"ordering_holds", s.ordering_holds},
                  {"notes", s.notes}};
  ordered_json groups = ordered_json::object();
  for (const auto& p : r.points) {
    if (!p.lower) continue;
    auto& g = groups[p.group];
    if (g.is_null()) g = {{"points", 0}, {"min_lower", dec(*p.lower, 12)}, {"max_upper", dec(*p.upper, 12)}};
    g["points"] = g["points"].get<int>() + 1;
    if (*p.lower < Real::parse(g["min_lower"].get<std::string>(), p.lower->precision())) g["min_lower"] = dec(*p.lower, 12);
    if (*p.upper > Real::parse(g["max_upper"].get<std::string>(), p.upper->precision())) g["max_upper"] = dec(*p.upper, 12);
  }
  j["groups"] = groups;
  size_t flagged = std::count_if(r.rows.begin(), r.rows.end(), [](const ScanRow& row) { return row.flagged; });
  j["flagged_rows"] = flagged;
  ordered_json curves = ordered_json::array();
  for (const auto& c : r.curves) {
    ordered_json pts = ordered_json::array();
    for (size_t i = 0; i < c.points.size(); ++i)
      pts.push_back({{"eps", dec(c.points[i].first, 12)}, {"N", to_string(c.points[i].second)}, {"ratio", dec(c.ratios[i], 12)}});
    curves.push_back({{"label", c.label}, {"fit_slope", dec(c.fit_slope, 12)}, {"points", pts}});
  }
  j["curves"] = curves;
  if (r.holder)
    j["holder"] = {{"beta", dec(r.holder->beta, 12)}, {"max_ratio", dec(r.holder->max_ratio, 12)}, {"pairs", r.holder->pairs}};
  if (r.gamma) j["gamma"] = dec(*r.gamma, 12);
  if (r.sigma) j["sigma"] = dec(*r.sigma, 12);
  j["notes"] = r.notes;
  return j.dump(2) + "\n";
}

}  // namespace aktower
