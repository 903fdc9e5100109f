// Acceptance gate: one line per criterion, exit status 0 only if all pass.
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "aktower/jet.hpp"
#include "aktower/measure.hpp"
#include "aktower/tower.hpp"
#include "aktower/tower_io.hpp"
#include "aktower/verify.hpp"

using namespace aktower;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string sci(const Real& x) { return x.to_decimal(4); }

Real circle_gap(const Real& a, const Real& b) {
  Real d = frac(a - b);
  return min(d, 1L - d);
}

TowerConfig relaxed(long cap, int stages, unsigned bits = 256) {
  TowerConfig c;
  c.q_cap = BigInt(cap);
  c.max_stage = stages;
  c.precision = bits;
  return c;
}

TowerConfig half_beta() {
  TowerConfig c = relaxed(1000000, 2);
  c.beta = BigRational(1, 2);
  return c;
}

const Tower& cap1000() {
  static const Tower t = build_tower(relaxed(1000, 3));
  return t;
}

const Tower& half_tower() {
  static const Tower t = build_tower(half_beta());
  return t;
}

Outcome bell_numbers() {
  const long bell[] = {1, 2, 5, 15, 52, 203, 877, 4140};
  Outcome o;
  for (int n = 1; n <= 8; ++n) {
    BigInt got = bruno_coefficient_sum(n);
    if (got != bell[n - 1]) {
      o.pass = false;
      o.detail += "n=" + std::to_string(n) + " gave " + got.get_str() + "; ";
    }
  }
  if (o.pass) o.detail = "1, 2, 5, 15, 52, 203, 877, 4140";
  return o;
}

Outcome staircase_anchors() {
  Outcome o;
  const unsigned bits = 256;
  auto bump = BumpProfile::make(BumpParams{}, bits);
  Real worst_anchor(0L, bits), worst_inv(0L, bits);
  Sampler sampler(2, bits);
  for (long den : {2L, 4L, 8L}) {
    BigRational s(1, den);
    Real sr(s, bits), d = sr / 8L;
    Staircase A(s, d, bump);
    worst_anchor = max(worst_anchor, abs(A.eval(Real(0L, bits))));
    worst_anchor = max(worst_anchor, abs(A.eval(d) - (sr - d)));
    worst_anchor = max(worst_anchor, abs(A.eval(sr) - sr));
    Real lo = d / (2L * sr), hi = 2L * sr / d;
    for (int i = 0; i < 10000; ++i) {
      Real x = sampler.uniform();
      Real dv = A.derivative(x);
      if (dv < lo || dv > hi) {
        o.pass = false;
        o.detail += "A' = " + sci(dv) + " outside range at s=1/" + std::to_string(den) + "; ";
        break;
      }
      if (i % 10 == 0) {
        worst_inv = max(worst_inv, abs(A.eval_inverse(A.eval(x)) - x));
        worst_inv = max(worst_inv, abs(A.eval(A.eval_inverse(x)) - x));
      }
    }
  }
  if (worst_anchor > Real::pow2(-200, bits)) o.pass = false;
  if (worst_inv >= Real::pow2(-120, bits)) o.pass = false;
  o.detail += "anchor error " + sci(worst_anchor) + " (< 2^-200), inverse residual " + sci(worst_inv) +
              " (< 2^-120), 3 x 10^4 slope samples";
  return o;
}

Real identity_defect(const Jet& id, int order) {
  Real worst = abs(id[1] - 1L);
  for (int k = 2; k <= order; ++k) worst = max(worst, abs(id[k]));
  return worst;
}

Outcome jet_inversion() {
  const unsigned bits = 256;
  const int order = 8;
  Jet e(Real(0L, bits), std::vector<Real>(order + 1, Real(1L, bits)));
  Real worst = identity_defect(jet_compose(jet_invert(e, order), e, order), order);
  auto bump = BumpProfile::make(BumpParams{}, bits);
  Staircase A(BigRational(1, 4), Real(BigRational(1, 32), bits), bump);
  Sampler sampler(3, bits);
  for (int i = 0; i < 20; ++i) {
    Jet j = A.jet(sampler.uniform(), order);
    worst = max(worst, identity_defect(jet_compose(jet_invert(j, order), j, order), order));
  }
  return {worst < Real::pow2(-100, bits), "largest coefficient error " + sci(worst) + " (< 2^-100), order 8"};
}

Outcome norm_law() {
  Outcome o;
  int checks = 0;
  for (const TowerConfig& cfg : {relaxed(1000, 2), half_beta()}) {
    Tower t = build_tower(cfg);
    auto consts = staircase_constants(*t.bump(), 4);
    const TowerStage& st = t.stage(2);
    for (int n = 1; n <= 4; ++n) {
      NormEstimate est = staircase_norm(*st.A, n);
      Real law = consts.rho[static_cast<size_t>(n)] / pow(st.delta, static_cast<long>(n) * n);
      ++checks;
      if (!(est.estimate <= law) || !(est.bound <= law)) {
        o.pass = false;
        o.detail += "||A_2||_" + std::to_string(n) + " = " + sci(est.estimate) + " > " + sci(law) + "; ";
      }
      Real hn = chain_norm(t.h(2), n, 32);
      Real lhs = chain_norm(t.h(3), n, 32);
      Real rhs = compose_norm_constant(hn, n, consts) / pow(st.delta, static_cast<long>(n) * n);
      ++checks;
      if (!(lhs <= rhs)) {
        o.pass = false;
        o.detail += "||A_2 o h_2||_" + std::to_string(n) + " = " + sci(lhs) + " > " + sci(rhs) + "; ";
      }
    }
  }
  o.detail += std::to_string(checks) + " norm comparisons on two 2-stage towers, n = 1..4";
  return o;
}

Outcome relaxed_scaling() {
  Outcome o;
  Tower t = build_tower(relaxed(1000000, 3, 512));
  const unsigned bits = t.precision();
  auto h = DistributionFunction::of(t, t.depth() + 1);
  Sampler sampler(5, bits);
  for (int n = 2; n <= 3; ++n) {
    const TowerStage& st = t.stage(n);
    Real r = st.delta / st.m;
    Real rt = 1L / pow(3L * t.M(n), static_cast<long>(n));
    Real upper = Real(2L, bits) / static_cast<long>(n) + Real(BigRational(1, 10), bits);
    Real lower = 1L - Real(1L, bits) / static_cast<long>(n) - Real(BigRational(1, 20), bits);
    auto pts = sample_E_n(t, n, 1000, sampler);
    long good = 0;
    Real worst_rt(2L, bits);
    for (const Real& x : pts) {
      Real ratio = log(measure_ball(h, x, r)) / log(r);
      if (ratio <= upper) ++good;
      worst_rt = min(worst_rt, log(measure_ball(h, x, rt)) / log(rt));
    }
    double share = static_cast<double>(good) / static_cast<double>(pts.size());
    bool ok = share >= 0.95 && worst_rt >= lower;
    o.pass = o.pass && ok;
    char buf[200];
    std::snprintf(buf, sizeof buf, "n=%d: %.1f%% at r_n below %s, min at r~_n %s (>= %s); ", n, 100 * share,
                  upper.to_decimal(4).c_str(), worst_rt.to_decimal(4).c_str(), lower.to_decimal(4).c_str());
    o.detail += buf;
  }
  return o;
}

Outcome measure_bounds() {
  Outcome o;
  const int n = 2;
  {
    const Tower& t = cap1000();
    unsigned bits = t.precision();
    Real mu = measure_of(DistributionFunction::of(t, 3), build_E_n(t, n));
    Real bound = 1L - Real(BigRational(5, 4), bits);
    o.pass = mu >= bound;
    o.detail = "beta=0: " + sci(mu) + " >= " + sci(bound);
  }
  {
    // cap 1000: E_2 has 900 arcs (the cap-10^6 tower has 9 x 10^6)
    TowerConfig c = half_beta();
    c.q_cap = BigInt(1000);
    const Tower t = build_tower(c);
    unsigned bits = t.precision();
    BigRational beta = t.config().beta;
    Real sigma = min(Real(BigRational(BigRational(1) / (beta + gamma_of(beta)) - 1), bits), Real(1L, bits));
    Real mu = measure_of(DistributionFunction::of(t, 3), build_E_n(t, n));
    Real bound = 1L - 5L * pow(Real(2L, bits), -(sigma * static_cast<long>(n)));
    o.pass = o.pass && mu >= bound;
    o.detail += "; beta=1/2: " + sci(mu) + " >= " + sci(bound) + " (sigma " + sci(sigma) + ")";
  }
  return o;
}

Outcome holder() {
  Outcome o;
  const Tower& t = half_tower();
  unsigned bits = t.precision();
  Real b(t.config().beta, bits);
  Sampler sampler(7, bits);
  auto pairs = holder_pairs(t, 10000, sampler);
  HolderFit fit = holder_fit(DistributionFunction::of(t, 3), b, pairs);
  o.pass = fit.max_ratio <= 3L;
  o.detail = "max ratio " + sci(fit.max_ratio) + " over " + std::to_string(fit.pairs) + " pairs (<= 3)";
  for (int n = 2; n <= 3; ++n) {
    Real gap(t.stage(n - 1).s, bits);
    auto near_pairs = holder_pairs(t, 2000, sampler, gap);
    HolderFit f = holder_fit(DistributionFunction::of(t, n), b, near_pairs);
    o.pass = o.pass && f.max_ratio <= 1L;
    o.detail += "; h_" + std::to_string(n) + " within s_" + std::to_string(n - 1) + ": " + sci(f.max_ratio) + " (<= 1)";
  }
  return o;
}

Outcome rotation_number() {
  Outcome o;
  Tower t = build_tower(relaxed(1000, 3, 128));
  const unsigned bits = t.precision();
  const long N = 100000;
  Real tau(t.stage(3).tau(), bits);
  Real worst(0L, bits);
  Sampler sampler(8, bits);
  for (int i = 0; i < 10; ++i) {
    auto est = rotation_number_estimate([&](const Real& x) { return t.lift_f(3, x); }, sampler.uniform(), N);
    worst = max(worst, abs(est.value - tau));
  }
  Real bar = Real(1L, bits) / N;
  o.pass = worst <= bar;
  o.detail = "max |rho - tau_3| " + sci(worst) + " (<= 1/N = " + sci(bar) + ")";

  const Tower& toy = cap1000();
  const unsigned tb = toy.precision();
  Real resid(0L, tb);
  Sampler s2(9, tb);
  for (int n = 2; n <= toy.depth(); ++n) {
    const TowerStage& st = toy.stage(n);
    for (int i = 0; i < 5; ++i) {
      Real x = s2.uniform(), y = x;
      for (long k = 0; k < st.q.get_si(); ++k) y = toy.lift_f(n, y);
      resid = max(resid, abs(y - x - Real(st.p, tb)));
    }
  }
  o.pass = o.pass && resid < Real::pow2(-100, tb);
  o.detail += "; |F^q(x) - x - p| " + sci(resid) + " (< 2^-100, q <= 100)";
  return o;
}

Outcome commutation() {
  Outcome o;
  const Tower& t = cap1000();
  const unsigned bits = t.precision();
  Real worst(0L, bits);
  Sampler sampler(10, bits);
  for (int n = 2; n <= t.depth(); ++n) {
    const TowerStage& st = t.stage(n);
    if (!is_integer(BigRational(st.tau() / st.s))) {
      o.pass = false;
      o.detail += "tau_" + std::to_string(n) + "/s_" + std::to_string(n) + " not an integer; ";
    }
    Real tau(st.tau(), bits);
    for (int i = 0; i < 1000; ++i) {
      Real x = sampler.uniform();
      worst = max(worst, circle_gap(st.A->eval(frac(x + tau)), st.A->eval(x) + tau));
    }
  }
  o.pass = o.pass && worst < Real::pow2(-100, bits);
  o.detail += "max defect " + sci(worst) + " (< 2^-100), tau_n/s_n integral";
  return o;
}

Outcome box_counts() {
  Outcome o;
  const Tower geometric = build_tower([] {
    TowerConfig c = relaxed(1000, 3);
    c.target = "series:base=2,exponents=geometric:2";
    return c;
  }());
  for (const Tower* t : {&cap1000(), &geometric}) {
    IntervalUnion g2 = build_G_k(*t, 2);
    for (int n = 2; n <= t->depth(); ++n) {
      const TowerStage& st = t->stage(n);
      BigInt N = min_cover_count(g2, st.delta / st.m);
      BigInt cap = BigInt(1 / st.s);
      o.pass = o.pass && N <= cap;
      o.detail += "N(G_2, r_" + std::to_string(n) + ") = " + N.get_str() + " <= " + cap.get_str() + "; ";
    }
  }
  const unsigned bits = 256;
  std::vector<Real> eps;
  for (int e = 4; e <= 24; ++e) eps.push_back(Real::pow2(-e, bits));
  CoveringCurve leb = box_counting(IntervalUnion::full_circle(bits), eps, "circle");
  IntervalUnion atoms;
  for (long i = 0; i < 7; ++i) {
    Real a = Real(BigRational(i, 7), bits);
    atoms.add(a, a + Real::pow2(-100, bits));
  }
  atoms.normalize();
  CoveringCurve point = box_counting(atoms, eps, "orbit");
  o.pass = o.pass && abs(leb.fit_slope - 1L) <= Real(BigRational(1, 100), bits) &&
           abs(point.fit_slope) <= Real(BigRational(1, 20), bits);
  o.detail += "Lebesgue slope " + sci(leb.fit_slope) + ", periodic-orbit slope " + sci(point.fit_slope);
  return o;
}

Outcome baselines() {
  Outcome o;
  DimOptions opt;
  opt.points_per_stage = 32;
  {
    const unsigned bits = 256;
    auto id = DistributionFunction::identity(bits);
    DimensionReport r = analyze_baseline(id, IntervalUnion::full_circle(bits), opt, 128, 200, 4, 20);
    Real lo(2L, bits), hi(-1L, bits);
    for (const auto& p : r.points) {
      if (!p.lower || !p.upper) {
        o.pass = false;
        continue;
      }
      lo = min(lo, *p.lower);
      hi = max(hi, *p.upper);
    }
    Real tol(BigRational(1, 100), bits);
    o.pass = o.pass && !r.points.empty() && abs(lo - 1L) <= tol && abs(hi - 1L) <= tol;
    o.detail = "identity proxy in [" + sci(lo) + ", " + sci(hi) + "] (1 +/- 0.01)";
  }
  {
    const unsigned bits = 512;
    Real delta = Real::pow2(-400, bits);
    auto orbit = DistributionFunction::rational_orbit(10, delta, BumpProfile::make(BumpParams{}, bits));
    IntervalUnion atoms;
    for (long i = 0; i < 10; ++i) {
      Real a = Real(BigRational(i, 10), bits);
      atoms.add(a, a + delta);
    }
    atoms.normalize();
    DimensionReport r = analyze_baseline(orbit, atoms, opt, 128, 200, 10, 60);
    Real hi(0L, bits);
    for (const auto& p : r.points) {
      if (!p.upper) {
        o.pass = false;
        continue;
      }
      hi = max(hi, *p.upper);
    }
    Real box = abs(r.curves.front().fit_slope);
    Real tol(BigRational(1, 20), bits);
    o.pass = o.pass && !r.points.empty() && hi <= tol && box <= tol;
    o.detail += "; period-10 orbit proxy <= " + sci(hi) + ", box slope " + sci(box) + " (<= 0.05)";
  }
  return o;
}

Outcome determinism() {
  const Tower& t = cap1000();
  VerifyOptions opt;
  opt.seed = 12;
  VerifyReport a = verify_tower(t, opt);
  VerifyReport b = verify_tower(t, opt);
  Tower back = tower_from_json(tower_to_json(t, false));
  VerifyReport c = verify_tower(back, opt);
  std::string ja = a.json(false), jb = b.json(false), jc = c.json(false);
  bool same = ja == jb && ja == jc && a.text() == b.text() && a.text() == c.text();
  return {same && a.ok(), std::to_string(ja.size()) + "-byte reports identical across two runs and a reload" +
                              std::string(a.ok() ? "" : "; verify reported failures")};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "Bell sums of Bruno coefficients", 1, bell_numbers},
      {2, "staircase anchors, slopes, inverse", 30, staircase_anchors},
      {3, "jet inversion to order 8", 30, jet_inversion},
      {4, "staircase and composition norm law", 120, norm_law},
      {5, "relaxed beta=0 local scaling", 600, relaxed_scaling},
      {6, "measure of E_n", 60, measure_bounds},
      {7, "Hoelder bounds for beta=1/2", 120, holder},
      {8, "rotation number and periodicity", 120, rotation_number},
      {9, "commutation with the rotation", 30, commutation},
      {10, "box counting", 60, box_counts},
      {11, "identity and periodic-orbit baselines", 60, baselines},
      {12, "verify determinism", 600, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool in_time = secs < c.budget_s;
    bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("criterion %2d %s  %s: %s [%.2f s of %.0f s]\n", c.id, pass ? "PASS" : "FAIL", c.name, o.detail.c_str(),
                secs, c.budget_s);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
