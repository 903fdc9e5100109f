#include "aktower/verify.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "aktower/measure.hpp"
#include "aktower/tower_io.hpp"

namespace aktower {

namespace {

std::string d6(const Real& x) { return x.is_finite() ? x.to_decimal(6) : "nan"; }

class Suite {
 public:
  explicit Suite(VerifyReport& r) : r_(r) {}
  void add(std::string name, CheckStatus s, std::string detail) {
    r_.results.push_back(InvariantResult{std::move(name), s, std::move(detail)});
  }
  void check(std::string name, bool ok, std::string detail) {
    add(std::move(name), ok ? CheckStatus::pass : CheckStatus::fail, std::move(detail));
  }
  // Runs a check body, turning library errors into a failed (or skipped) entry.
  template <class F>
  void guarded(const std::string& name, F&& body) {
    try {
      body();
    } catch (const Error& e) {
      add(name, e.code() == Errc::capacity ? CheckStatus::skip : CheckStatus::fail, std::string("error: ") + e.what());
    }
  }

 private:
  VerifyReport& r_;
};

std::string stage_name(int n, const std::string& what) { return "stage " + std::to_string(n) + ": " + what; }

bool usable(const TowerStage& st, unsigned bits) {
  return st.A && !st.identity && st.delta >= Real::pow2(-static_cast<long>(bits / 2), bits);
}

Real circle_gap(const Real& a, const Real& b) {
  Real d = frac(a - b);
  Real other = 1L - d;
  return min(d, other);
}

void check_parameters(const Tower& t, Suite& s) {
  unsigned bits = t.precision();
  const BigRational& beta = t.config().beta;
  Real tol = Real::pow2(-static_cast<long>(bits / 2), bits);
  for (const auto& st : t.stages()) {
    const int n = st.n;
    if (n == 1) {
      if (beta == 0 || beta == 1) {
        s.check(stage_name(n, "s_1 = 1/2"), st.s == BigRational(1, 2), "s_1 = " + to_string(st.s));
      } else {
        Real expect = derive_delta(beta, 1, st.s, st.m, bits);
        s.check(stage_name(n, "delta_1 = s_1^(1/(beta+gamma))"), abs(expect - st.delta) <= tol * expect,
                "delta_1 = " + d6(st.delta) + ", formula " + d6(expect));
      }
    } else {
      const TowerStage& prev = t.stage(n - 1);
      BigRational expect = prev.s / st.q;
      expect.canonicalize();
      s.check(stage_name(n, "s_n = s_n-1/q_n"), st.s == expect,
              "s_n = " + to_string(st.s) + ", s_n-1/q_n = " + to_string(expect));
      if (!st.identity) {
        Real formula = derive_delta(beta, n, st.s, st.m, bits);
        s.check(stage_name(n, "delta_n formula"), abs(formula - st.delta) <= tol * formula,
                "delta_n = " + d6(st.delta) + ", formula " + d6(formula));
      }
    }
    s.check(stage_name(n, "1/s_n integer"), is_integer(BigRational(1 / st.s)), "1/s_n = " + to_string(BigRational(1 / st.s)));
    BigRational ratio = st.tau() / st.s;
    ratio.canonicalize();
    s.check(stage_name(n, "tau_n/s_n integer"), is_integer(ratio), is_integer(ratio) ? "integer" : to_string(ratio));
    if (!st.identity)
      s.check(stage_name(n, "delta_n < s_n/2"), st.delta < Real(st.s, bits) / 2L,
              "delta_n = " + d6(st.delta) + ", s_n/2 = " + d6(Real(st.s, bits) / 2L));
    s.check(stage_name(n, "s_n <= 2^-n"), Real(st.s, bits) <= Real::pow2(-n, bits), "s_n = " + d6(Real(st.s, bits)));
    s.check(stage_name(n, "M_n >= 1 >= m_n > 0"), st.M >= 1L && st.m <= 1L && st.m > 0L,
            "M_n = " + d6(st.M) + ", m_n = " + d6(st.m));
    if (!st.identity) {
      if (!st.A) {
        s.check(stage_name(n, "staircase parameters"), false, "no staircase accepts s_n = " + to_string(st.s) +
                                                                   ", delta_n = " + d6(st.delta));
        continue;
      }
      Real top = st.A->max_slope();
      Real slack = 1L + tol;
      const Real& Mn1 = t.M(n + 1);
      const Real& mn1 = t.m(n + 1);
      s.check(stage_name(n, "M_n+1 <= M_n max A_n' <= M_n 2 s_n/delta_n"),
              Mn1 <= st.M * top * slack && top <= 2L * Real(st.s, bits) / st.delta,
              "M_n+1 = " + d6(Mn1) + ", M_n max A' = " + d6(st.M * top));
      s.check(stage_name(n, "m_n+1 >= m_n / max A_n' >= m_n delta_n/(2 s_n)"), mn1 * slack >= st.m / top,
              "m_n+1 = " + d6(mn1) + ", m_n/max A' = " + d6(st.m / top));
    }
    if (n >= 2 && !t.rotation_only()) {
      size_t held = static_cast<size_t>(std::count_if(st.conditions.begin(), st.conditions.end(),
                                                      [](const ConditionCheck& c) { return c.holds; }));
      bool complete = true;
      for (const char* id : {"(i)", "(ii)", "(iii)"})
        complete = complete && std::any_of(st.conditions.begin(), st.conditions.end(),
                               [&](const ConditionCheck& c) { return c.id.rfind(id, 0) == 0; });
      std::string detail = std::to_string(held) + " of " + std::to_string(st.conditions.size()) + " conditions hold";
      if (t.config().mode == TowerMode::strict) s.check(stage_name(n, "condition report all-pass (strict)"), complete && held == st.conditions.size(), detail);
      else s.check(stage_name(n, "condition report complete (relaxed)"), complete, detail);
    }
  }
}

void check_staircases(const Tower& t, const VerifyOptions& opt, Suite& s) {
  unsigned bits = t.precision();
  Sampler sampler(opt.seed, bits);
  Real anchor_tol = Real::pow2(-static_cast<long>(bits) + 56, bits);
  Real comm_tol = Real::pow2(-static_cast<long>(bits / 2), bits);
  auto consts = staircase_constants(*t.bump(), 4);
  for (const auto& st : t.stages()) {
    if (st.identity || !st.A) continue;
    const int n = st.n;
    if (!usable(st, bits)) {
      s.add(stage_name(n, "staircase evaluations"), CheckStatus::skip, "delta_n below 2^-(precision/2); parameter checks only");
      continue;
    }
    const Staircase& A = *st.A;
    s.guarded(stage_name(n, "staircase anchors"), [&] {
      Real s_r = A.s_real();
      Real e0 = abs(A.eval(Real(0L, bits)));
      Real e1 = abs(A.eval(A.delta()) - (s_r - A.delta()));
      Real e2 = abs(A.eval(s_r) - s_r);
      Real worst = max(e0, max(e1, e2));
      s.check(stage_name(n, "staircase anchors"), worst <= anchor_tol, "max anchor error " + d6(worst));
    });
    s.guarded(stage_name(n, "A_n' within [delta/(2s), 2s/delta]"), [&] {
      Real lo = A.delta() / (2L * A.s_real()), hi = 2L * A.s_real() / A.delta();
      bool ok = true;
      Real seen_lo = hi, seen_hi = lo;
      for (int i = 0; i < opt.samples; ++i) {
        Real x = sampler.uniform() * A.s_real();
        Real d = A.derivative(x);
        seen_lo = min(seen_lo, d);
        seen_hi = max(seen_hi, d);
        if (d < lo || d > hi) ok = false;
      }
      s.check(stage_name(n, "A_n' within [delta/(2s), 2s/delta]"), ok, "sampled range [" + d6(seen_lo) + ", " + d6(seen_hi) + "]");
    });
    s.guarded(stage_name(n, "commutation A_n(x + tau_n) = A_n(x) + tau_n"), [&] {
      Real tau(st.tau(), bits);
      Real worst(0L, bits);
      for (int i = 0; i < opt.samples; ++i) {
        Real x = sampler.uniform();
        worst = max(worst, circle_gap(A.eval(frac(x + tau)), A.eval(x) + tau));
      }
      s.check(stage_name(n, "commutation A_n(x + tau_n) = A_n(x) + tau_n"), worst < comm_tol, "max deviation " + d6(worst));
    });
    for (int k = 1; k <= 3; ++k) {
      std::string name = stage_name(n, "norm law ||A_n||_" + std::to_string(k) + " <= rho_k/delta^(k^2)");
      s.guarded(name, [&] {
        Real est = A.norm(k, 256).estimate;
        Real bound = consts.rho[static_cast<size_t>(k)] / pow(A.delta(), static_cast<long>(k) * k);
        s.check(name, est <= bound, "estimate " + d6(est) + ", bound " + d6(bound));
      });
    }
  }
}

void check_conjugacies(const Tower& t, const VerifyOptions& opt, Suite& s) {
  unsigned bits = t.precision();
  const int N = t.depth();
  Sampler sampler(opt.seed + 1, bits);
  Real tol = Real::pow2(-static_cast<long>(bits / 2), bits);
  if (!t.evaluable(N + 1)) {
    s.add("h_N+1 evaluations", CheckStatus::skip, "scales below 2^-(precision/2); strict towers are checked at parameter level");
    return;
  }
  std::vector<Real> xs;
  for (int i = 0; i < opt.samples; ++i) xs.push_back(sampler.uniform());

  s.guarded("h_N+1 roundtrip", [&] {
    Chain h = t.h(N + 1);
    Real worst(0L, bits);
    for (const Real& x : xs) worst = max(worst, abs(h.eval_inverse(h.eval(x)) - x));
    s.check("h_N+1 roundtrip", worst < tol, "max |h^-1(h(x)) - x| = " + d6(worst));
  });

  for (int n = 1; n <= N; ++n) {
    const TowerStage& st = t.stage(n);
    if (st.identity) continue;
    std::string name = stage_name(n, "|h_n+1 - h_n| <= s_n and |h_n+1^-1 - h_n^-1| <= s_n/m_n");
    s.guarded(name, [&] {
      Chain a = t.h(n), b = t.h(n + 1);
      Real fwd(0L, bits), inv(0L, bits);
      for (const Real& x : xs) {
        fwd = max(fwd, abs(b.eval(x) - a.eval(x)));
        inv = max(inv, abs(b.eval_inverse(x) - a.eval_inverse(x)));
      }
      Real s_n(st.s, bits);
      s.check(name, fwd <= s_n && inv <= s_n / st.m, "max gaps " + d6(fwd) + ", " + d6(inv) + " vs " + d6(s_n) + ", " + d6(s_n / st.m));
    });
    if (n + 1 <= N) {
      std::string deep = stage_name(n, "|h_N+1 - h_n| <= 2 s_n");
      s.guarded(deep, [&] {
        Chain a = t.h(n), b = t.h(N + 1);
        Real gap(0L, bits);
        for (const Real& x : xs) gap = max(gap, abs(b.eval(x) - a.eval(x)));
        s.check(deep, gap <= 2L * Real(st.s, bits), "max gap " + d6(gap));
      });
    }
  }

  s.guarded("rotation number of f_N", [&] {
    const TowerStage& st = t.stage(N);
    Real tau(st.tau(), bits);
    Real worst(0L, bits);
    Real bar(bits);
    for (int i = 0; i < 3; ++i) {
      auto est = rotation_number_estimate([&](const Real& x) { return t.lift_f(N, x); }, xs[static_cast<size_t>(i)],
                                          opt.rotation_iterations);
      worst = max(worst, abs(est.value - tau));
      bar = est.error_bar;
    }
    s.check("rotation number of f_N", worst <= bar, "max |estimate - tau_N| = " + d6(worst) + ", allowed " + d6(bar));
  });
}

void check_measure(const Tower& t, const VerifyOptions& opt, Suite& s) {
  unsigned bits = t.precision();
  const int N = t.depth();
  const BigRational& beta = t.config().beta;
  if (t.rotation_only() || !t.evaluable(N + 1)) return;
  auto h = DistributionFunction::of(t, N + 1);
  Real sigma(1L, bits);
  if (beta > 0) sigma = min(Real(BigRational(BigRational(1) / (beta + gamma_of(beta)) - 1), bits), Real(1L, bits));
  for (int n = 2; n <= N; ++n) {
    const TowerStage& st = t.stage(n);
    if (st.identity || !(st.delta > 0L)) continue;
    std::string name = stage_name(n, beta == 0 ? "mu(E_n) >= 1 - 5/2^n" : "mu(E_n) >= 1 - 5/2^(n sigma)");
    s.guarded(name, [&] {
      IntervalUnion e = build_E_n(t, n, opt.arc_limit);
      Real mu = measure_of(h, e);
      Real bound = 1L - 5L * pow(Real(2L, bits), -(sigma * static_cast<long>(n)));
      s.check(name, mu >= bound, "mu = " + d6(mu) + ", bound " + d6(bound));
      Real r_n = st.delta / st.m;
      s.check(stage_name(n, "E_n arcs = 1/s_n, each <= r_n"),
              BigRational(static_cast<unsigned long>(e.size())) <= BigRational(1 / st.s) &&
                  e.max_arc_length() <= r_n * (1L + Real::pow2(-static_cast<long>(bits / 2), bits)),
              std::to_string(e.size()) + " arcs, longest " + d6(e.max_arc_length()) + ", r_n " + d6(r_n));
      Real growth = measure_of(DistributionFunction::of(t, n + 1), e);
      Real expect = Real(BigRational(1), bits) - st.delta / Real(st.s, bits);
      s.check(stage_name(n, "growth of h_n+1 over E_n = (s_n - delta_n)/s_n"),
              abs(growth - expect) <= Real::pow2(-static_cast<long>(bits / 2), bits),
              "measured " + d6(growth) + ", exact " + d6(expect));
    });
  }
  if (beta > 0 && beta < 1) {
    Real b(beta, bits);
    s.guarded("Hoelder ratio of h_N+1 <= 3", [&] {
      Sampler sampler(opt.seed + 2, bits);
      auto pairs = holder_pairs(t, static_cast<size_t>(opt.samples) * 10, sampler);
      auto fit = holder_fit(h, b, pairs);
      s.check("Hoelder ratio of h_N+1 <= 3", fit.max_ratio <= 3L,
              "max ratio " + d6(fit.max_ratio) + " over " + std::to_string(fit.pairs) + " pairs");
    });
    for (int n = 2; n <= N + 1; ++n) {
      std::string name = stage_name(n, "|h_n(x) - h_n(y)| <= |x - y|^beta for |x - y| <= s_n-1");
      s.guarded(name, [&] {
        Sampler sampler(opt.seed + 10 + static_cast<std::uint64_t>(n), bits);
        Real gap(t.stage(n - 1).s, bits);
        auto pairs = holder_pairs(t, static_cast<size_t>(opt.samples) * 5, sampler, gap);
        auto fit = holder_fit(DistributionFunction::of(t, n), b, pairs);
        s.check(name, fit.max_ratio <= 1L, "max ratio " + d6(fit.max_ratio));
      });
    }
  }
}

void check_distances(const Tower& t, Suite& s) {
  unsigned bits = t.precision();
  const int N = t.depth();
  if (t.rotation_only()) return;
  auto consts = staircase_constants(*t.bump(), 4);
  int density = std::min(t.config().sample_density, 32);
  for (int n = 1; n + 1 <= N; ++n) {
    Real half = Real::pow2(-n, bits);
    Real gap = abs(Real(BigRational(t.stage(n + 1).tau() - t.stage(n).tau()), bits));
    for (int k = 0; k <= 2; ++k) {
      std::string base = "d_" + std::to_string(k) + "(f_" + std::to_string(n) + ", f_" + std::to_string(n + 1) + ")";
      if (t.evaluable(n + 1)) {
        s.guarded(base, [&] {
          auto r = conjugate_distance(t.h(n + 1), t.stage(n).tau(), t.stage(n + 1).tau(), k, density);
          s.check(base + " <= c_k |dtau| ||h_n+1||_(k+1)^(k+1)", r.within_bound,
                  "distance " + d6(r.distance) + ", bound " + d6(r.distance_bound));
          s.add(base + " <= 2^-n", r.distance <= half ? CheckStatus::pass : CheckStatus::asymptotic_only,
                "distance " + d6(r.distance) + " vs " + d6(half) + (r.distance <= half ? "" : " (promised only for large n)"));
        });
      } else {
        Real norm = chain_norm_bound(t.stages(), n + 1, k + 1, consts);
        Real ck = k == 0 ? Real(1L, bits) : Real(bruno_coefficient_sum(k), bits);
        Real rhs = ck * gap * pow(norm, static_cast<long>(k + 1));
        s.add(base + " bound c_k |dtau| ||h_n+1||^(k+1) <= 2^-n",
              rhs <= half ? CheckStatus::pass : CheckStatus::asymptotic_only,
              "bound-only: " + d6(rhs) + " vs " + d6(half) + (rhs <= half ? "" : " (promised only for large n)"));
      }
    }
  }
  s.add("d_k(f_n, f_n+1) <= 2^-n beyond stage " + std::to_string(N), CheckStatus::asymptotic_only,
        "convergence of f_n holds for all large n; only the built stages are checked");
  // Composition law on the densely evaluable part of the tower.
  for (int n = 2; n <= N; ++n) {
    const TowerStage& st = t.stage(n);
    if (st.identity || !(st.delta > 0L)) continue;
    for (int k = 1; k <= 3; ++k) {
      std::string name = stage_name(n, "||A_n o h_n||_" + std::to_string(k) + " <= c~(h_n," + std::to_string(k) + ")/delta_n^(k^2)");
      if (!st.A || !t.evaluable(n + 1)) {
        Real hn = chain_norm_bound(t.stages(), n, k, consts);
        Real rhs = compose_norm_constant(hn, k, consts) / pow(st.delta, static_cast<long>(k) * k);
        s.add(name, CheckStatus::asymptotic_only,
              "bound-only: " + d6(rhs) + "; the estimate needs scales below 2^-(precision/2)");
        continue;
      }
      s.guarded(name, [&] {
        Real hn = chain_norm(t.h(n), k, density);
        Real lhs = chain_norm(t.h(n + 1), k, density);
        Real rhs = compose_norm_constant(hn, k, consts) / pow(st.delta, static_cast<long>(k) * k);
        s.check(name, lhs <= rhs, "estimate " + d6(lhs) + ", bound " + d6(rhs));
      });
    }
  }
}

}  // namespace

const char* status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "PASS";
    case CheckStatus::fail: return "FAIL";
    case CheckStatus::skip: return "SKIP";
    case CheckStatus::asymptotic_only: return "ASYMPTOTIC-ONLY";
  }
  return "?";
}

bool VerifyReport::ok() const {
  return std::none_of(results.begin(), results.end(), [](const InvariantResult& r) { return r.status == CheckStatus::fail; });
}

std::string VerifyReport::text() const {
  std::ostringstream out;
  for (const auto& r : results) out << status_name(r.status) << "  " << r.name << "  [" << r.detail << "]\n";
  size_t fails = static_cast<size_t>(std::count_if(results.begin(), results.end(),
                                                   [](const InvariantResult& r) { return r.status == CheckStatus::fail; }));
  out << (ok() ? "verify: all invariants hold" : "verify: " + std::to_string(fails) + " invariant(s) failed") << " ("
      << results.size() << " checks)\n";
  return out.str();
}

std::string VerifyReport::json(bool timestamp) const {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["kind"] = "verify-report";
  if (timestamp) j["generated_at"] = utc_timestamp();
  j["ok"] = ok();
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : results) arr.push_back({{"name", r.name}, {"status", status_name(r.status)}, {"detail", r.detail}});
  j["results"] = arr;
  return j.dump(2) + "\n";
}

VerifyReport verify_tower(const Tower& t, const VerifyOptions& opt) {
  VerifyReport report;
  Suite s(report);
  {
    static const long bell[] = {1, 2, 5, 15, 52, 203, 877, 4140};
    bool ok = true;
    for (int n = 1; n <= 8; ++n) ok = ok && bruno_coefficient_sum(n) == bell[n - 1];
    s.check("c_n = Bell numbers for n = 1..8", ok, "1 2 5 15 52 203 877 4140");
  }
  bool consecutive = true;
  for (int i = 0; i < t.depth(); ++i) consecutive = consecutive && t.stages()[static_cast<size_t>(i)].n == i + 1;
  s.check("stage indices 1..N", consecutive && t.depth() <= t.config().max_stage, std::to_string(t.depth()) + " stages");
  check_parameters(t, s);
  bool structural = report.ok();
  if (!structural) {
    s.add("dense evaluations", CheckStatus::skip, "skipped after a structural failure");
    return report;
  }
  check_staircases(t, opt, s);
  check_conjugacies(t, opt, s);
  check_measure(t, opt, s);
  check_distances(t, s);
  return report;
}

}  // namespace aktower
