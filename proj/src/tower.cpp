#include "aktower/tower.hpp"

#include <algorithm>
#include <sstream>

namespace aktower {

namespace {

std::string short_decimal(const Real& x) { return x.is_finite() ? x.to_decimal(10) : "inf"; }

std::string log2_text(const Magnitude& m, unsigned bits) {
  if (m.is_zero()) return "0";
  Real l = m.log2(bits);
  return "2^" + l.to_decimal(10);
}

std::string log2_text(const Real& x) {
  if (x.is_zero()) return "0";
  return "2^" + log2(abs(x)).to_decimal(10);
}

long q_bits(const BigInt& q) { return static_cast<long>(mpz_sizeinbase(q.get_mpz_t(), 2)); }

ConditionCheck check(std::string id, bool holds, std::string measured, std::string required, bool asymptotic = false) {
  return ConditionCheck{std::move(id), holds, std::move(measured), std::move(required), asymptotic};
}

// q >= value, with value a positive real that may be astronomically large.
ConditionCheck q_at_least(std::string id, const BigInt& q, const Real& value) {
  unsigned bits = value.precision();
  Real qr(q, bits);
  return check(std::move(id), qr >= value, "q = " + log2_text(qr), ">= " + log2_text(value));
}

Real bell(int n, unsigned bits) { return n == 0 ? Real(1L, bits) : Real(bruno_coefficient_sum(n), bits); }

Real circle_distance(const Real& a, const Real& b) {
  Real d = frac(a - b);
  Real other = 1L - d;
  return min(d, other);
}

// Smallest k >= 2 with (1/k)^e < (1/k)/2, i.e. k^(e-1) > 2.
BigInt stage_one_count(const BigRational& e, unsigned bits) {
  Real ex(e, bits);
  Real guess = pow(Real(2L, bits), 1L / (ex - 1L));
  BigInt k = guess.floor_int() - 1;
  if (k < 2) k = 2;
  for (;; ++k) {
    Real s = 1L / Real(k, bits);
    // Margin keeps exact ties such as k = 8 for exponent 4/3 on the safe side.
    if (pow(s, ex) < s / 2L * (1L - Real::pow2(-static_cast<long>(bits / 2), bits))) return k;
  }
}

}  // namespace

const char* mode_name(TowerMode m) { return m == TowerMode::strict ? "strict" : "relaxed"; }

TowerMode parse_mode(std::string_view text) {
  if (text == "strict") return TowerMode::strict;
  if (text == "relaxed") return TowerMode::relaxed;
  throw Error(Errc::invalid_argument, "mode must be strict or relaxed, got '" + std::string(text) + "'");
}

void validate(const TowerConfig& c) {
  if (c.beta < 0 || c.beta > 1) throw Error(Errc::invalid_argument, "beta must lie in [0, 1]");
  if (c.mode == TowerMode::strict && c.q_cap) throw Error(Errc::invalid_argument, "strict mode does not accept a q cap");
  if (c.q_cap && *c.q_cap < 2) throw Error(Errc::invalid_argument, "q cap must be at least 2");
  if (c.max_stage < 1) throw Error(Errc::invalid_argument, "at least one stage is required");
  validate(c.bump);
  if (c.max_stage + 2 > std::min(c.bump.max_order, kMaxBrunoOrder))
    throw Error(Errc::invalid_argument, "max_stage " + std::to_string(c.max_stage) + " needs jets of order " +
                                            std::to_string(c.max_stage + 2) + " (bump max order is " +
                                            std::to_string(c.bump.max_order) + ")");
  if (c.precision < kMinPrecision) throw Error(Errc::precision, "precision below " + std::to_string(kMinPrecision) + " bits");
  if (c.sample_density < 8 || c.sample_density > (1 << 16))
    throw Error(Errc::invalid_argument, "sample_density must lie in [8, 65536]");
  if (c.budget.max_terms < 1 || c.budget.max_q_bits < 1) throw Error(Errc::invalid_argument, "scan budget must be positive");
}

bool TowerStage::all_pass() const {
  return std::all_of(conditions.begin(), conditions.end(), [](const ConditionCheck& c) { return c.holds; });
}

// ---------------------------------------------------------------- Chain

Chain::Chain(std::vector<std::shared_ptr<const Staircase>> maps, unsigned bits) : bits_(bits) {
  for (auto& m : maps)
    if (m) maps_.push_back(std::move(m));
}

Chain Chain::prefix(size_t k) const {
  Chain c(bits_);
  c.maps_.assign(maps_.begin(), maps_.begin() + static_cast<long>(std::min(k, maps_.size())));
  return c;
}

Real Chain::eval(const Real& x) const {
  Real y = x.with_precision(std::max(bits_, x.precision()));
  for (const auto& a : maps_) y = a->eval(y);
  return y;
}

Real Chain::eval_inverse(const Real& y) const {
  Real x = y.with_precision(std::max(bits_, y.precision()));
  for (auto it = maps_.rbegin(); it != maps_.rend(); ++it) x = (*it)->eval_inverse(x);
  return x;
}

Real Chain::derivative(const Real& x) const {
  Real y = x.with_precision(std::max(bits_, x.precision()));
  Real d(1L, bits_);
  for (const auto& a : maps_) {
    d *= a->derivative(y);
    y = a->eval(y);
  }
  return d;
}

Jet Chain::jet(const Real& x, int n) const {
  Jet j = Jet::identity(x.with_precision(std::max(bits_, x.precision())), n);
  for (const auto& a : maps_) j = jet_compose(a->jet(j.value(), n), j, n);
  return j;
}

Jet Chain::inverse_jet(const Real& y, int n) const {
  Jet j = Jet::identity(y.with_precision(std::max(bits_, y.precision())), n);
  for (auto it = maps_.rbegin(); it != maps_.rend(); ++it) j = jet_compose((*it)->inverse_jet(j.value(), n), j, n);
  return j;
}

std::vector<Real> structured_grid(const Chain& h, int density) {
  unsigned bits = h.precision();
  std::vector<Real> pts;
  for (int i = 0; i < density; ++i) pts.push_back((Real(2L * i + 1, bits)) / (2L * density));
  for (size_t j = 0; j < h.size(); ++j) {
    const Staircase& a = h.at(j);
    Chain before = h.prefix(j);
    const BumpProfile& g = a.bump();
    std::vector<Real> us{Real(0L, bits), g.knot(0), (g.knot(0) + g.knot(1)) / 2L, g.knot(1), Real(1L, bits) / 2L,
                         g.knot(2), (g.knot(2) + g.knot(3)) / 2L, g.knot(3)};
    std::vector<Real> ts;
    for (const Real& u : us) {
      Real t = u * a.delta();
      ts.push_back(t);
      ts.push_back(a.s_real() - a.left(t));
    }
    long periods = std::max(2, density / 16);
    BigInt count = a.period_count();
    if (count < periods) periods = count.get_si();
    for (long p = 0; p < periods; ++p) {
      BigInt idx = count * p / periods;
      Real base = Real(BigRational(idx, count), bits);
      for (const Real& t : ts) pts.push_back(frac(before.eval_inverse(base + t)));
    }
  }
  std::sort(pts.begin(), pts.end(), [](const Real& a, const Real& b) { return a < b; });
  pts.erase(std::unique(pts.begin(), pts.end(), [](const Real& a, const Real& b) { return a == b; }), pts.end());
  return pts;
}

Real compose_norm_constant(const Real& h_norm, int n, const StaircaseConstants& c) {
  if (n < 1 || static_cast<size_t>(n) >= c.rho.size()) throw Error(Errc::bounds, "norm constant order out of range");
  unsigned bits = std::max(h_norm.precision(), c.rho[0].precision());
  Real cn = bell(n, bits);
  Real prod(1L, bits);
  for (int j = 1; j <= n; ++j) prod *= c.rho[static_cast<size_t>(j)];
  Real a = cn * pow(h_norm, static_cast<long>(n)) * c.rho[static_cast<size_t>(n)];
  Real b = cn * h_norm * prod;
  return max(a, b);
}

Real chain_norm(const Chain& h, int n, int density) {
  Real best(1L, h.precision());
  if (h.size() == 0 || n == 0) return best;
  for (const Real& x : structured_grid(h, density)) {
    Jet f = h.jet(x, n);
    for (int i = 1; i <= n; ++i) best = max(best, abs(f[i]));
    Jet g = h.inverse_jet(f.value(), n);
    for (int i = 1; i <= n; ++i) best = max(best, abs(g[i]));
  }
  return best;
}

Extrema chain_extrema(const Chain& h, const Real& M_prev, const Real& m_prev, int density) {
  unsigned bits = h.precision();
  if (h.size() == 0) return Extrema{Real(1L, bits), Real(1L, bits), "exact"};
  const Staircase& last = h.at(h.size() - 1);
  Real top = last.max_slope();
  Real M_bound = M_prev * top;
  Real m_bound = m_prev / top;

  auto pts = structured_grid(h, density);
  Real hi(0L, bits), lo(bits), curv(0L, bits);
  bool first = true;
  for (const Real& x : pts) {
    Jet j = h.jet(x, 2);
    if (first || j[1] > hi) hi = j[1];
    if (first || j[1] < lo) lo = j[1];
    curv = max(curv, abs(j[2]));
    first = false;
  }
  Real gap = pts.front() + 1L - pts.back();
  for (size_t i = 1; i < pts.size(); ++i) gap = max(gap, pts[i] - pts[i - 1]);
  Real slack = curv * gap / 2L;

  Extrema e{M_bound, m_bound, "product-bound"};
  Real hi_s = hi + slack, lo_s = lo - slack;
  bool scan_hi = hi_s < M_bound, scan_lo = lo_s > m_bound;
  if (scan_hi) e.M = hi_s;
  if (scan_lo) e.m = lo_s;
  if (scan_hi && scan_lo) e.method = "scan+slack";
  else if (scan_hi || scan_lo) e.method = "mixed";
  return e;
}

Real chain_norm_bound(const std::vector<TowerStage>& stages, int k, int order, const StaircaseConstants& c) {
  unsigned bits = c.rho[0].precision();
  Real b(1L, bits);
  for (int j = 1; j < k; ++j) {
    const TowerStage& st = stages.at(static_cast<size_t>(j - 1));
    if (st.identity || !st.A) continue;
    b = compose_norm_constant(b, order, c) / pow(st.delta, static_cast<long>(order) * order);
  }
  return b;
}

// ---------------------------------------------------------------- parameters

BigRational gamma_of(const BigRational& beta) { return BigRational(1 - beta) / 2; }

BigRational delta_exponent(const BigRational& beta, int n) {
  BigRational d = beta + gamma_of(beta) / n;
  if (d == 0) throw Error(Errc::parameter, "delta exponent undefined");
  return BigRational(1) / d;
}

Real derive_delta(const BigRational& beta, int n, const BigRational& s, const Real& m, unsigned bits) {
  if (beta == 0) {
    BigRational p = 1;
    for (int i = 0; i < n; ++i) p *= s;
    return Real(p, bits);
  }
  Real e(delta_exponent(beta, n), bits);
  Real base = exp(log(Real(s, bits)) * e);
  return n == 1 ? base : m * base;
}

// ---------------------------------------------------------------- Tower

Tower::Tower(TowerConfig config)
    : config_(std::move(config)), M_next_(1L, config_.precision), m_next_(1L, config_.precision) {
  validate(config_);
  target_ = Target::parse(config_.target);
  bump_ = BumpProfile::make(config_.bump, config_.precision);
}

Tower Tower::build(const TowerConfig& config) {
  Tower t(config);
  for (int n = 1; n <= config.max_stage; ++n) {
    try {
      t.extend();
    } catch (const Error& e) {
      // A rotation-only tower of a rational target simply runs out of approximants.
      if (t.rotation_only() && e.code() == Errc::target && t.depth() > 0) break;
      throw;
    }
  }
  return t;
}

Tower Tower::restore(TowerConfig config, std::vector<TowerStage> stages, Real M_next, Real m_next) {
  Tower t(std::move(config));
  t.stages_ = std::move(stages);
  t.M_next_ = std::move(M_next);
  t.m_next_ = std::move(m_next);
  return t;
}

Tower build_tower(const TowerConfig& config) { return Tower::build(config); }

const TowerStage& Tower::stage(int n) const {
  if (n < 1 || n > depth()) throw Error(Errc::bounds, "stage " + std::to_string(n) + " not built");
  return stages_[static_cast<size_t>(n - 1)];
}

const Real& Tower::M(int k) const {
  if (k == depth() + 1) return M_next_;
  return stage(k).M;
}

const Real& Tower::m(int k) const {
  if (k == depth() + 1) return m_next_;
  return stage(k).m;
}

Chain Tower::h(int k) const {
  if (k < 1 || k > depth() + 1) throw Error(Errc::bounds, "h_" + std::to_string(k) + " is not available");
  std::vector<std::shared_ptr<const Staircase>> maps;
  for (int j = 1; j < k; ++j) {
    const TowerStage& st = stages_[static_cast<size_t>(j - 1)];
    if (!st.identity) maps.push_back(st.A);
  }
  return Chain(std::move(maps), config_.precision);
}

bool Tower::evaluable(int k) const {
  Real floor_delta = Real::pow2(-static_cast<long>(config_.precision / 2), config_.precision);
  for (int j = 1; j < k && j <= depth(); ++j) {
    const TowerStage& st = stages_[static_cast<size_t>(j - 1)];
    if (!st.identity && st.delta < floor_delta) return false;
  }
  return true;
}

namespace {
void require_evaluable(const Tower& t, int k) {
  if (!t.evaluable(k))
    throw Error(Errc::capacity, "h_" + std::to_string(k) + " has scales below the working precision; raise --precision");
}
}  // namespace

Real Tower::eval_h(int k, const Real& x) const {
  require_evaluable(*this, k);
  return h(k).eval(x);
}

Real Tower::eval_h_inv(int k, const Real& y) const {
  require_evaluable(*this, k);
  return h(k).eval_inverse(y);
}

Real Tower::lift_f(int n, const Real& x) const {
  const TowerStage& st = stage(n);
  require_evaluable(*this, n);
  Chain hn = h(n);
  return hn.eval_inverse(hn.eval(x) + Real(st.tau(), config_.precision));
}

Real Tower::eval_f(int n, const Real& x) const { return frac(lift_f(n, frac(x))); }

std::vector<ConditionCheck> Tower::condition_report() const {
  std::vector<ConditionCheck> out;
  for (const auto& st : stages_)
    for (auto c : st.conditions) {
      c.id = "stage " + std::to_string(st.n) + " " + c.id;
      out.push_back(std::move(c));
    }
  return out;
}

void Tower::extend() {
  if (depth() >= config_.max_stage)
    throw Error(Errc::capacity, "tower already has max_stage = " + std::to_string(config_.max_stage) + " stages");
  if (depth() == 0) add_first_stage();
  else add_stage();
}

void Tower::add_first_stage() {
  unsigned bits = config_.precision;
  auto stream = target_.stream();
  auto c = stream->next();
  if (!c) throw Error(Errc::target, "target produced no approximants");
  TowerStage st;
  st.n = 1;
  st.p = c->p;
  st.q = c->q;
  st.error_upper = c->upper;
  st.error_lower = c->lower;
  st.M = Real(1L, bits);
  st.m = Real(1L, bits);
  st.extrema_method = "exact";
  st.h_norm = Real(1L, bits);
  const BigRational& beta = config_.beta;
  if (beta == 0 || beta == 1) {
    st.s = BigRational(1, 2);
    st.delta = beta == 0 ? Real(st.s, bits) : Real(0L, bits);
    st.identity = true;
    st.conditions.push_back(check("stage-1 identity", true, "delta_1 = " + short_decimal(st.delta), "h_2 = h_1 = Id"));
  } else {
    BigRational e = delta_exponent(beta, 1);
    BigInt k = stage_one_count(e, bits);
    st.s = BigRational(1, k);
    st.delta = derive_delta(beta, 1, st.s, st.m, bits);
    st.A = std::make_shared<Staircase>(st.s, st.delta, bump_);
    st.conditions.push_back(check("(vi) delta < s/2", st.delta < Real(st.s, bits) / 2L, short_decimal(st.delta),
                                  "< " + short_decimal(Real(st.s, bits) / 2L)));
  }
  auto consts = staircase_constants(*bump_, config_.max_stage + 2);
  st.c_tilde = compose_norm_constant(st.h_norm, 2, consts);
  finish_stage(st);
}

void Tower::add_stage() {
  unsigned bits = config_.precision;
  const int n = depth() + 1;
  const TowerStage& prev = stages_.back();
  const BigRational& beta = config_.beta;
  const bool strict = config_.mode == TowerMode::strict;
  const Real Mn = M_next_, mn = m_next_;

  TowerStage best;
  int best_score = -1;
  bool found = false;
  std::vector<ConditionCheck> last_checks;
  BigInt last_q;
  int scanned = 0;

  auto stream = target_.stream();
  if (rotation_only()) {
    for (int taken = 0; taken < config_.budget.max_terms; ++taken) {
      auto c = stream->next();
      if (!c || q_bits(c->q) > config_.budget.max_q_bits) break;
      if (c->q <= prev.q || c->q < 2) continue;
      if (config_.q_cap && c->q > *config_.q_cap) break;
      TowerStage st;
      st.n = n;
      st.p = c->p;
      st.q = c->q;
      st.error_upper = c->upper;
      st.error_lower = c->lower;
      st.s = prev.s / c->q;
      st.delta = Real(0L, bits);
      st.identity = true;
      st.M = Real(1L, bits);
      st.m = Real(1L, bits);
      st.extrema_method = "exact";
      st.h_norm = Real(1L, bits);
      st.c_tilde = Real(1L, bits);
      st.conditions.push_back(check("(i) |tau - tau_n| <= |tau - tau_n-1|", certainly_le(c->upper, prev.error_lower),
                                    log2_text(c->upper, bits), "<= " + log2_text(prev.error_lower, bits)));
      finish_stage(st);
      return;
    }
    throw Error(Errc::target, "target stream exhausted before stage " + std::to_string(n));
  }

  auto consts = staircase_constants(*bump_, config_.max_stage + 2);
  Real h_norm = h_norm_for(n);
  Real c_tilde = compose_norm_constant(h_norm, n + 1, consts);
  const long exponent = beta == 0 ? 3L * n * n * n * n : 1L * n * n * n * n;
  const Real cn = bell(n, bits);

  for (int taken = 0; taken < config_.budget.max_terms; ++taken) {
    auto c = stream->next();
    if (!c || q_bits(c->q) > config_.budget.max_q_bits) break;
    if (c->q <= prev.q || c->q < 2) continue;
    if (config_.q_cap && c->q > *config_.q_cap) break;
    ++scanned;

    BigRational s = prev.s / c->q;
    s.canonicalize();
    Real s_real(s, bits);
    Real delta = derive_delta(beta, n, s, mn, bits);
    std::vector<ConditionCheck> checks;
    bool admissible = delta < s_real / 2L;
    checks.push_back(check(beta == 0 ? "(v) delta_n = s_n^n < s_n/2" : "(vi) delta_n = m_n s_n^(1/(beta+gamma/n)) < s_n/2",
                           admissible, log2_text(delta), "< " + log2_text(s_real / 2L)));
    checks.push_back(check("(i) |tau - tau_n| <= |tau - tau_n-1|", certainly_le(c->upper, prev.error_lower),
                           log2_text(c->upper, bits), "<= " + log2_text(prev.error_lower, bits)));
    Magnitude goal = Magnitude::inverse_power(c->q, BigInt(exponent));
    checks.push_back(check("(ii) |tau - p/q| <= q^-" + std::to_string(exponent), certainly_le(c->upper, goal),
                           log2_text(c->upper, bits), "<= " + log2_text(goal, bits)));
    BigRational inv_prev = BigRational(1) / prev.s;
    checks.push_back(check("(iii) q >= 1/s_n-1", BigRational(c->q) >= inv_prev, "q = " + log2_text(Real(c->q, bits)),
                           ">= " + to_string(inv_prev)));
    checks.push_back(q_at_least("(iii) q >= 1/m_n", c->q, 1L / mn));
    checks.push_back(q_at_least("(iii) q >= (3M_n)^n", c->q, pow(3L * Mn, static_cast<long>(n))));
    checks.push_back(q_at_least("(iii) q >= c_n", c->q, cn));
    checks.push_back(q_at_least("(iii) q >= c~(h_n, n+1)", c->q, c_tilde));
    if (beta != 0) {
      BigInt two_pow = BigInt(1) << (n + 1);
      checks.push_back(check("(v) s_n <= 2^-(n+1) s_n-1", c->q >= two_pow, "q = " + log2_text(Real(c->q, bits)),
                             ">= 2^" + std::to_string(n + 1)));
      Real g(gamma_of(beta), bits);
      Real lhs = g * log(s_real);
      Real r1 = -static_cast<long>(n) * log(Mn + 1L);
      Real r2 = static_cast<long>(n) * log(mn / (2L * Mn));
      Real rhs = min(r1, r2);
      checks.push_back(check("(v) s_n^gamma <= min{(M_n+1)^-n, (m_n/(2M_n))^n}", lhs <= rhs,
                             "ln = " + short_decimal(lhs), "<= ln " + short_decimal(rhs)));
    }
    int score = static_cast<int>(std::count_if(checks.begin(), checks.end(), [](const ConditionCheck& k) { return k.holds; }));
    last_checks = checks;
    last_q = c->q;
    if (!admissible) continue;
    bool all = score == static_cast<int>(checks.size());
    if (all || (!strict && score > best_score)) {
      best = TowerStage();
      best.n = n;
      best.p = c->p;
      best.q = c->q;
      best.s = s;
      best.delta = delta;
      best.error_upper = c->upper;
      best.error_lower = c->lower;
      best.conditions = std::move(checks);
      best_score = score;
      found = true;
    }
    if (all) break;
  }

  bool complete = found && best.all_pass();
  if (strict && !complete) {
    std::string what = "target not verifiably Liouville at this order: stage " + std::to_string(n) + " found no convergent";
    if (scanned > 0) {
      what += " among " + std::to_string(scanned) + " scanned; last candidate q = 2^" +
              log2(Real(last_q, bits)).to_decimal(6) + " fails";
      for (const auto& k : last_checks)
        if (!k.holds) what += " " + k.id + ";";
    }
    throw ConstructionFailure(what, n, last_checks);
  }
  if (!found) throw Error(Errc::target, "no admissible convergent for stage " + std::to_string(n) + " within the cap/budget");

  best.M = Mn;
  best.m = mn;
  best.extrema_method = next_method_;
  best.h_norm = h_norm;
  best.c_tilde = c_tilde;
  best.A = std::make_shared<Staircase>(best.s, best.delta, bump_);
  BigRational ratio = best.tau() / best.s;
  ratio.canonicalize();
  std::string shown = to_string(ratio);
  if (shown.size() > 40) shown = shown.substr(0, 12) + "...(" + std::to_string(shown.size()) + " digits)";
  best.conditions.push_back(check("commutation tau_n/s_n integer", is_integer(ratio), shown, "integer"));
  finish_stage(best);
}

Real Tower::h_norm_for(int n) const {
  auto consts = staircase_constants(*bump_, config_.max_stage + 2);
  if (config_.mode == TowerMode::relaxed && evaluable(n)) return chain_norm(h(n), n + 1, config_.sample_density);
  return chain_norm_bound(stages_, n, n + 1, consts);
}

void Tower::finish_stage(TowerStage& st) {
  Real M_prev = M_next_, m_prev = m_next_;
  stages_.push_back(st);
  const int k = depth() + 1;
  if (st.identity || !st.A) return;
  if (config_.mode == TowerMode::relaxed && evaluable(k)) {
    Extrema e = chain_extrema(h(k), M_prev, m_prev, config_.sample_density);
    M_next_ = e.M;
    m_next_ = e.m;
    next_method_ = e.method;
  } else {
    Real top = st.A->max_slope();
    M_next_ = M_prev * top;
    m_next_ = m_prev / top;
    next_method_ = "product-bound";
  }
}

// ---------------------------------------------------------------- norms and distances

Real cn_norm(const Tower& t, std::string_view map_id, int n) {
  unsigned bits = t.precision();
  std::string id(map_id);
  auto index = [&](size_t colon) {
    try {
      return std::stoi(id.substr(colon + 1));
    } catch (...) {
      throw Error(Errc::invalid_argument, "bad map id '" + id + "'");
    }
  };
  if (id == "id" || id == "rot" || id.rfind("rot:", 0) == 0) return Real(1L, bits);
  if (id.rfind("A:", 0) == 0) {
    const TowerStage& st = t.stage(index(1));
    if (st.identity) return Real(1L, bits);
    return st.A->norm(n).estimate;
  }
  if (id.rfind("h:", 0) == 0) {
    int k = index(1);
    require_evaluable(t, k);
    return chain_norm(t.h(k), n, t.config().sample_density);
  }
  if (id.rfind("f:", 0) == 0) {
    int k = index(1);
    require_evaluable(t, k);
    Chain hk = t.h(k);
    Real tau(t.stage(k).tau(), bits);
    Real best(1L, bits);
    for (const Real& x : structured_grid(hk, t.config().sample_density)) {
      Jet j = hk.jet(x, n);
      for (int sign : {1, -1}) {
        Jet shifted = j;
        shifted[0] = j.value() + (sign > 0 ? tau : -tau);
        Jet f = jet_compose(hk.inverse_jet(shifted.value(), n), shifted, n);
        for (int i = 1; i <= n; ++i) best = max(best, abs(f[i]));
      }
    }
    return best;
  }
  throw Error(Errc::invalid_argument, "unknown map id '" + id + "'");
}

DistanceReport conjugate_distance(const Chain& h, const BigRational& t1, const BigRational& t2, int k, int density) {
  unsigned bits = h.precision();
  Real a(t1, bits), b(t2, bits);
  Real d(0L, bits);
  for (const Real& x : structured_grid(h, density)) {
    Jet j = h.jet(x, k);
    for (int sign : {1, -1}) {
      Jet ja = j, jb = j;
      ja[0] = j.value() + (sign > 0 ? a : -a);
      jb[0] = j.value() + (sign > 0 ? b : -b);
      Jet fa = jet_compose(h.inverse_jet(ja.value(), k), ja, k);
      Jet fb = jet_compose(h.inverse_jet(jb.value(), k), jb, k);
      d = max(d, circle_distance(fa.value(), fb.value()));
      for (int i = 1; i <= k; ++i) d = max(d, abs(fa[i] - fb[i]));
    }
  }
  DistanceReport r;
  r.distance = d;
  Real norm = chain_norm(h, k + 1, density);
  Real gap = abs(Real(BigRational(t2 - t1), bits));
  r.distance_bound = bell(k, bits) * gap * pow(norm, static_cast<long>(k + 1));
  // equality is attained when h is the identity; allow rounding
  r.within_bound = r.distance <= r.distance_bound * (1L + Real::pow2(-static_cast<long>(bits / 2), bits));
  r.within_half_power = true;
  return r;
}

DistanceReport distance_dn(const Tower& t, int n, int k) {
  if (n < 1 || n + 1 > t.depth()) throw Error(Errc::bounds, "distance needs stages n and n+1 built");
  if (k < 0 || k + 1 > t.config().bump.max_order) throw Error(Errc::bounds, "distance order out of range");
  require_evaluable(t, n + 1);
  DistanceReport r =
      conjugate_distance(t.h(n + 1), t.stage(n).tau(), t.stage(n + 1).tau(), k, t.config().sample_density);
  r.within_half_power = r.distance <= Real::pow2(-n, t.precision());
  return r;
}

}  // namespace aktower
