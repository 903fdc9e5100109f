#include "aktower/rotation.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace aktower {

namespace {

constexpr long kExactBitsLimit = 1L << 22;
constexpr long kStreamBitsLimit = 1L << 24;

size_t bit_length(const BigInt& z) { return z == 0 ? 0 : mpz_sizeinbase(z.get_mpz_t(), 2); }

// Bits of base^exponent, or -1 when it is too large to even estimate in a long.
long power_bits(const BigInt& base, const BigInt& exponent) {
  if (exponent == 0 || base == 1) return 1;
  if (!exponent.fits_slong_p()) return -1;
  long e = exponent.get_si();
  long b = static_cast<long>(bit_length(base));
  if (b > 0 && e > (1L << 40) / b) return -1;
  return e * b;
}

std::optional<BigRational> exact_value(const Magnitude& m) {
  if (m.coeff == 0 || m.exponent == 0 || m.base == 1) return m.coeff;
  long bits = power_bits(m.base, m.exponent);
  if (bits < 0 || bits > kExactBitsLimit) return std::nullopt;
  BigInt pw;
  mpz_pow_ui(pw.get_mpz_t(), m.base.get_mpz_t(), m.exponent.get_ui());
  BigRational v = m.coeff / BigRational(pw);
  v.canonicalize();
  return v;
}

unsigned log_precision(const Magnitude& a, const Magnitude& b) {
  size_t need = 192;
  for (const Magnitude* m : {&a, &b}) need = std::max(need, 192 + bit_length(m->exponent) + bit_length(m->base));
  return static_cast<unsigned>(need);
}

std::string trim(std::string_view s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

BigInt parse_integer(const std::string& text, const char* what) {
  std::string t = trim(text);
  if (t.empty()) throw Error(Errc::parse, std::string("empty ") + what);
  size_t start = (t[0] == '-' || t[0] == '+') ? 1 : 0;
  if (start == t.size()) throw Error(Errc::parse, std::string("malformed ") + what + " '" + t + "'");
  for (size_t i = start; i < t.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(t[i]))) throw Error(Errc::parse, std::string("malformed ") + what + " '" + t + "'");
  return BigInt(t[0] == '+' ? t.substr(1) : t);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

class ContinuedFractionStream : public ConvergentStream {
 public:
  ContinuedFractionStream(std::vector<BigInt> prefix, std::vector<BigInt> period, long max_q_bits)
      : prefix_(std::move(prefix)), period_(std::move(period)), max_q_bits_(max_q_bits) {
    if (prefix_.empty()) throw Error(Errc::invalid_argument, "continued fraction needs at least one coefficient");
    for (size_t i = 1; i < prefix_.size(); ++i)
      if (prefix_[i] <= 0) throw Error(Errc::invalid_argument, "continued fraction coefficients after the first must be positive");
    for (const auto& a : period_)
      if (a <= 0) throw Error(Errc::invalid_argument, "periodic continued fraction coefficients must be positive");
    cur_p_ = prefix_[0];
    cur_q_ = 1;
    prev_p_ = 1;
    prev_q_ = 0;
    has_cur_ = true;
    advance_lookahead();
    // q_1 = q_0 = 1 when a_1 = 1; the repeated denominator is dropped.
    if (has_next_ && next_q_ == cur_q_) shift();
  }

  std::optional<Convergent> next() override {
    if (!has_cur_) return std::nullopt;
    if (static_cast<long>(bit_length(cur_q_)) > max_q_bits_) {
      has_cur_ = false;
      return std::nullopt;
    }
    Convergent c;
    c.index = index_;
    c.p = cur_p_;
    c.q = cur_q_;
    if (has_next_) {
      c.upper = Magnitude::exact(BigRational(1, cur_q_ * next_q_));
      c.lower = Magnitude::exact(BigRational(1, cur_q_ * (cur_q_ + next_q_)));
      c.side = (index_ % 2 == 0) ? 1 : -1;
    } else {
      c.side = 0;
    }
    c.upper.coeff.canonicalize();
    c.lower.coeff.canonicalize();
    shift();
    return c;
  }

 private:
  std::optional<BigInt> coefficient(size_t k) const {
    if (k < prefix_.size()) return prefix_[k];
    if (period_.empty()) return std::nullopt;
    return period_[(k - prefix_.size()) % period_.size()];
  }

  void advance_lookahead() {
    auto a = coefficient(static_cast<size_t>(index_) + 1);
    has_next_ = a.has_value();
    if (has_next_) {
      next_p_ = *a * cur_p_ + prev_p_;
      next_q_ = *a * cur_q_ + prev_q_;
    }
  }

  void shift() {
    if (!has_next_) {
      has_cur_ = false;
      return;
    }
    prev_p_ = cur_p_;
    prev_q_ = cur_q_;
    cur_p_ = next_p_;
    cur_q_ = next_q_;
    ++index_;
    advance_lookahead();
  }

  std::vector<BigInt> prefix_, period_;
  long max_q_bits_;
  int index_ = 0;
  bool has_cur_ = false, has_next_ = false;
  BigInt cur_p_, cur_q_, prev_p_, prev_q_, next_p_, next_q_;
};

class SeriesStream : public ConvergentStream {
 public:
  SeriesStream(const Target& target, BigInt base, long max_q_bits)
      : target_(target), base_(std::move(base)), max_q_bits_(max_q_bits) {}

  std::optional<Convergent> next() override {
    if (done_) return std::nullopt;
    BigInt e_next = target_.series_exponent(k_ + 1);
    if (k_ > 0) {
      long bits = power_bits(base_, e_cur_);
      if (bits < 0 || bits > max_q_bits_) {
        done_ = true;
        return std::nullopt;
      }
      BigInt step;
      BigInt gap = e_cur_ - e_prev_;
      mpz_pow_ui(step.get_mpz_t(), base_.get_mpz_t(), gap.get_ui());
      num_ = num_ * step + 1;
      mpz_pow_ui(den_.get_mpz_t(), base_.get_mpz_t(), e_cur_.get_ui());
    }
    BigRational v(num_, den_);
    v.canonicalize();
    Convergent c;
    c.index = static_cast<int>(k_);
    c.p = v.get_num();
    c.q = v.get_den();
    // Terms decrease at least geometrically with ratio 1/base <= 1/2.
    c.upper = Magnitude{2, base_, e_next};
    c.lower = Magnitude{1, base_, e_next};
    c.side = 1;
    ++k_;
    e_prev_ = e_cur_;
    e_cur_ = e_next;
    return c;
  }

 private:
  const Target target_;
  BigInt base_;
  long max_q_bits_;
  long k_ = 0;
  bool done_ = false;
  BigInt num_{0}, den_{1}, e_prev_{0}, e_cur_{0};
};

}  // namespace

Real Magnitude::log2(unsigned bits) const {
  if (coeff == 0) {
    Real r(bits);
    mpfr_set_inf(r.get(), -1);
    return r;
  }
  Real lc = aktower::log2(Real(coeff, bits));
  if (exponent == 0 || base == 1) return lc;
  return lc - Real(exponent, bits) * aktower::log2(Real(base, bits));
}

Real Magnitude::value(unsigned bits) const {
  if (coeff == 0) return Real(bits);
  if (exponent == 0 || base == 1) return Real(coeff, bits);
  Real l = log2(bits + 64);
  Real r(bits);
  mpfr_exp2(r.get(), l.get(), MPFR_RNDN);
  return r;
}

std::string Magnitude::to_string() const {
  if (exponent == 0 || base == 1) return aktower::to_string(coeff);
  return aktower::to_string(coeff) + "*" + aktower::to_string(base) + "^-" + aktower::to_string(exponent);
}

int compare(const Magnitude& a, const Magnitude& b) {
  if (a.is_zero() || b.is_zero()) return a.is_zero() == b.is_zero() ? 0 : (a.is_zero() ? -1 : 1);
  unsigned bits = log_precision(a, b);
  Real gap = a.log2(bits) - b.log2(bits);
  if (abs(gap) > Real::pow2(-40, bits)) return gap.sign();
  auto ea = exact_value(a), eb = exact_value(b);
  if (ea && eb) return *ea < *eb ? -1 : (*ea > *eb ? 1 : 0);
  return 0;
}

bool certainly_le(const Magnitude& a, const Magnitude& b) {
  auto ea = exact_value(a), eb = exact_value(b);
  if (ea && eb) return *ea <= *eb;
  return compare(a, b) < 0;
}

bool certainly_lt(const Magnitude& a, const Magnitude& b) {
  auto ea = exact_value(a), eb = exact_value(b);
  if (ea && eb) return *ea < *eb;
  return compare(a, b) < 0;
}

Target Target::parse(std::string_view text) {
  std::string t = trim(text);
  auto colon = t.find(':');
  if (colon == std::string::npos) throw Error(Errc::parse, "target '" + t + "' lacks a cf:, series: or rat: prefix");
  std::string kind = t.substr(0, colon);
  std::string body = t.substr(colon + 1);
  Target out;
  if (kind == "cf") {
    out.kind_ = Kind::continued_fraction;
    std::string head = body, block;
    auto open = body.find('(');
    if (open != std::string::npos) {
      auto close = body.find(')', open);
      if (close == std::string::npos) throw Error(Errc::parse, "unbalanced period block in '" + t + "'");
      std::string after = trim(body.substr(close + 1));
      if (!after.empty() && after != ",..." && after != "...")
        throw Error(Errc::parse, "text after the period block in '" + t + "'");
      block = body.substr(open + 1, close - open - 1);
      head = body.substr(0, open);
    }
    bool dots = false;
    for (const auto& item : split(head, ',')) {
      std::string s = trim(item);
      if (s.empty()) continue;
      if (s == "..." || s == "…") {
        dots = true;
        continue;
      }
      if (dots) throw Error(Errc::parse, "coefficients after '...' in '" + t + "'");
      out.prefix_.push_back(parse_integer(s, "continued fraction coefficient"));
    }
    if (!block.empty()) {
      for (const auto& item : split(block, ',')) out.period_.push_back(parse_integer(item, "period coefficient"));
    } else if (open != std::string::npos) {
      throw Error(Errc::parse, "empty period block in '" + t + "'");
    }
    if (out.prefix_.empty()) {
      if (out.period_.empty()) throw Error(Errc::parse, "continued fraction without coefficients");
      out.prefix_.push_back(out.period_.front());
    }
    if (out.period_.empty()) {
      // A plain list repeats its last coefficient forever.
      if (out.prefix_.size() < 2) throw Error(Errc::parse, "continued fraction needs a0 and at least one more coefficient");
      out.period_.push_back(out.prefix_.back());
    }
    for (size_t i = 1; i < out.prefix_.size(); ++i)
      if (out.prefix_[i] <= 0) throw Error(Errc::parse, "continued fraction coefficients after a0 must be positive");
    for (const auto& a : out.period_)
      if (a <= 0) throw Error(Errc::parse, "periodic coefficients must be positive");
    return out;
  }
  if (kind == "series") {
    out.kind_ = Kind::series;
    for (const auto& item : split(body, ',')) {
      std::string s = trim(item);
      if (s.empty()) continue;
      auto eq = s.find('=');
      if (eq == std::string::npos) throw Error(Errc::parse, "series option '" + s + "' is not key=value");
      std::string key = trim(s.substr(0, eq)), val = trim(s.substr(eq + 1));
      if (key == "base") {
        out.base_ = parse_integer(val, "series base");
        if (out.base_ < 2) throw Error(Errc::parse, "series base must be at least 2");
      } else if (key == "exponents") {
        auto param = [&](const char* name, long lo) {
          BigInt v = parse_integer(val.substr(std::string(name).size() + 1), "exponent parameter");
          if (v < lo || !v.fits_slong_p() || v > 64) throw Error(Errc::parse, "exponent parameter out of range in '" + val + "'");
          return v.get_si();
        };
        if (val == "factorial") {
          out.family_ = Exponents::factorial;
        } else if (val.rfind("power:", 0) == 0) {
          out.family_ = Exponents::power;
          out.family_param_ = param("power", 1);
        } else if (val.rfind("geometric:", 0) == 0) {
          out.family_ = Exponents::geometric;
          out.family_param_ = param("geometric", 2);
        } else {
          throw Error(Errc::parse, "unknown exponent family '" + val + "'");
        }
      } else {
        throw Error(Errc::parse, "unknown series option '" + key + "'");
      }
    }
    return out;
  }
  if (kind == "rat") {
    out.kind_ = Kind::rational;
    try {
      out.rational_ = parse_rational(trim(body));
    } catch (const Error& e) {
      throw Error(Errc::parse, std::string("bad rational target: ") + e.what());
    }
    return out;
  }
  throw Error(Errc::parse, "unknown target kind '" + kind + "'");
}

Target Target::from_continued_fraction(std::vector<BigInt> prefix, std::vector<BigInt> period) {
  if (prefix.empty()) throw Error(Errc::invalid_argument, "continued fraction needs a0");
  Target t;
  t.kind_ = Kind::continued_fraction;
  t.prefix_ = std::move(prefix);
  t.period_ = std::move(period);
  return t;
}

Target Target::from_rational(const BigRational& r) {
  Target t;
  t.kind_ = Kind::rational;
  t.rational_ = r;
  t.rational_.canonicalize();
  return t;
}

std::string Target::canonical() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::continued_fraction: {
      os << "cf:";
      for (size_t i = 0; i < prefix_.size(); ++i) os << (i ? "," : "") << prefix_[i].get_str();
      if (!period_.empty()) {
        os << ",(";
        for (size_t i = 0; i < period_.size(); ++i) os << (i ? "," : "") << period_[i].get_str();
        os << ")";
      }
      break;
    }
    case Kind::series:
      os << "series:base=" << base_.get_str() << ",exponents=";
      if (family_ == Exponents::factorial) os << "factorial";
      if (family_ == Exponents::power) os << "power:" << family_param_;
      if (family_ == Exponents::geometric) os << "geometric:" << family_param_;
      break;
    case Kind::rational:
      os << "rat:" << to_string(rational_);
      break;
  }
  return os.str();
}

BigInt Target::series_exponent(long k) const {
  BigInt e;
  switch (family_) {
    case Exponents::factorial: mpz_fac_ui(e.get_mpz_t(), static_cast<unsigned long>(k)); break;
    case Exponents::power: mpz_ui_pow_ui(e.get_mpz_t(), static_cast<unsigned long>(k), static_cast<unsigned long>(family_param_)); break;
    case Exponents::geometric: mpz_ui_pow_ui(e.get_mpz_t(), static_cast<unsigned long>(family_param_), static_cast<unsigned long>(k)); break;
  }
  return e;
}

std::unique_ptr<ConvergentStream> Target::stream() const {
  switch (kind_) {
    case Kind::continued_fraction: return std::make_unique<ContinuedFractionStream>(prefix_, period_, kStreamBitsLimit);
    case Kind::series: return std::make_unique<SeriesStream>(*this, base_, kStreamBitsLimit);
    case Kind::rational: {
      // Expand p/q into its finite continued fraction.
      std::vector<BigInt> cf;
      BigInt p = rational_.get_num(), q = rational_.get_den();
      while (q != 0) {
        BigInt a;
        mpz_fdiv_q(a.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
        cf.push_back(a);
        BigInt r = p - a * q;
        p = q;
        q = r;
      }
      return std::make_unique<ContinuedFractionStream>(cf, std::vector<BigInt>{}, kStreamBitsLimit);
    }
  }
  return nullptr;
}

Real Target::approximate(unsigned bits) const {
  if (kind_ == Kind::rational) return Real(rational_, bits);
  auto s = stream();
  Magnitude goal = Magnitude::inverse_power(2, BigInt(static_cast<long>(bits) + 2));
  std::optional<Convergent> last;
  while (auto c = s->next()) {
    last = c;
    if (c->upper.is_zero() || certainly_le(c->upper, goal)) break;
  }
  if (!last) throw Error(Errc::target, "target produced no approximants");
  return Real(last->value(), bits);
}

Target parse_target(std::string_view text) { return Target::parse(text); }

std::unique_ptr<ConvergentStream> convergents(std::vector<BigInt> prefix, std::vector<BigInt> period) {
  return std::make_unique<ContinuedFractionStream>(std::move(prefix), std::move(period), kStreamBitsLimit);
}

std::vector<Convergent> take(ConvergentStream& s, const ScanBudget& budget) {
  std::vector<Convergent> out;
  while (static_cast<int>(out.size()) < budget.max_terms) {
    auto c = s.next();
    if (!c || static_cast<long>(bit_length(c->q)) > budget.max_q_bits) break;
    out.push_back(std::move(*c));
  }
  return out;
}

std::optional<Convergent> find_liouville_certificate(ConvergentStream& s, int n, const ScanBudget& budget) {
  if (n < 1) throw Error(Errc::invalid_argument, "Liouville order must be at least 1");
  for (int i = 0; i < budget.max_terms; ++i) {
    auto c = s.next();
    if (!c || static_cast<long>(bit_length(c->q)) > budget.max_q_bits) break;
    if (c->q <= 1) continue;
    if (certainly_lt(c->upper, Magnitude::inverse_power(c->q, BigInt(n)))) return c;
  }
  return std::nullopt;
}

Convergent liouville_certificate(ConvergentStream& s, int n, const ScanBudget& budget) {
  auto c = find_liouville_certificate(s, n, budget);
  if (!c)
    throw Error(Errc::target, "no certificate within budget for order " + std::to_string(n) + " (" +
                                  std::to_string(budget.max_terms) + " approximants)");
  return *c;
}

std::vector<Convergent> diophantine_scan(ConvergentStream& s, const Real& K, const Real& delta, const ScanBudget& budget) {
  if (K.sign() <= 0 || delta.sign() <= 0) throw Error(Errc::invalid_argument, "Diophantine scan needs K > 0 and delta > 0");
  std::vector<Convergent> out;
  for (const auto& c : take(s, budget)) {
    if (c.upper.is_zero()) {
      out.push_back(c);
      continue;
    }
    unsigned bits = static_cast<unsigned>(std::max<size_t>(256, 128 + bit_length(c.q)));
    Real lhs = c.upper.log2(bits);
    Real rhs = log2(K.with_precision(bits)) - (2L + delta.with_precision(bits)) * log2(Real(c.q, bits));
    if (lhs + Real::pow2(-40, bits) <= rhs) out.push_back(c);
  }
  return out;
}

RotationEstimate rotation_number_estimate(const LiftMap& lift, const Real& x, long iterations) {
  if (iterations < 1) throw Error(Errc::invalid_argument, "rotation number estimate needs N >= 1");
  Real y = x;
  for (long i = 0; i < iterations; ++i) y = lift(y);
  unsigned bits = x.precision();
  return RotationEstimate{(y - x) / iterations, Real(1L, bits) / iterations};
}

}  // namespace aktower
