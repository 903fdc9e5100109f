#include "aktower/jet.hpp"

#include <array>
#include <mutex>
#include <string>

namespace aktower {

namespace {

void check_order(int n) {
  if (n < 1 || n > kMaxBrunoOrder)
    throw Error(Errc::bounds, "Bruno order must be in [1, 16], got " + std::to_string(n));
}

// Fills m[j-1] for j = part..1 so that the remaining weight is used up.
void enumerate_rec(int n, int part, int remaining, std::vector<int>& m, std::vector<BrunoTuple>& out) {
  if (part == 0) {
    if (remaining == 0) out.push_back(BrunoTuple{n, m});
    return;
  }
  for (int count = remaining / part; count >= 0; --count) {
    m[static_cast<size_t>(part - 1)] = count;
    enumerate_rec(n, part - 1, remaining - count * part, m, out);
  }
  m[static_cast<size_t>(part - 1)] = 0;
}

struct Term {
  long coefficient;
  int outer;                 // order of the outer derivative
  std::vector<int> m;        // multiplicities
};

// Terms of the order-k chain rule, cached for every k.
const std::vector<Term>& terms_of_order(int k) {
  static std::array<std::vector<Term>, kMaxBrunoOrder + 1> table;
  static std::once_flag once;
  std::call_once(once, [] {
    for (int n = 1; n <= kMaxBrunoOrder; ++n) {
      for (const auto& t : enumerate_bruno_tuples(n))
        table[static_cast<size_t>(n)].push_back(Term{bruno_coefficient(t).get_si(), t.total(), t.m});
    }
  });
  return table[static_cast<size_t>(k)];
}

// prod_j (g^(j))^(m_j) using precomputed powers.
Real monomial(const std::vector<std::vector<Real>>& powers, const std::vector<int>& m, unsigned bits) {
  Real p(1L, bits);
  for (size_t j = 0; j < m.size(); ++j)
    if (m[j] > 0) p *= powers[j + 1][static_cast<size_t>(m[j])];
  return p;
}

std::vector<std::vector<Real>> power_table(const Jet& g, int n, unsigned bits) {
  std::vector<std::vector<Real>> powers(static_cast<size_t>(n) + 1);
  for (int j = 1; j <= n; ++j) {
    auto& row = powers[static_cast<size_t>(j)];
    row.reserve(static_cast<size_t>(n / j) + 1);
    row.emplace_back(1L, bits);
    for (int e = 1; e <= n / j; ++e) row.push_back(row.back() * g[j]);
  }
  return powers;
}

}  // namespace

int BrunoTuple::total() const {
  int s = 0;
  for (int v : m) s += v;
  return s;
}

std::vector<BrunoTuple> enumerate_bruno_tuples(int n) {
  check_order(n);
  std::vector<BrunoTuple> out;
  std::vector<int> m(static_cast<size_t>(n), 0);
  enumerate_rec(n, n, n, m, out);
  return out;
}

BigInt bruno_coefficient(const BrunoTuple& t) {
  check_order(t.n);
  if (static_cast<int>(t.m.size()) != t.n) throw Error(Errc::invalid_argument, "Bruno tuple length differs from its order");
  long weight = 0;
  for (size_t j = 0; j < t.m.size(); ++j) {
    if (t.m[j] < 0) throw Error(Errc::invalid_argument, "negative Bruno multiplicity");
    weight += static_cast<long>(j + 1) * t.m[j];
  }
  if (weight != t.n) throw Error(Errc::invalid_argument, "Bruno tuple weight differs from its order");
  BigInt num, den = 1, f;
  mpz_fac_ui(num.get_mpz_t(), static_cast<unsigned long>(t.n));
  for (size_t j = 0; j < t.m.size(); ++j) {
    if (t.m[j] == 0) continue;
    mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(t.m[j]));
    den *= f;
    mpz_fac_ui(f.get_mpz_t(), j + 1);
    BigInt p;
    mpz_pow_ui(p.get_mpz_t(), f.get_mpz_t(), static_cast<unsigned long>(t.m[j]));
    den *= p;
  }
  return num / den;
}

BigInt bruno_coefficient_sum(int n) {
  BigInt sum = 0;
  for (const auto& t : enumerate_bruno_tuples(n)) sum += bruno_coefficient(t);
  return sum;
}

Jet::Jet(Real anchor, std::vector<Real> derivatives) : anchor_(std::move(anchor)), d_(std::move(derivatives)) {
  if (d_.empty()) throw Error(Errc::invalid_argument, "a jet needs at least its value");
}

Jet Jet::identity(const Real& x, int order) {
  std::vector<Real> d;
  d.reserve(static_cast<size_t>(order) + 1);
  d.push_back(x);
  for (int k = 1; k <= order; ++k) d.emplace_back(k == 1 ? 1L : 0L, x.precision());
  return Jet(x, std::move(d));
}

Jet Jet::constant(const Real& x, const Real& value, int order) {
  std::vector<Real> d(static_cast<size_t>(order) + 1, Real(value.precision()));
  d[0] = value;
  return Jet(x, std::move(d));
}

Jet Jet::truncated(int order) const {
  if (order > this->order()) throw Error(Errc::bounds, "cannot raise the order of a jet");
  return Jet(anchor_, std::vector<Real>(d_.begin(), d_.begin() + order + 1));
}

Real default_anchor_tolerance(const Real& value) {
  Real scale = max(Real(1L, value.precision()), abs(value));
  return ldexp(scale, -static_cast<long>(value.precision() / 2));
}

Jet jet_compose(const Jet& outer, const Jet& inner, int n) {
  return jet_compose(outer, inner, n, default_anchor_tolerance(inner.value()));
}

Jet jet_compose(const Jet& outer, const Jet& inner, int n, const Real& tolerance) {
  if (n < 0 || outer.order() < n || inner.order() < n) throw Error(Errc::bounds, "jet order too small for composition");
  if (n > kMaxBrunoOrder) throw Error(Errc::bounds, "composition order above 16");
  if (abs(outer.anchor() - inner.value()) > tolerance)
    throw Error(Errc::composition, "outer jet anchored at " + outer.anchor().to_decimal(20) + " but inner value is " +
                                       inner.value().to_decimal(20));
  unsigned bits = std::max(outer.value().precision(), inner.value().precision());
  auto powers = power_table(inner, n, bits);
  std::vector<Real> d;
  d.reserve(static_cast<size_t>(n) + 1);
  d.push_back(outer.value());
  for (int k = 1; k <= n; ++k) {
    Real sum(bits);
    for (const auto& term : terms_of_order(k)) {
      if (outer[term.outer].is_zero()) continue;
      sum += outer[term.outer] * monomial(powers, term.m, bits) * term.coefficient;
    }
    d.push_back(std::move(sum));
  }
  return Jet(inner.anchor(), std::move(d));
}

Jet jet_invert(const Jet& j, int n) {
  return jet_invert(j, n, ldexp(Real(1L, j.value().precision()), -static_cast<long>(j.value().precision() / 2)));
}

Jet jet_invert(const Jet& j, int n, const Real& threshold) {
  if (n < 0 || j.order() < n) throw Error(Errc::bounds, "jet order too small for inversion");
  if (n > kMaxBrunoOrder) throw Error(Errc::bounds, "inversion order above 16");
  unsigned bits = j.value().precision();
  std::vector<Real> g;
  g.reserve(static_cast<size_t>(n) + 1);
  g.push_back(j.anchor());
  if (n >= 1) {
    if (abs(j[1]) < threshold)
      throw Error(Errc::non_invertible, "first derivative " + j[1].to_decimal(12) + " below the inversion threshold");
    g.push_back(1L / j[1]);
  }
  if (n >= 2) {
    auto powers = power_table(j, n, bits);
    for (int k = 2; k <= n; ++k) {
      // G^(k)(f(x)) * f'(x)^k = -sum over tuples with m_1 != k.
      Real sum(bits);
      for (const auto& term : terms_of_order(k)) {
        if (term.m[0] == k) continue;
        sum += g[static_cast<size_t>(term.outer)] * monomial(powers, term.m, bits) * term.coefficient;
      }
      g.push_back(-sum / powers[1][static_cast<size_t>(k)]);
    }
  }
  return Jet(j.value(), std::move(g));
}

}  // namespace aktower
