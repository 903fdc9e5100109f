#include <doctest.h>

#include "aktower/rotation.hpp"
#include "support.hpp"

using namespace aktower;
using testing::near;
using testing::R;

namespace {

std::vector<Convergent> first(const Target& t, int count) {
  auto s = t.stream();
  std::vector<Convergent> out;
  for (int i = 0; i < count; ++i) {
    auto c = s->next();
    if (!c) break;
    out.push_back(*c);
  }
  return out;
}

}  // namespace

TEST_SUITE("rotation") {
  TEST_CASE("convergents of sqrt 2") {
    auto cs = first(Target::parse("cf:1,(2)"), 6);
    const long p[] = {1, 3, 7, 17, 41, 99}, q[] = {1, 2, 5, 12, 29, 70};
    REQUIRE(cs.size() == 6);
    for (size_t i = 0; i < 6; ++i) {
      CHECK(cs[i].p == p[i]);
      CHECK(cs[i].q == q[i]);
      CHECK(cs[i].side == (i % 2 == 0 ? 1 : -1));
    }
    // the last listed coefficient repeats, so these agree
    auto listed = first(Target::parse("cf:1,2,2,2"), 10), periodic = first(Target::parse("cf:1,(2)"), 10);
    REQUIRE(listed.size() == periodic.size());
    for (size_t i = 0; i < listed.size(); ++i) CHECK(listed[i].value() == periodic[i].value());
  }

  TEST_CASE("error magnitudes bracket the true distance") {
    Real sqrt2 = sqrt(Real(2L, 512));
    for (const auto& c : first(Target::parse("cf:1,(2)"), 12)) {
      Real err = abs(sqrt2 - Real(c.value(), 512));
      CHECK(err <= c.upper.value(512) * (1L + Real::pow2(-200, 512)));
      CHECK(err >= c.lower.value(512) * (1L - Real::pow2(-200, 512)));
    }
  }

  TEST_CASE("factorial series convergents") {
    // tau = sum 10^-(k!) = 0.110001000...
    auto cs = first(Target::parse("series:base=10,exponents=factorial"), 4);
    REQUIRE(cs.size() >= 4);
    CHECK(cs[0].value() == 0);
    CHECK(cs[1].value() == BigRational(1, 10));
    CHECK(cs[2].value() == BigRational(11, 100));
    CHECK(cs[3].value() == BigRational(110001, 1000000));
    for (size_t i = 1; i < cs.size(); ++i) CHECK(cs[i].q > cs[i - 1].q);
  }

  TEST_CASE("rational targets end with the exact value") {
    auto cs = first(Target::parse("rat:7/10"), 20);
    REQUIRE_FALSE(cs.empty());
    CHECK(cs.back().value() == BigRational(7, 10));
    CHECK(cs.back().side == 0);
    CHECK(cs.back().upper.is_zero());
  }

  TEST_CASE("Liouville certificates") {
    // |sqrt 2 - 3/2| = 0.0857864376... < 1/2^3
    auto s = Target::parse("cf:1,(2)").stream();
    Convergent c = liouville_certificate(*s, 3, ScanBudget{});
    CHECK(c.p == 3);
    CHECK(c.q == 2);
    CHECK(near(abs(sqrt(Real(2L, 256)) - R("1.5")), "0.085786437626904951198311275790301921430328124623052", -150));
    auto s4 = Target::parse("cf:1,(2)").stream();
    try {
      liouville_certificate(*s4, 4, ScanBudget{60, 1L << 12});
      FAIL("sqrt 2 should not certify at order 4");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::target);
    }
    auto f = Target::parse("series:base=10,exponents=factorial").stream();
    Convergent c5 = liouville_certificate(*f, 5, ScanBudget{});
    CHECK(c5.q >= 1000000);
  }

  TEST_CASE("Diophantine scan of the golden mean") {
    auto s = Target::parse("cf:(1)").stream();
    auto good = diophantine_scan(*s, Real(1L, 256), R("0.01"), ScanBudget{30, 1L << 20});
    CHECK(good.size() >= 25);
    auto s2 = Target::parse("cf:(1)").stream();
    auto none = diophantine_scan(*s2, R("0.01"), Real(1L, 256), ScanBudget{30, 1L << 20});
    CHECK(none.size() <= 2);
  }

  TEST_CASE("magnitude comparison") {
    Magnitude a = Magnitude::inverse_power(10, 6);
    Magnitude b = Magnitude::exact(BigRational(1, 1000));
    CHECK(compare(a, b) == -1);
    CHECK(certainly_lt(a, b));
    CHECK(certainly_le(b, b));
    Magnitude huge = Magnitude::inverse_power(2, BigInt("100000000000"));
    CHECK(compare(huge, a) == -1);
    CHECK(near(a.value(256), "1e-6", -250));
    CHECK(near(b.log2(256), log2(R("0.001")), -240));
  }

  TEST_CASE("target parsing errors") {
    for (const char* bad : {"", "foo", "cf:", "cf:1", "cf:1,0,3", "cf:1,(2", "series:base=1", "series:base=10,exponents=zeta",
                            "rat:1/0", "rat:x"}) {
      CAPTURE(bad);
      CHECK_THROWS_AS(Target::parse(bad), Error);
    }
  }

  TEST_CASE("property: canonical text reparses to the same stream") {
    for (const char* spec : {"cf:0,3,(1,2)", "series:base=2,exponents=geometric:3", "series:base=3,exponents=power:4",
                             "rat:22/7", "series:base=10,exponents=factorial"}) {
      Target a = Target::parse(spec);
      Target b = Target::parse(a.canonical());
      CHECK(a.canonical() == b.canonical());
      auto ca = first(a, 8), cb = first(b, 8);
      REQUIRE(ca.size() == cb.size());
      for (size_t i = 0; i < ca.size(); ++i) CHECK(ca[i].value() == cb[i].value());
    }
  }

  TEST_CASE("rotation number of a rigid rotation") {
    Real tau = R("0.3");
    auto est = rotation_number_estimate([&](const Real& x) { return x + tau; }, R("0.1"), 1000);
    CHECK(near(est.value, tau, -200));
    CHECK(est.error_bar == R("0.001"));
    CHECK_THROWS_AS(rotation_number_estimate([](const Real& x) { return x; }, R("0"), 0), Error);
  }
}
