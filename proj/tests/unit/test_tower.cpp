#include <doctest.h>

#include "aktower/tower.hpp"
#include "aktower/tower_io.hpp"
#include "fixtures.hpp"
#include "support.hpp"

using namespace aktower;
using testing::near;
using testing::R;

TEST_SUITE("tower") {
  TEST_CASE("stage exponents") {
    CHECK(gamma_of(0) == BigRational(1, 2));
    CHECK(gamma_of(BigRational(1, 2)) == BigRational(1, 4));
    CHECK(gamma_of(1) == 0);
    CHECK(delta_exponent(BigRational(1, 2), 1) == BigRational(4, 3));
    CHECK(delta_exponent(BigRational(1, 2), 2) == BigRational(8, 5));
    CHECK(derive_delta(0, 3, BigRational(1, 20), Real(1L, 256), 256) == R("1/8000"));
  }

  TEST_CASE("relaxed factorial tower with q <= 1000") {
    const Tower& t = fixtures::cap1000();
    REQUIRE(t.depth() == 3);
    const TowerStage& s1 = t.stage(1);
    CHECK(s1.identity);
    CHECK(s1.s == BigRational(1, 2));
    CHECK(s1.tau() == 0);
    const TowerStage& s2 = t.stage(2);
    CHECK(s2.q == 10);
    CHECK(s2.p == 1);
    CHECK(s2.s == BigRational(1, 20));
    CHECK(s2.delta == R("1/400"));
    const TowerStage& s3 = t.stage(3);
    CHECK(s3.q == 100);
    CHECK(s3.p == 11);
    CHECK(s3.s == BigRational(1, 2000));
    CHECK(s3.delta == R("1/8000000000"));
    // M_n, m_n: product of the staircase slope extremes
    CHECK(near(t.M(3), "25", -200));
    CHECK(near(t.m(3), "0.04", -200));
    CHECK(near(t.M(4), R("25") * t.stage(3).A->max_slope(), -150));
    CHECK(near(t.M(4), R("399999875/3"), -150));
    for (const auto& st : t.stages()) {
      CHECK(is_integer(BigRational(st.tau() / st.s)));
      CHECK(Real(st.s, 256) <= Real::pow2(-st.n, 256));
    }
  }

  TEST_CASE("h is the composition of the stage staircases") {
    const Tower& t = fixtures::cap1000();
    testing::Gen gen(31);
    for (int i = 0; i < 40; ++i) {
      Real x = gen.real(0, 1);
      Real direct = t.stage(3).A->eval(t.stage(2).A->eval(x));
      CHECK(near(t.eval_h(4, x), direct, -220));
      CHECK(near(t.eval_h_inv(4, t.eval_h(4, x)), x, -200));
      CHECK(t.eval_h(1, x) == x);
    }
  }

  TEST_CASE("property: f_n commutes with the s_n grid and has period q_n orbits") {
    const Tower& t = fixtures::cap1000();
    testing::Gen gen(32);
    for (int n = 2; n <= 3; ++n) {
      const TowerStage& st = t.stage(n);
      long q = st.q.get_si();
      for (int i = 0; i < 5; ++i) {
        Real x = gen.real(0, 1);
        Real y = x;
        for (long k = 0; k < q; ++k) y = t.lift_f(n, y);
        CHECK(near(y, x + Real(st.p, 256), -100));
      }
    }
  }

  TEST_CASE("beta = 1/2 first stage") {
    TowerConfig c;
    c.beta = BigRational(1, 2);
    c.q_cap = BigInt(1000);
    c.max_stage = 1;
    Tower t = build_tower(c);
    // smallest k with (1/k)^(4/3) < 1/(2k); k = 8 is an exact tie
    CHECK(t.stage(1).s == BigRational(1, 9));
    CHECK(near(t.stage(1).delta, pow(R("1/9"), R("4/3")), -200));
    CHECK_FALSE(t.stage(1).identity);
  }

  TEST_CASE("beta = 1 gives a rotation-only tower") {
    TowerConfig c;
    c.beta = 1;
    c.q_cap = BigInt(1000);
    Tower t = build_tower(c);
    CHECK(t.rotation_only());
    REQUIRE(t.depth() == 3);
    for (const auto& st : t.stages()) {
      CHECK(st.identity);
      CHECK(st.delta.is_zero());
      CHECK_FALSE(st.A);
    }
    CHECK(t.stage(3).s == BigRational(1, 2000));
    Real x = R("0.123");
    CHECK(t.eval_h(4, x) == x);
    CHECK(near(t.eval_f(3, x), x + R("0.11"), -240));
  }

  TEST_CASE("strict mode rejects sqrt 2 citing the Liouville condition") {
    TowerConfig c;
    c.target = "cf:1,2,2,2";
    c.mode = TowerMode::strict;
    c.max_stage = 2;
    try {
      build_tower(c);
      FAIL("sqrt 2 built in strict mode");
    } catch (const ConstructionFailure& f) {
      CHECK(f.stage() == 2);
      CHECK(std::string(f.what()).find("(ii)") != std::string::npos);
      bool cited = false;
      for (const auto& ck : f.report()) cited = cited || (ck.id.rfind("(ii)", 0) == 0 && !ck.holds);
      CHECK(cited);
    }
  }

  TEST_CASE("strict geometric series builds two certified stages") {
    const Tower& t = fixtures::strict_two_stage();
    REQUIRE(t.depth() == 2);
    CHECK(t.stage(2).all_pass());
    CHECK(t.stage(2).q == BigInt(1) << 4096);
    CHECK(t.stage(2).delta.exponent2() == -8193);
    CHECK_FALSE(t.evaluable(3));
    CHECK_THROWS_AS(t.eval_h(3, R("0.5")), Error);
  }

  TEST_CASE("relaxed mode without an admissible convergent") {
    TowerConfig c;
    c.q_cap = BigInt(5);
    try {
      build_tower(c);
      FAIL("expected a target error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::target);
    }
  }

  TEST_CASE("configuration validation") {
    TowerConfig c;
    c.beta = BigRational(3, 2);
    CHECK_THROWS_AS(validate(c), Error);
    TowerConfig d;
    d.max_stage = 0;
    CHECK_THROWS_AS(validate(d), Error);
    TowerConfig e;
    e.precision = 16;
    CHECK_THROWS_AS(validate(e), Error);
    TowerConfig f;
    f.target = "cf:";
    CHECK_THROWS_AS(build_tower(f), Error);
  }

  TEST_CASE("JSON roundtrip is byte-identical") {
    for (const Tower* t : {&fixtures::cap1000(), &fixtures::strict_two_stage()}) {
      std::string a = tower_to_json(*t, false);
      Tower back = tower_from_json(a);
      CHECK(tower_to_json(back, false) == a);
      CHECK(back.depth() == t->depth());
      for (int n = 1; n <= t->depth(); ++n) {
        CHECK(back.stage(n).delta == t->stage(n).delta);
        CHECK(back.stage(n).s == t->stage(n).s);
        CHECK(back.M(n + 1) == t->M(n + 1));
      }
    }
    std::string stamped = tower_to_json(fixtures::cap1000(), true);
    CHECK(stamped.find("generated_at") != std::string::npos);
    CHECK(tower_to_json(fixtures::cap1000(), false).find("generated_at") == std::string::npos);
  }

  TEST_CASE("malformed tower files") {
    CHECK_THROWS_AS(tower_from_json("{"), Error);
    CHECK_THROWS_AS(tower_from_json("{\"schema\": 99}"), Error);
    CHECK_THROWS_AS(load_tower("/nonexistent/tower.json"), Error);
    try {
      load_tower("/nonexistent/tower.json");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::io);
    }
  }

  TEST_CASE("conjugate distance for the identity chain is the rotation gap") {
    Chain id(256);
    auto r = conjugate_distance(id, BigRational(1, 10), BigRational(11, 100), 0, 16);
    CHECK(near(r.distance, "0.01", -200));
    CHECK(r.within_bound);
  }

  TEST_CASE("norms of named maps") {
    const Tower& t = fixtures::cap1000();
    CHECK(cn_norm(t, "id", 1) == Real(1L, 256));
    CHECK(near(cn_norm(t, "A:2", 1), "25", -100));
    CHECK(cn_norm(t, "h:3", 2) <= t.stage(2).A->norm_bound(2));
    CHECK_THROWS_AS(cn_norm(t, "bogus", 1), Error);
  }
}
