#include <doctest.h>

#include "aktower/bump.hpp"
#include "support.hpp"

using namespace aktower;
using testing::near;
using testing::R;

namespace {

std::shared_ptr<const BumpProfile> profile(unsigned bits = 256) { return BumpProfile::make(BumpParams{}, bits); }

}  // namespace

TEST_SUITE("bump") {
  TEST_CASE("mollifier normalization and tabulated integrals") {
    auto m = Mollifier::get(256);
    CHECK(near(m->normalization(), "2.25228362104358101049978125555983073007419543828876670267372029434748492195", -200));
    struct Row {
      const char* w;
      const char* cdf;
      const char* moment;
    };
    const Row rows[] = {
        {"0.0478", "0.539575405712592008829589086329891127760049823890346909764031857481595498778",
         "-0.166281507449639738707603721785071600328403996824699545911764973024185052937"},
        {"0.5", "0.877032716722670921914265974436416359462976962622663088722316578778334220618",
         "-0.0777415662168976457144662689835212630931101221752505701349525689297360662087"},
        {"-0.3", "0.259092025356192013004416786348001174109879099577062191316752596909213963237",
         "-0.131670694227157455391224167359708828784023348437611803544848013108635361699"},
    };
    for (const auto& row : rows) {
      Real c(256), mo(256);
      m->cdf_and_moment(R(row.w), c, mo);
      CHECK(near(c, row.cdf, -200));
      CHECK(near(mo, row.moment, -200));
    }
    Real c(256), mo(256);
    m->cdf_and_moment(Real(0L, 256), c, mo);
    CHECK(near(c, "0.5", -220));
    CHECK(near(mo, "-0.167226998854987664969635579299243653687551679484356035081329976514525704081", -200));
    m->cdf_and_moment(Real(-2L, 256), c, mo);
    CHECK(c.is_zero());
    m->cdf_and_moment(Real(2L, 256), c, mo);
    CHECK(c == Real(1L, 256));
  }

  TEST_CASE("g against the mollified clamp computed by quadrature") {
    auto g = profile();
    CHECK(near(g->eval(R("0.1")), "0.0026405643836992768868418985861429084949249891269971", -150));
    CHECK(near(g->eval(R("0.15")), "0.03597389771703261022017523191947624182825832246033", -150));
    CHECK(near(g->eval(R("0.88")), "0.98917703438860640187975037204238813728325614289503", -150));
    CHECK(near(g->eval(R("0.9")), "0.997359435616300723113158101413857091505075010873", -150));
    CHECK(g->eval(R("0.5")) == R("0.5"));
    CHECK(near(g_jet(*g, R("0.1"), 1)[1], "0.24950368758502363366310321600442666002393272120229", -150));
  }

  TEST_CASE("zones and knot values") {
    auto g = profile();
    CHECK(g->eval(Real(0L, 256)).is_zero());
    CHECK(g->eval(R("0.0625")).is_zero());
    CHECK(g->eval(Real(1L, 256)) == Real(1L, 256));
    CHECK(g->zone(R("0.05")) == BumpProfile::Zone::low_flat);
    CHECK(g->zone(R("0.1")) == BumpProfile::Zone::rise);
    CHECK(g->zone(R("0.5")) == BumpProfile::Zone::linear);
    CHECK(g->zone(R("0.9")) == BumpProfile::Zone::settle);
    CHECK(g->zone(R("0.95")) == BumpProfile::Zone::high_flat);
    // linear middle: (x - eps) / (1 - 2 eps)
    CHECK(near(g->eval(R("0.3")), R("0.175") * R("4/3"), -250));
    for (int i = 0; i < 4; ++i) CHECK(near(g->eval(g->knot(i)), g->knot_value(i), -200));
    CHECK_THROWS_AS(g->eval(R("1.5")), Error);
  }

  TEST_CASE("property: symmetry g(1 - x) = 1 - g(x) and monotonicity") {
    auto g = profile();
    testing::Gen gen(5);
    Real prev(0L, 256);
    for (int i = 0; i < 300; ++i) {
      Real x = gen.real(0, 1);
      CHECK(near(g->eval(1L - x), 1L - g->eval(x), -200));
    }
    for (int i = 0; i <= 400; ++i) {
      Real x = Real(i, 256) / 400L;
      Real v = g->eval(x);
      CHECK(v >= prev);
      prev = v;
    }
  }

  TEST_CASE("property: jet derivatives agree with difference quotients") {
    auto g = profile();
    testing::Gen gen(6);
    Real h = Real::pow2(-60, 256);
    for (int i = 0; i < 60; ++i) {
      Real x = gen.real(0.07, 0.93);
      Jet j = g->jet(x, 3);
      for (int k = 1; k <= 3; ++k) {
        Real lo = g->jet(x - h, k - 1)[k - 1], hi = g->jet(x + h, k - 1)[k - 1];
        Real dq = (hi - lo) / (2L * h);
        Real scale = max(Real(1L, 256), abs(j[k]));
        CHECK(abs(dq - j[k]) <= scale * Real::pow2(-100, 256));
      }
    }
  }

  TEST_CASE("kappa bounds dominate sampled derivatives") {
    auto g = profile();
    for (int n = 0; n <= 4; ++n) {
      Real k = g->kappa(n);
      for (int i = 1; i < 200; ++i) {
        Jet j = g->jet(Real(i, 256) / 200L, n);
        CHECK(abs(j[n]) <= k);
      }
    }
  }

  TEST_CASE("parameter validation") {
    BumpParams bad;
    bad.eta = BigRational(1, 4);  // eta must stay below eps
    CHECK_THROWS_AS(validate(bad), Error);
    BumpParams wide;
    wide.epsilon = BigRational(1, 2);
    CHECK_THROWS_AS(validate(wide), Error);
    CHECK_NOTHROW(validate(BumpParams{}));
  }
}
