#include <doctest.h>

#include <algorithm>

#include "aktower/measure.hpp"
#include "fixtures.hpp"
#include "support.hpp"

using namespace aktower;
using testing::near;
using testing::R;

namespace {

// Greedy cover of a union of disjoint intervals on the line, in exact arithmetic.
long greedy_cover(std::vector<std::pair<BigRational, BigRational>> arcs, const BigRational& eps) {
  std::sort(arcs.begin(), arcs.end());
  long count = 0;
  size_t i = 0;
  while (i < arcs.size()) {
    BigRational reach = arcs[i].first + eps;
    ++count;
    while (i < arcs.size() && arcs[i].second <= reach) ++i;
    if (i < arcs.size() && arcs[i].first <= reach) arcs[i].first = reach;
  }
  return count;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_SUITE("measure") {
  TEST_CASE("interval unions merge, wrap and intersect") {
    IntervalUnion u;
    u.add(R("0.1"), R("0.2"));
    u.add(R("0.15"), R("0.3"));
    u.add(R("0.9"), R("1.05"));  // crosses 0
    u.normalize();
    REQUIRE(u.size() == 3);
    CHECK(u.arcs()[0].a.is_zero());
    CHECK(near(u.arcs()[0].b, "0.05", -240));
    CHECK(near(u.total_length(), "0.35", -240));
    CHECK(near(u.max_arc_length(), "0.2", -240));

    IntervalUnion v;
    v.add(R("0.25"), R("0.95"));
    IntervalUnion w = u.intersect(v);
    CHECK(near(w.total_length(), "0.1", -240));
    CHECK(near(IntervalUnion::full_circle(256).total_length(), "1", -250));
  }

  TEST_CASE("property: minimal covers match an exact greedy count") {
    testing::Gen gen(41);
    for (int trial = 0; trial < 30; ++trial) {
      // dyadic endpoints inside [1/8, 7/8], so no cover benefits from wrapping
      long grid = 1L << 12;
      std::vector<long> cuts;
      long arcs = gen.integer(1, 12);
      for (long k = 0; k < 2 * arcs; ++k) cuts.push_back(gen.integer(grid / 8, 7 * grid / 8));
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
      if (cuts.size() % 2) cuts.pop_back();
      std::vector<std::pair<BigRational, BigRational>> exact;
      IntervalUnion u;
      for (size_t k = 0; k + 1 < cuts.size(); k += 2) {
        exact.emplace_back(make_rational(cuts[k], grid), make_rational(cuts[k + 1], grid));
        u.add(Real(exact.back().first, 256), Real(exact.back().second, 256));
      }
      u.normalize();
      BigRational eps = make_rational(gen.integer(1, 200), grid);
      CAPTURE(trial);
      CHECK(min_cover_count(u, Real(eps, 256)) == greedy_cover(exact, eps));
    }
  }

  TEST_CASE("ball masses") {
    DistributionFunction id = DistributionFunction::identity(256);
    testing::Gen gen(42);
    for (int i = 0; i < 20; ++i) {
      Real x = gen.real(0, 1), r = gen.real(1e-6, 0.4);
      CHECK(near(measure_ball(id, x, r), 2L * r, -240));
    }
    CHECK_THROWS_AS(measure_ball(id, R("0.5"), R("0.5")), Error);
  }

  TEST_CASE("E_2 carries all but delta_2 / s_2 of the measure") {
    const Tower& t = fixtures::cap1000();
    IntervalUnion e2 = build_E_n(t, 2);
    CHECK(e2.size() == 20);
    CHECK(near(e2.total_length(), "0.05", -240));
    CHECK(near(measure_of(DistributionFunction::of(t, 3), e2), "0.95", -200));
    auto arc = e_n_arc(t, 2, BigInt(3));
    CHECK(near(arc.a, "0.15", -240));
    CHECK(near(arc.b - arc.a, "0.0025", -240));
  }

  TEST_CASE("coverings of G_2 at the r_n scales") {
    const Tower& t = fixtures::cap1000();
    IntervalUnion g2 = build_G_k(t, 2);
    std::vector<Real> rn;
    for (const auto& sc : stage_scales(t))
      if (sc.ladder == "r_n") rn.push_back(sc.r);
    REQUIRE(rn.size() == 2);  // r_2 > r_3
    CHECK(min_cover_count(g2, rn[0]) == 20);
    CHECK(min_cover_count(g2, rn[1]) == 1906);
    for (const Real& r : rn) CHECK(min_cover_count(g2, r) <= 2000);
  }

  TEST_CASE("samplers are deterministic") {
    Sampler a(7, 256), b(7, 256), c(8, 256);
    bool differs = false;
    for (int i = 0; i < 20; ++i) {
      Real x = a.uniform(), y = b.uniform(), z = c.uniform();
      CHECK(x == y);
      CHECK(x >= Real(0L, 256));
      CHECK(x < Real(1L, 256));
      differs = differs || (x != z);
    }
    CHECK(differs);
    const Tower& t = fixtures::cap1000();
    Sampler s1(3, 256), s2(3, 256);
    auto p1 = sample_E_n(t, 3, 50, s1), p2 = sample_E_n(t, 3, 50, s2);
    REQUIRE(p1.size() == 50);
    for (size_t i = 0; i < p1.size(); ++i) CHECK(p1[i] == p2[i]);
  }

  TEST_CASE("identity baseline has dimension one") {
    DistributionFunction id = DistributionFunction::identity(256);
    DimOptions opt;
    opt.points_per_stage = 8;
    DimensionReport r = analyze_baseline(id, IntervalUnion::full_circle(256), opt, 100, 140, 4, 14);
    REQUIRE_FALSE(r.points.empty());
    for (const auto& p : r.points) {
      // log(2r) / log r = 1 - 1/100 at the coarsest scale 2^-100
      REQUIRE(p.lower);
      CHECK(abs(*p.lower - 1L) <= R("0.0101"));
    }
    REQUIRE_FALSE(r.curves.empty());
    CHECK(abs(r.curves.front().fit_slope - 1L) <= R("0.01"));
    CHECK(first_line(rows_csv(r)) == "group,x,ladder,stage,r,mass,ratio,flagged");
    CHECK(first_line(curves_csv(r)) == "label,eps,N,ratio");
    DimSummary s = dim_summary({r});
    CHECK(s.lower_box <= s.upper_box);
    CHECK(s.lower_pointwise <= s.upper_pointwise);
  }
}
