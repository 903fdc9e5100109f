#include <doctest.h>

#include "aktower/tower_io.hpp"
#include "aktower/verify.hpp"
#include "fixtures.hpp"
#include "support.hpp"

using namespace aktower;

namespace {

const InvariantResult* find(const VerifyReport& r, const std::string& name) {
  for (const auto& x : r.results)
    if (x.name == name) return &x;
  return nullptr;
}

VerifyOptions quick() {
  VerifyOptions o;
  o.samples = 40;
  o.rotation_iterations = 500;
  return o;
}

}  // namespace

TEST_SUITE("verify") {
  TEST_CASE("relaxed cap-1000 tower passes every invariant") {
    VerifyReport r = verify_tower(fixtures::cap1000(), quick());
    for (const auto& x : r.results) {
      CAPTURE(x.name);
      CAPTURE(x.detail);
      CHECK(x.status != CheckStatus::fail);
    }
    CHECK(r.ok());
    CHECK(r.text().find("verify: all invariants hold") != std::string::npos);
  }

  TEST_CASE("a tampered stage is named") {
    std::string json = tower_to_json(fixtures::cap1000(), false);
    auto at = json.find("\"1/20\"");
    REQUIRE(at != std::string::npos);
    json.replace(at, 6, "\"1/30\"");
    Tower bad = tower_from_json(json);
    VerifyReport r = verify_tower(bad, quick());
    CHECK_FALSE(r.ok());
    const InvariantResult* x = find(r, "stage 2: s_n = s_n-1/q_n");
    REQUIRE(x);
    CHECK(x->status == CheckStatus::fail);
  }

  TEST_CASE("reports are a pure function of tower and options") {
    VerifyReport a = verify_tower(fixtures::half_holder(), quick());
    VerifyReport b = verify_tower(fixtures::half_holder(), quick());
    CHECK(a.ok());
    CHECK(a.text() == b.text());
    CHECK(a.json(false) == b.json(false));
    CHECK(a.json(false).find("generated_at") == std::string::npos);
  }

  TEST_CASE("strict towers label unreachable stages") {
    VerifyReport r = verify_tower(fixtures::strict_two_stage(), quick());
    CHECK(r.ok());
    bool asymptotic = false;
    for (const auto& x : r.results) asymptotic = asymptotic || x.status == CheckStatus::asymptotic_only;
    CHECK(asymptotic);
    CHECK(std::string(status_name(CheckStatus::asymptotic_only)) == "ASYMPTOTIC-ONLY");
  }
}
