#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <string>

#include "aktower/aktower.h"

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  aktower_string_free(s);
  return out;
}

aktower_tower* cap1000() {
  aktower_config* cfg = nullptr;
  REQUIRE(aktower_config_new(&cfg) == AKTOWER_OK);
  REQUIRE(aktower_config_set_q_cap(cfg, "1000") == AKTOWER_OK);
  aktower_tower* t = nullptr;
  char* failure = nullptr;
  REQUIRE(aktower_tower_build(cfg, &t, &failure) == AKTOWER_OK);
  CHECK(failure == nullptr);
  aktower_config_free(cfg);
  return t;
}

}  // namespace

TEST_CASE("build, query and evaluate through the C interface") {
  aktower_tower* t = cap1000();
  int depth = 0;
  CHECK(aktower_tower_depth(t, &depth) == AKTOWER_OK);
  CHECK(depth == 3);
  char* s = nullptr;
  CHECK(aktower_stage_s(t, 2, &s) == AKTOWER_OK);
  CHECK(take(s) == "1/20");
  char* tau = nullptr;
  CHECK(aktower_stage_tau(t, 3, &tau) == AKTOWER_OK);
  CHECK(take(tau) == "11/100");

  char* y = nullptr;
  // grid points of s_2 = 1/20 are fixed by h_3
  REQUIRE(aktower_eval_h(t, 3, "0.2", 0, 20, &y) == AKTOWER_OK);
  CHECK(std::strtod(take(y).c_str(), nullptr) == doctest::Approx(0.2).epsilon(1e-15));
  REQUIRE(aktower_eval_h(t, 3, "0.0123", 0, 40, &y) == AKTOWER_OK);
  std::string ys = take(y);
  CHECK(std::strtod(ys.c_str(), nullptr) != doctest::Approx(0.0123).epsilon(1e-3));
  char* x = nullptr;
  REQUIRE(aktower_eval_h(t, 3, ys.c_str(), 1, 15, &x) == AKTOWER_OK);
  CHECK(std::strtod(take(x).c_str(), nullptr) == doctest::Approx(0.0123).epsilon(1e-12));

  char* v = nullptr;
  char* err = nullptr;
  REQUIRE(aktower_rotation_number(t, 2, "0.3", 1000, 10, &v, &err) == AKTOWER_OK);
  CHECK(std::strtod(take(v).c_str(), nullptr) == doctest::Approx(0.1).epsilon(1e-2));
  take(err);

  int ok = 0;
  char* report = nullptr;
  REQUIRE(aktower_verify(t, 1, 20, 1, 0, &ok, &report) == AKTOWER_OK);
  CHECK(ok == 1);
  CHECK(take(report).find("\"verify-report\"") != std::string::npos);
  aktower_tower_free(t);
}

TEST_CASE("save and reload keep the tower text") {
  aktower_tower* t = cap1000();
  char* a = nullptr;
  REQUIRE(aktower_tower_to_json(t, 0, &a) == AKTOWER_OK);
  std::string path = "capi_roundtrip_tower.json";
  REQUIRE(aktower_tower_save(t, path.c_str(), 0) == AKTOWER_OK);
  aktower_tower* back = nullptr;
  REQUIRE(aktower_tower_load(path.c_str(), &back) == AKTOWER_OK);
  char* b = nullptr;
  REQUIRE(aktower_tower_to_json(back, 0, &b) == AKTOWER_OK);
  CHECK(take(a) == take(b));
  std::remove(path.c_str());
  aktower_tower_free(back);
  aktower_tower_free(t);
}

TEST_CASE("errors come back as codes with a message") {
  aktower_config* cfg = nullptr;
  REQUIRE(aktower_config_new(&cfg) == AKTOWER_OK);
  CHECK(aktower_config_set_target(cfg, "bogus") == AKTOWER_ERR_PARSE);
  CHECK(std::string(aktower_last_error()).size() > 0);
  CHECK(aktower_config_set_beta(cfg, "3/2") != AKTOWER_OK);
  CHECK(aktower_config_set_mode(cfg, "lenient") != AKTOWER_OK);
  CHECK(aktower_config_set_target(nullptr, "cf:1,(2)") == AKTOWER_ERR_INVALID_ARGUMENT);

  REQUIRE(aktower_config_set_target(cfg, "cf:1,(2)") == AKTOWER_OK);
  REQUIRE(aktower_config_set_mode(cfg, "strict") == AKTOWER_OK);
  REQUIRE(aktower_config_set_stages(cfg, 2) == AKTOWER_OK);
  aktower_tower* t = nullptr;
  char* failure = nullptr;
  CHECK(aktower_tower_build(cfg, &t, &failure) == AKTOWER_ERR_CONSTRUCTION);
  CHECK(t == nullptr);
  std::string f = take(failure);
  CHECK(f.find("construction-failure") != std::string::npos);
  CHECK(f.find("(ii)") != std::string::npos);
  aktower_config_free(cfg);

  aktower_tower* missing = nullptr;
  CHECK(aktower_tower_load("/nonexistent/tower.json", &missing) == AKTOWER_ERR_IO);
  CHECK(std::string(aktower_status_name(AKTOWER_ERR_IO)) == "io error");
}
