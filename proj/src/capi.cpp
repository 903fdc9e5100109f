#include "aktower/aktower.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "aktower/measure.hpp"
#include "aktower/tower.hpp"
#include "aktower/tower_io.hpp"
#include "aktower/verify.hpp"

struct aktower_config {
  aktower::TowerConfig config;
};

struct aktower_tower {
  aktower::Tower tower;
};

namespace {

thread_local std::string g_last_error;

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

aktower_status fail(aktower_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

// Runs body, mapping exceptions to status codes.
template <class F>
aktower_status guard(F&& body) {
  try {
    g_last_error.clear();
    body();
    return AKTOWER_OK;
  } catch (const aktower::Error& e) {
    return fail(static_cast<aktower_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(AKTOWER_ERR_CAPACITY, "out of memory");
  } catch (const std::exception& e) {
    return fail(AKTOWER_ERR_INTERNAL, e.what());
  }
}

#define REQUIRE(cond, what) \
  if (!(cond)) return fail(AKTOWER_ERR_INVALID_ARGUMENT, what)

}  // namespace

extern "C" {

const char* aktower_status_name(aktower_status status) {
  switch (status) {
    case AKTOWER_OK: return "ok";
    case AKTOWER_ERR_INTERNAL: return "internal";
    default:
      if (status >= AKTOWER_ERR_INVALID_ARGUMENT && status <= AKTOWER_ERR_IO)
        return aktower::errc_name(static_cast<aktower::Errc>(static_cast<int>(status)));
      return "unknown";
  }
}

const char* aktower_last_error(void) { return g_last_error.c_str(); }

void aktower_string_free(char* s) { std::free(s); }

aktower_status aktower_config_new(aktower_config** out) {
  REQUIRE(out, "null output pointer");
  return guard([&] { *out = new aktower_config{}; });
}

void aktower_config_free(aktower_config* cfg) { delete cfg; }

aktower_status aktower_config_set_target(aktower_config* cfg, const char* text) {
  REQUIRE(cfg && text, "null argument");
  return guard([&] {
    aktower::Target::parse(text);
    cfg->config.target = text;
  });
}

aktower_status aktower_config_set_beta(aktower_config* cfg, const char* beta) {
  REQUIRE(cfg && beta, "null argument");
  return guard([&] {
    aktower::TowerConfig probe = cfg->config;
    probe.beta = aktower::parse_rational(beta);
    aktower::validate(probe);
    cfg->config = probe;
  });
}

aktower_status aktower_config_set_mode(aktower_config* cfg, const char* mode) {
  REQUIRE(cfg && mode, "null argument");
  return guard([&] { cfg->config.mode = aktower::parse_mode(mode); });
}

aktower_status aktower_config_set_q_cap(aktower_config* cfg, const char* q_cap) {
  REQUIRE(cfg, "null config");
  return guard([&] {
    if (!q_cap) {
      cfg->config.q_cap.reset();
      return;
    }
    aktower::BigRational q = aktower::parse_rational(q_cap);
    if (q.get_den() != 1) throw aktower::Error(aktower::Errc::invalid_argument, "q cap must be an integer");
    cfg->config.q_cap = q.get_num();
  });
}

aktower_status aktower_config_set_stages(aktower_config* cfg, int stages) {
  REQUIRE(cfg, "null config");
  return guard([&] { cfg->config.max_stage = stages; });
}

aktower_status aktower_config_set_precision(aktower_config* cfg, unsigned bits) {
  REQUIRE(cfg, "null config");
  return guard([&] { cfg->config.precision = bits; });
}

aktower_status aktower_config_set_sample_density(aktower_config* cfg, int density) {
  REQUIRE(cfg, "null config");
  return guard([&] { cfg->config.sample_density = density; });
}

aktower_status aktower_tower_build(const aktower_config* cfg, aktower_tower** out, char** failure_json) {
  REQUIRE(cfg && out, "null argument");
  if (failure_json) *failure_json = nullptr;
  return guard([&] {
    try {
      *out = new aktower_tower{aktower::build_tower(cfg->config)};
    } catch (const aktower::ConstructionFailure& f) {
      if (failure_json) *failure_json = dup(aktower::failure_to_json(f));
      throw;
    }
  });
}

aktower_status aktower_tower_load(const char* path, aktower_tower** out) {
  REQUIRE(path && out, "null argument");
  return guard([&] { *out = new aktower_tower{aktower::load_tower(path)}; });
}

aktower_status aktower_tower_save(const aktower_tower* t, const char* path, int with_timestamp) {
  REQUIRE(t && path, "null argument");
  return guard([&] { aktower::save_tower(t->tower, path, with_timestamp != 0); });
}

aktower_status aktower_tower_to_json(const aktower_tower* t, int with_timestamp, char** out) {
  REQUIRE(t && out, "null argument");
  return guard([&] { *out = dup(aktower::tower_to_json(t->tower, with_timestamp != 0)); });
}

void aktower_tower_free(aktower_tower* t) { delete t; }

aktower_status aktower_tower_depth(const aktower_tower* t, int* out) {
  REQUIRE(t && out, "null argument");
  *out = t->tower.depth();
  return AKTOWER_OK;
}

aktower_status aktower_tower_precision(const aktower_tower* t, unsigned* out) {
  REQUIRE(t && out, "null argument");
  *out = t->tower.precision();
  return AKTOWER_OK;
}

aktower_status aktower_tower_rotation_only(const aktower_tower* t, int* out) {
  REQUIRE(t && out, "null argument");
  *out = t->tower.rotation_only() ? 1 : 0;
  return AKTOWER_OK;
}

aktower_status aktower_stage_tau(const aktower_tower* t, int n, char** out) {
  REQUIRE(t && out, "null argument");
  return guard([&] { *out = dup(aktower::to_string(t->tower.stage(n).tau())); });
}

aktower_status aktower_stage_s(const aktower_tower* t, int n, char** out) {
  REQUIRE(t && out, "null argument");
  return guard([&] { *out = dup(aktower::to_string(t->tower.stage(n).s)); });
}

aktower_status aktower_stage_delta(const aktower_tower* t, int n, unsigned digits, char** out) {
  REQUIRE(t && out, "null argument");
  return guard([&] { *out = dup(t->tower.stage(n).delta.to_decimal(static_cast<int>(digits))); });
}

aktower_status aktower_eval_h(const aktower_tower* t, int k, const char* x, int inverse, unsigned digits,
                              char** out) {
  REQUIRE(t && x && out, "null argument");
  return guard([&] {
    aktower::Real v = aktower::Real::parse(x, t->tower.precision());
    aktower::Real r = inverse ? t->tower.eval_h_inv(k, v) : t->tower.eval_h(k, v);
    *out = dup(r.to_decimal(static_cast<int>(digits)));
  });
}

aktower_status aktower_eval_f(const aktower_tower* t, int n, const char* x, unsigned digits, char** out) {
  REQUIRE(t && x && out, "null argument");
  return guard([&] {
    aktower::Real v = aktower::Real::parse(x, t->tower.precision());
    *out = dup(t->tower.eval_f(n, v).to_decimal(static_cast<int>(digits)));
  });
}

aktower_status aktower_rotation_number(const aktower_tower* t, int n, const char* x, long iterations,
                                       unsigned digits, char** value, char** error_bar) {
  REQUIRE(t && x && value && error_bar, "null argument");
  return guard([&] {
    const aktower::Tower& tw = t->tower;
    aktower::Real v = aktower::Real::parse(x, tw.precision());
    auto est = aktower::rotation_number_estimate([&](const aktower::Real& y) { return tw.lift_f(n, y); }, v,
                                                 iterations);
    *value = dup(est.value.to_decimal(static_cast<int>(digits)));
    *error_bar = dup(est.error_bar.to_decimal(static_cast<int>(digits)));
  });
}

aktower_status aktower_verify(const aktower_tower* t, uint64_t seed, int samples, int as_json, int with_timestamp,
                              int* ok, char** report) {
  REQUIRE(t && ok && report, "null argument");
  REQUIRE(samples > 0, "samples must be positive");
  return guard([&] {
    aktower::VerifyOptions opt;
    opt.seed = seed;
    opt.samples = samples;
    auto r = aktower::verify_tower(t->tower, opt);
    *ok = r.ok() ? 1 : 0;
    *report = dup(as_json ? r.json(with_timestamp != 0) : r.text());
  });
}

aktower_status aktower_dim(const aktower_tower* t, uint64_t seed, size_t points_per_stage, char** report_json,
                           char** rows_csv, char** curves_csv) {
  REQUIRE(t && report_json && rows_csv && curves_csv, "null argument");
  REQUIRE(points_per_stage > 0, "points_per_stage must be positive");
  return guard([&] {
    aktower::DimOptions opt;
    opt.seed = seed;
    opt.points_per_stage = points_per_stage;
    auto rep = aktower::analyze_tower(t->tower, opt);
    auto summary = aktower::dim_summary({rep});
    *report_json = dup(aktower::report_json(rep, summary));
    *rows_csv = dup(aktower::rows_csv(rep));
    *curves_csv = dup(aktower::curves_csv(rep));
  });
}

}  // extern "C"
