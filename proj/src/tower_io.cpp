#include "aktower/tower_io.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace aktower {

using nlohmann::ordered_json;

namespace {

ordered_json magnitude_json(const Magnitude& m) {
  return ordered_json{{"coeff", to_string(m.coeff)}, {"base", to_string(m.base)}, {"exponent", to_string(m.exponent)}};
}

Magnitude magnitude_from(const ordered_json& j) {
  Magnitude m;
  m.coeff = parse_rational(j.at("coeff").get<std::string>());
  m.base = BigInt(j.at("base").get<std::string>());
  m.exponent = BigInt(j.at("exponent").get<std::string>());
  return m;
}

ordered_json checks_json(const std::vector<ConditionCheck>& checks) {
  ordered_json arr = ordered_json::array();
  for (const auto& c : checks)
    arr.push_back({{"id", c.id}, {"holds", c.holds}, {"measured", c.measured}, {"required", c.required},
                   {"asymptotic_only", c.asymptotic_only}});
  return arr;
}

std::vector<ConditionCheck> checks_from(const ordered_json& arr) {
  std::vector<ConditionCheck> out;
  for (const auto& c : arr)
    out.push_back(ConditionCheck{c.at("id").get<std::string>(), c.at("holds").get<bool>(),
                                 c.at("measured").get<std::string>(), c.at("required").get<std::string>(),
                                 c.value("asymptotic_only", false)});
  return out;
}

ordered_json bump_json(const BumpParams& b) {
  return ordered_json{{"epsilon", to_string(b.epsilon)},
                      {"eta", to_string(b.eta)},
                      {"quadrature_cells", b.quadrature_cells},
                      {"max_order", b.max_order}};
}

BumpParams bump_from(const ordered_json& j) {
  BumpParams b;
  b.epsilon = parse_rational(j.at("epsilon").get<std::string>());
  b.eta = parse_rational(j.at("eta").get<std::string>());
  b.quadrature_cells = j.at("quadrature_cells").get<int>();
  b.max_order = j.at("max_order").get<int>();
  return b;
}

}  // namespace

std::string utc_timestamp() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string tower_to_json(const Tower& t, bool timestamp) {
  const TowerConfig& c = t.config();
  ordered_json doc;
  doc["schema"] = kTowerSchema;
  doc["kind"] = "tower";
  if (timestamp) doc["generated_at"] = utc_timestamp();
  doc["config"] = {
      {"target", t.target().canonical()},
      {"beta", to_string(c.beta)},
      {"mode", mode_name(c.mode)},
      {"q_cap", c.q_cap ? ordered_json(to_string(*c.q_cap)) : ordered_json(nullptr)},
      {"max_stage", c.max_stage},
      {"precision", c.precision},
      {"sample_density", c.sample_density},
      {"bump", bump_json(c.bump)},
      {"budget", {{"max_terms", c.budget.max_terms}, {"max_q_bits", c.budget.max_q_bits}}},
  };
  ordered_json stages = ordered_json::array();
  for (const auto& st : t.stages()) {
    stages.push_back({
        {"n", st.n},
        {"p", to_string(st.p)},
        {"q", to_string(st.q)},
        {"s", to_string(st.s)},
        {"delta", st.delta.to_hex()},
        {"identity", st.identity},
        {"bump", bump_json(c.bump)},
        {"M", st.M.to_hex()},
        {"m", st.m.to_hex()},
        {"extrema_method", st.extrema_method},
        {"error_upper", magnitude_json(st.error_upper)},
        {"error_lower", magnitude_json(st.error_lower)},
        {"h_norm", st.h_norm.to_hex()},
        {"c_tilde", st.c_tilde.to_hex()},
        {"condition_report", checks_json(st.conditions)},
    });
  }
  doc["stages"] = std::move(stages);
  int next = t.depth() + 1;
  doc["next"] = {{"M", t.M(next).to_hex()}, {"m", t.m(next).to_hex()}};
  return doc.dump(2) + "\n";
}

std::string failure_to_json(const ConstructionFailure& f) {
  ordered_json doc;
  doc["schema"] = kTowerSchema;
  doc["kind"] = "construction-failure";
  doc["stage"] = f.stage();
  doc["message"] = f.what();
  doc["condition_report"] = checks_json(f.report());
  return doc.dump(2) + "\n";
}

Tower tower_from_json(std::string_view text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw Error(Errc::parse, std::string("tower file is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("schema").get<int>() != kTowerSchema)
      throw Error(Errc::parse, "unsupported tower schema " + doc.at("schema").dump());
    const auto& jc = doc.at("config");
    TowerConfig c;
    c.target = jc.at("target").get<std::string>();
    c.beta = parse_rational(jc.at("beta").get<std::string>());
    c.mode = parse_mode(jc.at("mode").get<std::string>());
    if (!jc.at("q_cap").is_null()) c.q_cap = BigInt(jc.at("q_cap").get<std::string>());
    c.max_stage = jc.at("max_stage").get<int>();
    c.precision = jc.at("precision").get<unsigned>();
    c.sample_density = jc.at("sample_density").get<int>();
    c.bump = bump_from(jc.at("bump"));
    c.budget.max_terms = jc.at("budget").at("max_terms").get<int>();
    c.budget.max_q_bits = jc.at("budget").at("max_q_bits").get<long>();
    validate(c);
    auto bump = BumpProfile::make(c.bump, c.precision);

    std::vector<TowerStage> stages;
    for (const auto& js : doc.at("stages")) {
      TowerStage st;
      st.n = js.at("n").get<int>();
      st.p = BigInt(js.at("p").get<std::string>());
      st.q = BigInt(js.at("q").get<std::string>());
      st.s = parse_rational(js.at("s").get<std::string>());
      st.delta = Real::parse(js.at("delta").get<std::string>(), c.precision);
      st.identity = js.at("identity").get<bool>();
      st.M = Real::parse(js.at("M").get<std::string>(), c.precision);
      st.m = Real::parse(js.at("m").get<std::string>(), c.precision);
      st.extrema_method = js.at("extrema_method").get<std::string>();
      st.error_upper = magnitude_from(js.at("error_upper"));
      st.error_lower = magnitude_from(js.at("error_lower"));
      st.h_norm = Real::parse(js.at("h_norm").get<std::string>(), c.precision);
      st.c_tilde = Real::parse(js.at("c_tilde").get<std::string>(), c.precision);
      st.conditions = checks_from(js.at("condition_report"));
      if (!st.identity) {
        // A tampered file may carry parameters no staircase accepts; keep the
        // stage so the verifier can name the broken invariant.
        try {
          st.A = std::make_shared<Staircase>(st.s, st.delta, bump);
        } catch (const Error&) {
          st.A = nullptr;
        }
      }
      stages.push_back(std::move(st));
    }
    Real M = Real::parse(doc.at("next").at("M").get<std::string>(), c.precision);
    Real m = Real::parse(doc.at("next").at("m").get<std::string>(), c.precision);
    return Tower::restore(std::move(c), std::move(stages), std::move(M), std::move(m));
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(Errc::parse, std::string("malformed tower file: ") + e.what());
  }
}

void save_tower(const Tower& t, const std::string& path, bool timestamp) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io, "cannot write " + path);
  out << tower_to_json(t, timestamp);
  if (!out) throw Error(Errc::io, "write failed for " + path);
}

Tower load_tower(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return tower_from_json(ss.str());
}

}  // namespace aktower
