#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aktower/aktower.h"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct CString {
  char* p = nullptr;
  ~CString() { aktower_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

struct TowerHandle {
  aktower_tower* t = nullptr;
  ~TowerHandle() { aktower_tower_free(t); }
};

struct ConfigHandle {
  aktower_config* c = nullptr;
  ~ConfigHandle() { aktower_config_free(c); }
};

// Input problems are usage errors; everything else is a run failure.
int exit_code_for(aktower_status s) {
  switch (s) {
    case AKTOWER_ERR_INVALID_ARGUMENT:
    case AKTOWER_ERR_PARSE:
    case AKTOWER_ERR_PARAMETER:
    case AKTOWER_ERR_IO:
      return kExitUsage;
    default:
      return kExitFailure;
  }
}

int report_error(aktower_status s, const std::string& context) {
  std::cerr << "aktower: " << context << ": " << aktower_last_error() << " [" << aktower_status_name(s) << "]\n";
  return exit_code_for(s);
}

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.close();
  if (!out) {
    std::cerr << "aktower: cannot write " << path << "\n";
    return false;
  }
  return true;
}

// Long integers in p/q strings are shortened for the console; files keep them whole.
std::string abbreviate(const std::string& text) {
  auto shorten = [](const std::string& z) {
    if (z.size() <= 24) return z;
    return z.substr(0, 8) + "...[" + std::to_string(z.size()) + " digits]";
  };
  auto slash = text.find('/');
  if (slash == std::string::npos) return shorten(text);
  return shorten(text.substr(0, slash)) + "/" + shorten(text.substr(slash + 1));
}

unsigned default_precision() {
  if (const char* env = std::getenv("AKTOWER_PRECISION")) {
    try {
      long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    std::cerr << "aktower: ignoring AKTOWER_PRECISION='" << env << "'\n";
  }
  return 256;
}

struct BuildArgs {
  std::string target = "series:base=10,exponents=factorial";
  std::string beta = "0";
  std::string mode = "relaxed";
  std::string q_cap;
  int stages = 3;
  std::optional<unsigned> precision;
  int density = 256;
  std::string out = "tower.json";
  bool no_timestamp = false;
};

int run_build(const BuildArgs& a) {
  ConfigHandle cfg;
  aktower_status s = aktower_config_new(&cfg.c);
  if (s != AKTOWER_OK) return report_error(s, "config");
  unsigned bits = a.precision.value_or(default_precision());
  if ((s = aktower_config_set_target(cfg.c, a.target.c_str())) != AKTOWER_OK) return report_error(s, "--target");
  if ((s = aktower_config_set_beta(cfg.c, a.beta.c_str())) != AKTOWER_OK) return report_error(s, "--beta");
  if ((s = aktower_config_set_mode(cfg.c, a.mode.c_str())) != AKTOWER_OK) return report_error(s, "--mode");
  if ((s = aktower_config_set_q_cap(cfg.c, a.q_cap.empty() ? nullptr : a.q_cap.c_str())) != AKTOWER_OK)
    return report_error(s, "--q-cap");
  if ((s = aktower_config_set_stages(cfg.c, a.stages)) != AKTOWER_OK) return report_error(s, "--stages");
  if ((s = aktower_config_set_precision(cfg.c, bits)) != AKTOWER_OK) return report_error(s, "--precision");
  if ((s = aktower_config_set_sample_density(cfg.c, a.density)) != AKTOWER_OK) return report_error(s, "--density");

  TowerHandle tower;
  CString failure;
  s = aktower_tower_build(cfg.c, &tower.t, &failure.p);
  if (s == AKTOWER_ERR_CONSTRUCTION) {
    std::cerr << "aktower: construction failed: " << aktower_last_error() << "\n";
    std::cout << failure.str();
    return kExitFailure;
  }
  if (s != AKTOWER_OK) return report_error(s, "build");
  if ((s = aktower_tower_save(tower.t, a.out.c_str(), a.no_timestamp ? 0 : 1)) != AKTOWER_OK)
    return report_error(s, "save");
  int depth = 0;
  aktower_tower_depth(tower.t, &depth);
  std::cout << "wrote " << a.out << " (" << depth << " stages)\n";
  for (int n = 1; n <= depth; ++n) {
    CString tau, sn, delta;
    aktower_stage_tau(tower.t, n, &tau.p);
    aktower_stage_s(tower.t, n, &sn.p);
    aktower_stage_delta(tower.t, n, 6, &delta.p);
    std::cout << "  stage " << n << ": tau = " << abbreviate(tau.str()) << ", s = " << abbreviate(sn.str())
              << ", delta = " << delta.str() << "\n";
  }
  return 0;
}

int load(const std::string& path, TowerHandle& h) {
  aktower_status s = aktower_tower_load(path.c_str(), &h.t);
  if (s != AKTOWER_OK) return report_error(s, "load " + path);
  return 0;
}

struct EvalArgs {
  std::string tower = "tower.json";
  std::string map = "h";
  int index = 0;
  std::vector<std::string> xs;
  unsigned digits = 30;
};

int run_eval(const EvalArgs& a) {
  TowerHandle h;
  if (int rc = load(a.tower, h)) return rc;
  int depth = 0;
  aktower_tower_depth(h.t, &depth);
  int k = a.index > 0 ? a.index : (a.map == "f" ? depth : depth + 1);
  for (const auto& x : a.xs) {
    CString out;
    aktower_status s = a.map == "f" ? aktower_eval_f(h.t, k, x.c_str(), a.digits, &out.p)
                                    : aktower_eval_h(h.t, k, x.c_str(), a.map == "hinv" ? 1 : 0, a.digits, &out.p);
    if (s != AKTOWER_OK) return report_error(s, "eval " + a.map + "_" + std::to_string(k) + "(" + x + ")");
    std::cout << a.map << "_" << k << "(" << x << ") = " << out.str() << "\n";
  }
  return 0;
}

struct DimArgs {
  std::string tower = "tower.json";
  std::uint64_t seed = 1;
  size_t points = 64;
  std::string out;
};

int run_dim(const DimArgs& a) {
  TowerHandle h;
  if (int rc = load(a.tower, h)) return rc;
  CString json, rows, curves;
  aktower_status s = aktower_dim(h.t, a.seed, a.points, &json.p, &rows.p, &curves.p);
  if (s != AKTOWER_OK) return report_error(s, "dim");
  if (a.out.empty()) {
    std::cout << json.str();
    return 0;
  }
  bool ok = write_file(a.out + ".json", json.str()) && write_file(a.out + "_rows.csv", rows.str()) &&
            write_file(a.out + "_curves.csv", curves.str());
  if (!ok) return kExitUsage;
  std::cout << "wrote " << a.out << ".json, " << a.out << "_rows.csv, " << a.out << "_curves.csv\n";
  return 0;
}

struct RotnumArgs {
  std::string tower = "tower.json";
  int n = 0;
  std::vector<std::string> xs{"0"};
  long iterations = 10000;
  unsigned digits = 20;
};

int run_rotnum(const RotnumArgs& a) {
  TowerHandle h;
  if (int rc = load(a.tower, h)) return rc;
  int depth = 0;
  aktower_tower_depth(h.t, &depth);
  int n = a.n > 0 ? a.n : depth;
  CString tau;
  aktower_status s = aktower_stage_tau(h.t, n, &tau.p);
  if (s != AKTOWER_OK) return report_error(s, "stage " + std::to_string(n));
  std::cout << "tau_" << n << " = " << abbreviate(tau.str()) << "\n";
  for (const auto& x : a.xs) {
    CString value, bar;
    s = aktower_rotation_number(h.t, n, x.c_str(), a.iterations, a.digits, &value.p, &bar.p);
    if (s != AKTOWER_OK) return report_error(s, "rotnum");
    std::cout << "x = " << x << ": rho ~ " << value.str() << " +/- " << bar.str() << "\n";
  }
  return 0;
}

struct VerifyArgs {
  std::string tower = "tower.json";
  std::uint64_t seed = 1;
  int samples = 200;
  bool json = false;
  bool no_timestamp = false;
  std::string out;
};

int run_verify(const VerifyArgs& a) {
  TowerHandle h;
  if (int rc = load(a.tower, h)) return rc;
  int ok = 0;
  CString report;
  aktower_status s = aktower_verify(h.t, a.seed, a.samples, a.json ? 1 : 0, a.no_timestamp ? 0 : 1, &ok, &report.p);
  if (s != AKTOWER_OK) return report_error(s, "verify");
  if (a.out.empty()) std::cout << report.str();
  else if (!write_file(a.out, report.str())) return kExitUsage;
  if (!ok) {
    std::cerr << "aktower: verify failed\n";
    return kExitFailure;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conjugacy towers for circle diffeomorphisms with singular invariant measures"};
  app.require_subcommand(1);

  BuildArgs build;
  auto* b = app.add_subcommand("build", "Construct a tower and write it as JSON");
  b->add_option("--target", build.target, "Rotation number: series:..., cf:a0,a1,... or rat:p/q");
  b->add_option("--beta", build.beta, "Hoelder exponent in [0, 1], as p/q or decimal");
  b->add_option("--mode", build.mode, "strict or relaxed")->check(CLI::IsMember({"strict", "relaxed"}));
  b->add_option("--q-cap", build.q_cap, "Largest admissible denominator (relaxed mode)");
  b->add_option("--stages", build.stages, "Number of stages")->check(CLI::Range(1, 64));
  b->add_option("--precision", build.precision, "Working precision in bits (default: $AKTOWER_PRECISION or 256)");
  b->add_option("--density", build.density, "Grid density for norm and extrema scans")->check(CLI::PositiveNumber);
  b->add_option("--out", build.out, "Output path");
  b->add_flag("--no-timestamp", build.no_timestamp, "Omit generated_at");

  EvalArgs eval;
  auto* e = app.add_subcommand("eval", "Evaluate h_k, its inverse or f_n");
  e->add_option("--tower", eval.tower, "Tower file");
  e->add_option("--map", eval.map, "h, hinv or f")->check(CLI::IsMember({"h", "hinv", "f"}));
  e->add_option("--index", eval.index, "k for h_k (default depth+1) or n for f_n (default depth)");
  e->add_option("--x", eval.xs, "Points in [0, 1)")->required();
  e->add_option("--digits", eval.digits, "Significant digits printed");

  DimArgs dim;
  auto* d = app.add_subcommand("dim", "Pointwise and box-counting dimension estimates");
  d->add_option("--tower", dim.tower, "Tower file");
  d->add_option("--seed", dim.seed, "Sampling seed");
  d->add_option("--points", dim.points, "Sample points per group")->check(CLI::PositiveNumber);
  d->add_option("--out", dim.out, "Output prefix for <prefix>.json, <prefix>_rows.csv and <prefix>_curves.csv");

  RotnumArgs rot;
  auto* r = app.add_subcommand("rotnum", "Rotation number of f_n from lift iteration");
  r->add_option("--tower", rot.tower, "Tower file");
  r->add_option("--n", rot.n, "Stage (default: deepest)");
  r->add_option("--x", rot.xs, "Base points");
  r->add_option("--iterations", rot.iterations, "Lift iterations N")->check(CLI::PositiveNumber);
  r->add_option("--digits", rot.digits, "Significant digits printed");

  VerifyArgs ver;
  auto* v = app.add_subcommand("verify", "Run the invariant suite on a tower file");
  v->add_option("--tower", ver.tower, "Tower file");
  v->add_option("--seed", ver.seed, "Sampling seed");
  v->add_option("--samples", ver.samples, "Samples per sampled check")->check(CLI::PositiveNumber);
  v->add_flag("--json", ver.json, "JSON report instead of text");
  v->add_flag("--no-timestamp", ver.no_timestamp, "Omit generated_at from the JSON report");
  v->add_option("--out", ver.out, "Write the report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::CallForAllHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    app.exit(ex);
    return kExitUsage;
  }

  if (b->parsed()) return run_build(build);
  if (e->parsed()) return run_eval(eval);
  if (d->parsed()) return run_dim(dim);
  if (r->parsed()) return run_rotnum(rot);
  return run_verify(ver);
}
