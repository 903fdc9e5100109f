#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "aktower/rotation.hpp"
#include "aktower/staircase.hpp"

namespace aktower {

enum class TowerMode { strict, relaxed };
const char* mode_name(TowerMode m);
TowerMode parse_mode(std::string_view text);

struct TowerConfig {
  std::string target = "series:base=10,exponents=factorial";
  BigRational beta{0};
  TowerMode mode = TowerMode::relaxed;
  std::optional<BigInt> q_cap;
  int max_stage = 3;
  unsigned precision = kDefaultPrecision;
  int sample_density = 256;
  BumpParams bump;
  ScanBudget budget;
};

void validate(const TowerConfig& c);

struct ConditionCheck {
  std::string id;
  bool holds = false;
  std::string measured;
  std::string required;
  // Promised only for sufficiently large n.
  bool asymptotic_only = false;
};

struct TowerStage {
  int n = 0;
  BigInt p, q{1};
  BigRational s;
  Real delta;
  bool identity = false;  // no staircase at this stage (delta >= s/2 or rotation-only)
  std::shared_ptr<const Staircase> A;
  Real M, m;  // extrema of h_n'
  std::string extrema_method;
  Magnitude error_upper, error_lower;
  Real h_norm;   // ||h_n||_{n+1} (estimate in relaxed mode, bound in strict mode)
  Real c_tilde;  // c~(h_n, n+1)
  std::vector<ConditionCheck> conditions;

  BigRational tau() const { return BigRational(p, q); }
  bool all_pass() const;
};

// h = A_k o ... o A_1 as a lift; identity entries are skipped.
class Chain {
 public:
  explicit Chain(unsigned bits) : bits_(bits) {}
  Chain(std::vector<std::shared_ptr<const Staircase>> maps, unsigned bits);

  unsigned precision() const { return bits_; }
  size_t size() const { return maps_.size(); }
  const Staircase& at(size_t i) const { return *maps_[i]; }
  const std::vector<std::shared_ptr<const Staircase>>& maps() const { return maps_; }
  // Sub-chain of the first k maps.
  Chain prefix(size_t k) const;

  Real eval(const Real& x) const;
  Real eval_inverse(const Real& y) const;
  Real derivative(const Real& x) const;
  Jet jet(const Real& x, int n) const;
  Jet inverse_jet(const Real& y, int n) const;

 private:
  std::vector<std::shared_ptr<const Staircase>> maps_;
  unsigned bits_;
};

// Sample points concentrating on every staircase's curved zones; deterministic.
std::vector<Real> structured_grid(const Chain& h, int density);

// max(c_n ||h||^n rho_n, c_n ||h|| rho_1...rho_n)
Real compose_norm_constant(const Real& h_norm, int n, const StaircaseConstants& c);
// Grid estimate of max(||h||*_n, ||h^-1||*_n).
Real chain_norm(const Chain& h, int n, int density);

// Extrema of h' over the circle: a scan with slack, clamped by the product bounds.
struct Extrema {
  Real M, m;
  std::string method;
};
Extrema chain_extrema(const Chain& h, const Real& M_prev, const Real& m_prev, int density);

class ConstructionFailure : public Error {
 public:
  ConstructionFailure(std::string what, int stage, std::vector<ConditionCheck> report)
      : Error(Errc::construction, std::move(what)), stage_(stage), report_(std::move(report)) {}
  int stage() const { return stage_; }
  const std::vector<ConditionCheck>& report() const { return report_; }

 private:
  int stage_;
  std::vector<ConditionCheck> report_;
};

class Tower {
 public:
  // Empty tower (no stages).
  explicit Tower(TowerConfig config);
  // Builds stages 1..max_stage.
  static Tower build(const TowerConfig& config);
  // Restores a tower from stored stages without re-running the selection.
  static Tower restore(TowerConfig config, std::vector<TowerStage> stages, Real M_next, Real m_next);

  void extend();

  const TowerConfig& config() const { return config_; }
  const Target& target() const { return target_; }
  const std::vector<TowerStage>& stages() const { return stages_; }
  const TowerStage& stage(int n) const;
  int depth() const { return static_cast<int>(stages_.size()); }
  bool rotation_only() const { return config_.beta == 1; }
  std::shared_ptr<const BumpProfile> bump() const { return bump_; }
  unsigned precision() const { return config_.precision; }

  // Extrema of h_k' for k in [1, depth + 1].
  const Real& M(int k) const;
  const Real& m(int k) const;

  // h_k = A_{k-1} o ... o A_1, k in [1, depth + 1].
  Chain h(int k) const;
  bool evaluable(int k) const;
  Real eval_h(int k, const Real& x) const;
  Real eval_h_inv(int k, const Real& y) const;
  // Lift F_n(x) = h_n^-1(h_n(x) + tau_n) and its circle reduction.
  Real lift_f(int n, const Real& x) const;
  Real eval_f(int n, const Real& x) const;

  std::vector<ConditionCheck> condition_report() const;

 private:
  void add_first_stage();
  void add_stage();
  void finish_stage(TowerStage& st);
  Real h_norm_for(int n) const;  // ||h_n||_{n+1}

  TowerConfig config_;
  Target target_;
  std::shared_ptr<const BumpProfile> bump_;
  std::vector<TowerStage> stages_;
  Real M_next_, m_next_;  // extrema of h_{depth+1}'
  std::string next_method_ = "exact";
};

Tower build_tower(const TowerConfig& config);
BigRational gamma_of(const BigRational& beta);
// 1/(beta + gamma/n)
BigRational delta_exponent(const BigRational& beta, int n);
// delta_n for the given s_n and m_n (beta = 0: s^n; otherwise m * s^(1/(beta + gamma/n))).
Real derive_delta(const BigRational& beta, int n, const BigRational& s, const Real& m, unsigned bits);

// Norm ||.||_n estimates for named maps: "id", "rot:n", "A:n", "h:k", "f:n".
Real cn_norm(const Tower& t, std::string_view map_id, int n);

struct DistanceReport {
  Real distance;
  Real distance_bound;  // c_k |tau_{n+1} - tau_n| ||h_{n+1}||_{k+1}^{k+1}
  bool within_bound = false;
  bool within_half_power = false;  // <= 1/2^n
};
DistanceReport distance_dn(const Tower& t, int n, int k);
// d_k(h^-1 R_t1 h, h^-1 R_t2 h) over a structured grid, plus its a-priori bound.
DistanceReport conjugate_distance(const Chain& h, const BigRational& t1, const BigRational& t2, int k, int density);

// Bound ||h_k||_order from the composition law, starting at ||h_1|| = 1.
Real chain_norm_bound(const std::vector<TowerStage>& stages, int k, int order, const StaircaseConstants& c);

}  // namespace aktower
