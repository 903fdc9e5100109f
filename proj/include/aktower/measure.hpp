#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "aktower/tower.hpp"

namespace aktower {

// Monotone circle map fixing 0, read as the distribution function of a measure.
class DistributionFunction {
 public:
  DistributionFunction(Chain h, std::string label);

  static DistributionFunction of(const Tower& t, int k);
  static DistributionFunction identity(unsigned bits);
  // One staircase of period 1/q and width delta: almost all mass sits on q
  // arcs of width delta, a smoothed stand-in for a periodic orbit.
  static DistributionFunction rational_orbit(long q, const Real& delta, std::shared_ptr<const BumpProfile> bump);

  const Chain& chain() const { return h_; }
  const std::string& label() const { return label_; }
  unsigned precision() const { return h_.precision(); }

  Real lift(const Real& x) const { return h_.eval(x); }
  Real inverse(const Real& y) const { return h_.eval_inverse(y); }

 private:
  Chain h_;
  std::string label_;
};

// Sorted, disjoint arcs [a, b) inside [0, 1]; an arc crossing 0 is stored as two pieces.
class IntervalUnion {
 public:
  struct Arc {
    Real a, b;
  };

  IntervalUnion() = default;
  static IntervalUnion full_circle(unsigned bits);
  // Accepts circle arcs with a in any lift and 0 < length <= 1.
  void add(const Real& a, const Real& b);
  void normalize();

  const std::vector<Arc>& arcs() const { return arcs_; }
  size_t size() const { return arcs_.size(); }
  Real total_length() const;
  Real max_arc_length() const;
  IntervalUnion intersect(const IntervalUnion& other) const;

 private:
  std::vector<Arc> arcs_;
  bool sorted_ = true;
};

// Delta h(x, r) = h(x + r) - h(x - r) via the lift; 0 < r < 1/2.
Real measure_ball(const DistributionFunction& h, const Real& x, const Real& r);
Real measure_of(const DistributionFunction& h, const IntervalUnion& set);

// Arc i of E_n = h_n^-1(union [i s_n, i s_n + delta_n]).
IntervalUnion::Arc e_n_arc(const Tower& t, int n, const BigInt& i);
IntervalUnion build_E_n(const Tower& t, int n, size_t max_arcs = size_t(1) << 20);
// G_k = intersection of E_k, ..., E_N over the built stages.
IntervalUnion build_G_k(const Tower& t, int k, size_t max_arcs = size_t(1) << 20);

// Deterministic uniform reals in [0, 1) carrying `bits` of precision.
class Sampler {
 public:
  Sampler(std::uint64_t seed, unsigned bits) : rng_(seed), bits_(bits) {}
  Real uniform();
  BigInt index(const BigInt& count);  // uniform in [0, count)
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
  unsigned bits_;
};

// Points of E_n chosen by a uniform arc index and a uniform offset inside the arc.
std::vector<Real> sample_E_n(const Tower& t, int n, size_t count, Sampler& sampler);
// Points distributed by the measure: h^-1(u) for uniform u.
std::vector<Real> sample_measure(const DistributionFunction& h, size_t count, Sampler& sampler);

struct ScaleSpec {
  Real r;
  std::string ladder;  // "r_n", "r~_n" or "dyadic"
  int stage = 0;
};

// r_n = delta_n / m_n and r~_n = (3 M_n)^-n for stages 2..depth, sorted decreasing.
std::vector<ScaleSpec> stage_scales(const Tower& t);
std::vector<ScaleSpec> dyadic_scales(int from_exponent, int to_exponent, unsigned bits);

struct ScanRow {
  Real x;
  ScaleSpec scale;
  Real mass;
  Real ratio;  // log mass / log r
  bool flagged = false;  // mass lost to cancellation at this precision
  std::string group;
};

struct PointSummary {
  Real x;
  std::string group;
  std::optional<Real> lower, upper;  // over unflagged rows
};

struct CoveringCurve {
  std::string label;
  std::vector<std::pair<Real, BigInt>> points;  // (eps, N)
  std::vector<Real> ratios;                     // log N / log(1/eps)
  Real fit_slope;                               // least squares of log N on log(1/eps)
};

struct HolderFit {
  Real beta;
  Real max_ratio;
  size_t pairs = 0;
  Real worst_x, worst_y;
};

struct DimSummary {
  Real hausdorff_proxy;
  Real lower_pointwise, upper_pointwise;
  Real lower_box, upper_box;
  bool ordering_holds = false;
  std::vector<std::string> notes;
};

struct DimensionReport {
  std::string source;
  int stage = 0;
  std::vector<ScanRow> rows;
  std::vector<PointSummary> points;
  std::vector<CoveringCurve> curves;
  std::optional<HolderFit> holder;
  std::optional<Real> gamma, sigma;
  std::vector<std::string> notes;
};

void pointwise_dim_scan(const DistributionFunction& h, const std::vector<Real>& points,
                        const std::vector<ScaleSpec>& scales, const std::string& group, DimensionReport& report);
// Exact minimal number of closed arcs of length eps covering the union.
BigInt min_cover_count(const IntervalUnion& set, const Real& eps);
CoveringCurve box_counting(const IntervalUnion& set, const std::vector<Real>& eps, const std::string& label);

// max |h(x) - h(y)| / |x - y|^beta over the given pairs (circle distance).
HolderFit holder_fit(const DistributionFunction& h, const Real& beta,
                     const std::vector<std::pair<Real, Real>>& pairs);
// Pairs at mixed scales: gaps drawn around delta_n, r_n, s_n, s_{n-1} of each
// built stage plus uniform gaps; anchors in E_n or uniform. gaps <= max_gap.
std::vector<std::pair<Real, Real>> holder_pairs(const Tower& t, size_t count, Sampler& sampler,
                                                std::optional<Real> max_gap = std::nullopt);

DimSummary dim_summary(const std::vector<DimensionReport>& reports);

struct DimOptions {
  std::uint64_t seed = 1;
  size_t points_per_stage = 64;
  size_t holder_pairs = 2000;
  int dyadic_from = 4, dyadic_to = 40;
};
// Scans of the deepest distribution function h_{N+1}: E_n points at the
// r_n / r~_n ladders, measure-distributed points, E_n and G_2 coverings and,
// for beta > 0, the Hoelder fit.
DimensionReport analyze_tower(const Tower& t, const DimOptions& opt);
// Identity and smoothed periodic-orbit references on dyadic ladders.
DimensionReport analyze_baseline(const DistributionFunction& h, const IntervalUnion& support, const DimOptions& opt,
                                 int scale_from, int scale_to, int eps_from, int eps_to);

std::string rows_csv(const DimensionReport& r);
std::string curves_csv(const DimensionReport& r);
std::string report_json(const DimensionReport& r, const DimSummary& s);

}  // namespace aktower
