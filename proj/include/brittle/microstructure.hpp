#pragma once

// Exact laminate recovery constructions on the unit square Q = (0,1)^2 and
// their closed-form energies, plus evaluation of the limit functional on
// piecewise-smooth displacement data with explicit jump segments.
//
// The constructions evaluate the eta_eps = eps functional with toughness
// alpha*kappa; under the reparametrization eps -> alpha*eps' this equals the
// eta_eps = alpha*eps model with toughness kappa, so the limiting bound
// sqrt(2 alpha kappa h(xi)) is the general-alpha one. Default alpha = 1.

#include <span>
#include <vector>

#include "brittle/densities.hpp"
#include "brittle/symcalc.hpp"

namespace brittle {

enum class LaminateCase { One, Two };

struct LaminateSpec {
  LaminateCase which = LaminateCase::One;
  SymMat xi = SymMat::zero(2);   // Case 1 target: diagonal 2x2, xi1*xi2 > 0
  std::array<double, 2> a{}, b{};  // Case 2 target: xi = a (.) b
  double eps = 0.1;
  int layers = 1;  // N_eps
  ModelParams params;

  static LaminateSpec case_one(const SymMat& xi, double eps, int layers, ModelParams params);
  static LaminateSpec case_two(std::array<double, 2> a, std::array<double, 2> b, double eps,
                               int layers, ModelParams params);
  void validate() const;
};

struct DamageStrip {
  double center = 0.0;
  double half_width = 0.0;
};

// Staircase profile: plateaus of increment `step` joined by ramps of slope
// step/(2*half_width) inside the strips; constant before the first strip and
// after the last one.
struct StaircaseProfile {
  std::vector<DamageStrip> strips;  // ascending centers, disjoint
  double base = 0.0;                // value before the first strip
  double step = 0.0;                // plateau increment per strip
  double t0 = 0.0, t1 = 1.0;        // parameter range

  double value(double t) const;
  double slope(double t) const;  // nonzero only strictly inside strips
};

struct LaminateConstruction {
  LaminateCase which = LaminateCase::One;
  // Case 1: profile[j] drives u_j(x_j). Case 2: profile[0] drives
  // u(x) = a_scaled * w(x . b_hat).
  std::array<StaircaseProfile, 2> profile;
  std::array<double, 2> a_scaled{}, b_hat{};

  // displacement and strain of the constructed field
  std::array<double, 2> displacement(std::array<double, 2> x) const;
  SymMat strain(std::array<double, 2> x) const;
  bool damaged(std::array<double, 2> x) const;
};

LaminateConstruction build_laminate(const LaminateSpec& spec);

struct LaminateResult {
  double energy = 0.0;          // exact E_eps(u_eps, chi_D)
  double damaged_volume = 0.0;  // exact |D_eps|
  double limit_bound = 0.0;     // sqrt(2 alpha kappa h(xi))
  // rows (family, center, half_width); family 0/1 = Case-1 axis, 2 = Case-2
  std::vector<std::array<double, 3>> band_geometry;
};

LaminateResult laminate_energy(const LaminateSpec& spec);

// Layer-count schedule N_eps = ceil(eps^(-1/2)).
int default_layers(double eps);

// ---- limit functional on explicit piecewise-smooth data --------------------

enum class LimitModel { Hencky, Tresca };

struct JumpSegment {
  std::array<double, 2> p0{}, p1{};  // segment endpoints
  std::array<double, 2> jump{};      // [u] across the segment
  std::array<double, 2> normal{};    // unit normal (|nu| = 1 required)
};

// Bulk term: sum of weights * Wbar(strain) (resp. the Tresca bulk density).
// Singular term: per segment, length * sqrt(2 alpha kappa A_w([u].nu):([u].nu))
// (Hencky); the Tresca model requires [u].nu = 0 (square-integrable
// divergence) and weighs length * sqrt(2 kappa h~([u].nu)).
double limit_energy_piecewise(const ModelParams& p, LimitModel model,
                              std::span<const SymMat> cell_strains,
                              std::span<const double> cell_weights,
                              std::span<const JumpSegment> jumps);

}  // namespace brittle
