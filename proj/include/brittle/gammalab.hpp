#pragma once

// Discrete alternating-minimization solver for the brittle-damage energies
// on 2-D rectangular grids: bilinear quadrilateral elements, 2x2 Gauss
// quadrature, one {0,1} damage indicator per cell, matrix-free
// Jacobi-preconditioned CG for the inner elastic solves, and regime sweeps
// against the matching limit functionals.

#include <cstdint>
#include <vector>

#include "brittle/densities.hpp"
#include "brittle/symcalc.hpp"

namespace brittle {

// Dirichlet datum u(x) = M x + c on the whole boundary; sym(M) is the strain
// datum, the skew part and offset exercise discrete objectivity.
struct AffineBC {
  std::array<std::array<double, 2>, 2> M{{{0.0, 0.0}, {0.0, 0.0}}};
  std::array<double, 2> c{};

  static AffineBC from_strain(const SymMat& xi);
  SymMat strain() const;  // sym(M)
};

struct GridState {
  int nx = 16, ny = 16;
  double h = 1.0 / 16.0;           // square cell size
  std::vector<double> u;           // 2*(nx+1)*(ny+1) node displacements (ux, uy)
  std::vector<std::uint8_t> damage;  // nx*ny cell indicators
  AffineBC bc;

  int node_count() const { return (nx + 1) * (ny + 1); }
  int cell_count() const { return nx * ny; }
  double cell_area() const { return h * h; }
  double domain_area() const { return cell_area() * cell_count(); }
  int cell_index(int ci, int cj) const { return cj * nx + ci; }
};

// Grid with u initialized to the boundary datum everywhere and no damage.
GridState make_grid(int nx, int ny, double h, const AffineBC& bc);

enum class SolverModel { Hencky, Tresca };

// Damaged-cell Hooke coefficients: (eta_eps lambda_w, eta_eps mu_w) for the
// Hencky scaling, (lambda_w, eps mu_w) for the Tresca scaling.
IsoTensor damaged_tensor(const ModelParams& p, double eps, SolverModel model);

// Total discrete energy: quadrature-exact elastic part + (kappa/eps) |{chi=1}|.
double grid_energy(const GridState& s, const ModelParams& p, double eps, SolverModel model);

struct SolveInfo {
  int iters = 0;
  double rel_residual = 0.0;
  bool converged = false;
};

// Inner minimization in u at fixed damage: Jacobi-preconditioned CG on the
// SPD system, boundary nodes pinned to the bc. Residual target is relative
// to the initial residual. energy_trace, when given, records the elastic
// energy after every iteration (it is nonincreasing along CG).
SolveInfo elastic_solve(GridState& s, const ModelParams& p, double eps, SolverModel model,
                        double tol = 1e-10, int max_iters = 0,
                        std::vector<double>* energy_trace = nullptr);

// Exact minimization in chi at fixed u: per cell, chi = 1 iff the
// quadrature average of (A_s - A_damaged) e:e reaches 2 kappa / eps. Returns
// the number of cells that changed.
int damage_update(GridState& s, const ModelParams& p, double eps, SolverModel model);

struct AmResult {
  std::vector<double> energy_trace;  // energy after each AM iteration
  int iters = 0;
  bool cap_hit = false;
  double final_energy = 0.0;
};

AmResult alternate_minimize(GridState& s, const ModelParams& p, double eps, SolverModel model,
                            double tol = 1e-8, int max_iters = 100);

enum class Regime { Trivial, Hencky, Elastic };
enum class InitKind { Undamaged, Random5, Laminate };

struct SweepConfig {
  int nx = 64, ny = 64;
  InitKind init = InitKind::Laminate;
  double am_tol = 1e-8;
  int am_max_iters = 100;
  double cg_tol = 1e-10;
  unsigned long long seed = 1;
};

struct RegimeRun {
  double eps = 0.0, eta = 0.0;
  double energy = 0.0, damaged_volume = 0.0;
  int iters = 0;
  bool cap_hit = false;
};

struct RegimeReport {
  std::vector<RegimeRun> runs;
  double limit_reference = 0.0;   // 0 / |O| Wbar(xi) / |O| f(xi) / |O| Tresca bulk
  double scaling_exponent = 0.0;  // trivial regime: fit of log E vs log sqrt(eta/eps)
  bool has_scaling_fit = false;
  int nx = 0, ny = 0;
  std::vector<std::uint8_t> final_damage;  // last run's damage field
};

// Seeds chi with laminate-style bands: per band family (vertical for the
// xi_11 profile, horizontal for xi_22 and the shear), total damaged fraction
// from the Young-optimal balance sigma* = sqrt(eta eps A_w e:e / (2 kappa))
// of single-direction slip, laid out as evenly spaced one-cell bands.
void seed_laminate_damage(GridState& s, const ModelParams& p, double eps, SolverModel model);

RegimeReport regime_sweep(const ModelParams& p, Regime regime, const SymMat& xi_bc,
                          const std::vector<double>& eps_list, const SweepConfig& cfg);

RegimeReport tresca_sweep(const ModelParams& p, const SymMat& xi_bc,
                          const std::vector<double>& eps_list, const SweepConfig& cfg);

}  // namespace brittle
