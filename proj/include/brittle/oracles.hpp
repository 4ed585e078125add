#pragma once

// Independent brute-force computations backing the semi-analytic shortcuts:
// grid inf-convolutions, rotation-robustness checks of the eigenframe
// reduction, grid convex conjugates, and midpoint-convexity probes.
// Everything is deterministic given the recorded seed.

#include <string>

#include "brittle/densities.hpp"
#include "brittle/symcalc.hpp"

namespace brittle {

struct OracleReport {
  std::string name;
  int samples = 0;
  double max_abs_gap = 0.0;
  double max_rel_gap = 0.0;
  std::string worst_case_input;
  unsigned long long seed = 0;
};

std::string oracle_report_json(const OracleReport& rep);

// Grid minimum of f(xi - xi') + sqrt(2 alpha kappa h(xi')) over eigenframe-
// diagonal xi' in the box [-4|xi|, 4|xi|]^n, plus a rotation-augmented
// sample minimum over fully general xi'. grid_error_bound is a Lipschitz
// estimate of the grid resolution error.
struct InfConvBrute {
  double diag_grid_min = 0.0;
  double rotated_min = 0.0;
  double grid_error_bound = 0.0;
  bool argmin_interior = true;  // grid argmin strictly inside the box
};
InfConvBrute brute_inf_convolution(const ModelParams& p, const SymMat& xi,
                                   int grid_per_axis = 64, int rotated_samples = 4096,
                                   unsigned long long seed = 1);

// Validates the eigenframe reduction of the envelope optimizers: for
// sampled frames R, the exact frame-restricted optimum (or, for the primal,
// a frame-restricted descent run) must not beat the eigenframe value.
// WBarIsotropy records |Wbar(R xi R^T) - Wbar(xi)| instead.
enum class RotationOp { FEpsInner, WBarDual, WBarPrimal, WBarIsotropy };
OracleReport rotation_robustness(const ModelParams& p, RotationOp op, int dim, int samples,
                                 int frames_per_sample, unsigned long long seed);

// Grid sup of 2 tau:xi - G(tau) (compare h(xi)), resp. tau:xi - G~(tau) over
// deviatoric tau (compare h~(xi)/4). grid_per_axis <= 0 picks a default.
enum class ConjugateWhich { G, GTilde };
double conjugate_bruteforce(const ModelParams& p, ConjugateWhich which, const SymMat& xi,
                            int grid_per_axis = 0);

// Midpoint-convexity probe: records the largest violation
// fn(midpoint) - (fn(a)+fn(b))/2 over random segments. WBar and SqrtHr are
// convex (gap <= 0 up to roundoff); WEps is not, and the probe hunts for a
// violating segment across the f = g_eps crossover.
enum class ConvexityFn { WBar, SqrtHr, WEps };
OracleReport convexity_probe(const ModelParams& p, ConvexityFn fn, int dim, int samples,
                             unsigned long long seed, double eps = 0.1);

}  // namespace brittle
