#pragma once

// Semi-analytic evaluation of the relaxed envelope SQW_eps, the limit
// densities Wbar (Hencky) and Wtilde (Tresca) via dual and primal routes,
// recession functions, and the Kohn-Strang envelope.
//
// All inner optimizations over stresses tau (and primal strains xi') are
// restricted to matrices diagonal in xi's eigenframe. For isotropic tensors
// every term is a spectral function, and the pairing tau:xi is maximized by
// aligned eigenframes (rearrangement), so the reduction is exact; it is
// additionally validated numerically by oracles::rotation_robustness.

#include "brittle/densities.hpp"
#include "brittle/symcalc.hpp"

namespace brittle {

enum class EnvelopeRoute { Dual, Primal, ClosedForm };

struct EnvelopeEval {
  double value = 0.0;
  double theta_opt = 0.0;  // optimal damage fraction (SQW evaluations)
  SymMat tau_opt;          // maximizing stress of the inner/dual problem
  EnvelopeRoute route = EnvelopeRoute::ClosedForm;
  double residual = 0.0;   // duality gap or refinement residual
};

struct EnvelopeOptions {
  int theta_grid = 512;       // theta spacing 1/theta_grid
  int golden_iters = 80;      // golden-section refinement iterations
  int primal_grid = 64;       // primal grid points per eigen-axis
  int cd_max_sweeps = 400;    // coordinate-descent sweep cap
  double duality_tol = 1e-6;  // relative primal-dual gap tolerance
};

// F_eps(theta, xi): damage-fraction relaxation objective whose minimum over
// theta in [0,1] is SQW_eps. The inner maximization over tau is solved
// exactly per G-branch: each branch yields a linear stationarity system
// (over ordering-tie patterns of the eigenvalues); solutions are accepted
// against their branch region, and the best candidate wins. Throws
// std::runtime_error if no branch solution is feasible.
double F_eps(const ModelParams& p, double eps, double theta, const SymMat& xi,
             SymMat* tau_opt = nullptr);

// SQW_eps(xi) = min_theta F_eps(theta, xi); dense theta grid plus
// golden-section refinement in the best bracket (no convexity-in-theta
// assumption).
EnvelopeEval sq_envelope(const ModelParams& p, double eps, const SymMat& xi,
                         const EnvelopeOptions& opt = {});

// Wbar(xi) = sup_{tau in K} { tau:xi - 1/2 A_s^{-1} tau:tau }. Interior
// candidate tau = A_s xi when it lies in K; otherwise the constrained
// maximizer is pinned by a scalar multiplier on G (monotone bisection over
// the per-branch KKT solves).
EnvelopeEval w_bar_dual(const ModelParams& p, const SymMat& xi);

// Wbar(xi) = inf_{xi'} f(xi - xi') + sqrt(2 alpha kappa h(xi')), xi'
// diagonal in xi's eigenframe: coarse grid, coordinate descent with exact
// 1-D minimizations, then an active-set Newton polish on the sign orthant.
// Computes the dual value for the gap check; throws std::runtime_error if
// |primal - dual| exceeds opt.duality_tol relative.
EnvelopeEval w_bar_primal(const ModelParams& p, const SymMat& xi,
                          const EnvelopeOptions& opt = {});

// Recession function Wbar^inf(xi) = sqrt(2 alpha kappa h(xi)) = support_K.
double w_bar_recession(const ModelParams& p, const SymMat& xi);

// Finite-t probe Wbar(t xi)/t for recession-convergence tests.
double w_bar_recession_probe(const ModelParams& p, const SymMat& xi, double t);

// Symmetric quasiconvex envelope of the generalized Kohn-Strang integrand
// ((eta/2) A_w xi:xi + kappa/eps off 0). Exact two-branch formula.
double kohn_strang_envelope(const ModelParams& p, double eps, const SymMat& xi);

// Tresca deviatoric limit density Wtilde on deviatoric xi. Dual route
// (sup over tau in Ktilde of tau:xi - |tau|^2/(4 mu_s)) with an exact
// sector-enumeration primal (the dissipation is piecewise linear on the
// deviatoric eigenvalue plane); residual is the primal-dual gap.
EnvelopeEval w_tilde(const ModelParams& p, const SymMat& xi_dev,
                     const EnvelopeOptions& opt = {});

// Limit bulk density of the Tresca family:
// (tr xi)^2 (lambda_s/2 + mu_s/n) + Wtilde(xi_D).
double tresca_limit_bulk(const ModelParams& p, const SymMat& xi);

// SQWtilde_eps via the Tresca analogue of F_eps (weak tensor
// lambda_w tr Id + 2 eps mu_w, penalty G~_eps).
double F_eps_tresca(const ModelParams& p, double eps, double theta, const SymMat& xi,
                    SymMat* tau_opt = nullptr);
EnvelopeEval sq_envelope_tresca(const ModelParams& p, double eps, const SymMat& xi,
                                const EnvelopeOptions& opt = {});

// Exact inner solves restricted to stresses diagonal in an arbitrary
// orthonormal frame, parametrized by the frame's pairing coefficients
// l_i = v_i^T xi v_i (passed sorted ascending). Every stress is diagonal in
// its own frame, so the unrestricted optimum is the sup of these values over
// frames; the rotation-robustness oracle samples frames to verify the
// eigenframe choice attains it. trace/norm_sq are invariants of xi itself.
double f_eps_inner_max_with_pairing(const ModelParams& p, double eps, double theta, int dim,
                                    std::span<const double> pairing);
double w_bar_dual_with_pairing(const ModelParams& p, int dim, std::span<const double> pairing);

// One-sided checks of the relaxation-type characterization of Wbar:
// Wbar <= f everywhere and Wbar(a.b) <= sqrt(2 alpha kappa A_w(a.b):(a.b))
// on rank-one symmetric matrices. Maximality of the sup-representation is
// not (and cannot be) verified by finite sampling.
struct CharacterizationReport {
  int samples = 0;
  int dim = 2;
  double max_excess_over_f = 0.0;        // max of Wbar - f (should be <= tol)
  double max_excess_rank_one = 0.0;      // max of Wbar(a.b) - rank-one bound
  double max_recession_gap = 0.0;        // |Wbar^inf(a.b) - rank-one bound|
  unsigned long long seed = 0;
};
CharacterizationReport characterization_check(const ModelParams& p, int dim, int samples,
                                              unsigned long long seed);

}  // namespace brittle
