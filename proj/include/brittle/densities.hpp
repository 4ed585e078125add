#pragma once

// Closed-form energy densities, constraint sets and auxiliary quadratic
// forms for the brittle-damage family and its Tresca variant:
//   f, g_eps, W_eps, the piecewise stress form G and its generalization
//   G_{lambda,mu}, the dissipation form h and its relatives h_r / h_A,
//   the elasticity sets K and K~ with their support functions.

#include <utility>
#include <vector>

#include "brittle/symcalc.hpp"

namespace brittle {

// eta_eps schedule: eta = alpha*eps (Hencky) or eta = eps^exponent
// (exponent > 1 trivial regime, 0 < exponent < 1 elastic regime).
struct EtaSchedule {
  enum class Kind { LinearAlpha, Power };
  Kind kind = Kind::LinearAlpha;
  double exponent = 1.0;
};

// Material and scaling constants. lambda/mu are the Lame coefficients of the
// weak (damaged) and strong tensors, kappa the toughness, alpha the limit of
// eta_eps/eps in the Hencky regime.
struct ModelParams {
  double lambda_w = 1.0, mu_w = 1.0;
  double lambda_s = 2.0, mu_s = 2.0;
  double kappa = 1.0;
  double alpha = 1.0;
  EtaSchedule eta;

  IsoTensor A_w() const { return IsoTensor{lambda_w, mu_w}; }
  IsoTensor A_s() const { return IsoTensor{lambda_s, mu_s}; }

  double eta_of(double eps) const;

  // throws std::invalid_argument on non-positive moduli/kappa/alpha
  void validate() const;
  // additionally requires lambda_w <= lambda_s (Tresca mode)
  void validate_tresca() const;
};

// ---- Hencky family -------------------------------------------------------

// f(xi) = 1/2 A_s xi:xi
double f_strong(const ModelParams& p, const SymMat& xi);

// g_eps(xi) = (eta_eps/2) A_w xi:xi + kappa/eps
double g_weak(const ModelParams& p, double eps, const SymMat& xi);

// W_eps = min(f, g_eps)
double w_eps(const ModelParams& p, double eps, const SymMat& xi);

// Piecewise stress form for general Lame coefficients (lambda, mu); with
// tau_1 <= tau_n the extreme eigenvalues and beta = (lambda+2mu)/(2(lambda+mu)):
//   tau_1^2/(lambda+2mu)                                 if beta(tau_1+tau_n) < tau_1
//   (tau_1-tau_n)^2/(4mu) + (tau_1+tau_n)^2/(4(lambda+mu))  middle (incl. ties)
//   tau_n^2/(lambda+2mu)                                 if tau_n < beta(tau_1+tau_n)
// The three formulas agree on the branch boundaries; ties use the middle
// branch so the branch index is deterministic.
double G_general(double lambda, double mu, double tau_lo, double tau_hi, int* branch = nullptr);

// G with the weak-material coefficients; branch (0/1/2) optionally reported.
double G_quad(const ModelParams& p, const SymMat& tau, int* branch = nullptr);

// h(xi) = mu_w (sum |xi_i|)^2 + (lambda_w+mu_w) (sum xi_i)^2
double h_density(const ModelParams& p, const SymMat& xi);
double h_general(double lambda, double mu, std::span<const double> eigenvalues);

// Two-dimensional minorant family: h_r(xi) = A_w xi:xi + 4 mu_w r det(xi), r in [0,1].
double h_r(const ModelParams& p, double r, const SymMat& xi);

// Elements of conv(M), M = {Id} u {y (x) y : |y|=1} (three-dimensional
// minorant family); stored as a convex combination of atoms.
struct ConvMAtom {
  bool identity = true;
  std::array<double, 3> y{};  // unit vector when !identity
};
struct ConvMElement {
  std::vector<std::pair<double, ConvMAtom>> terms;  // weights >= 0, sum 1

  void validate() const;  // throws on bad weights / non-unit y
};

// h_A(xi) = A_w xi:xi + 4 mu_w A : cof(xi), dim 3 only.
double h_A(const ModelParams& p, const ConvMElement& A, const SymMat& xi);

// K = {tau : G(tau) <= 2 alpha kappa}; membership uses the tolerance band
// G <= 2 alpha kappa (1 + 1e-12).
bool in_K(const ModelParams& p, const SymMat& tau);

// Support function of K: sqrt(2 alpha kappa h(xi)).
double support_K(const ModelParams& p, const SymMat& xi);

// Fibonacci-sphere directions (unit vectors in R^3) for sampling M.
std::vector<std::array<double, 3>> fibonacci_sphere(int count);

// ---- Tresca family (weak tensor lambda_w tr Id + 2 eps mu_w, eta_eps = eps) ----

// G~_eps = G_general with coefficients (lambda_w/eps, mu_w).
double G_tilde_eps(const ModelParams& p, double eps, const SymMat& tau, int* branch = nullptr);

// Pointwise limit G~(tau) = (tau_1 - tau_n)^2 / (4 mu_w); satisfies G~(tau)=G~(tau_D).
double G_tilde(const ModelParams& p, const SymMat& tau);

// h~(xi) = mu_w (sum |xi_i|)^2 on deviatoric xi (trace checked to 1e-12 relative).
double h_tilde(const ModelParams& p, const SymMat& xi_dev);

// K~ = {tau deviatoric : tau_n - tau_1 <= 2 sqrt(2 kappa mu_w)}; deviatoric
// input required.
bool in_K_tilde(const ModelParams& p, const SymMat& tau_dev);

// sqrt(2 kappa h~(xi)) on deviatoric xi.
double support_K_tilde(const ModelParams& p, const SymMat& xi_dev);

}  // namespace brittle
