#include "brittle/densities.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace brittle {

double ModelParams::eta_of(double eps) const {
  if (!(eps > 0.0)) throw std::invalid_argument("eta_of: eps must be positive");
  switch (eta.kind) {
    case EtaSchedule::Kind::LinearAlpha:
      return alpha * eps;
    case EtaSchedule::Kind::Power:
      return std::pow(eps, eta.exponent);
  }
  throw std::logic_error("eta_of: unknown schedule");
}

void ModelParams::validate() const {
  if (!(lambda_w > 0.0 && mu_w > 0.0 && lambda_s > 0.0 && mu_s > 0.0))
    throw std::invalid_argument("ModelParams: Lame coefficients must be positive");
  if (!(kappa > 0.0)) throw std::invalid_argument("ModelParams: kappa must be positive");
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("ModelParams: alpha must lie in (0, inf)");
}

void ModelParams::validate_tresca() const {
  validate();
  if (!(lambda_w <= lambda_s))
    throw std::invalid_argument("ModelParams: Tresca mode requires lambda_w <= lambda_s");
}

double f_strong(const ModelParams& p, const SymMat& xi) { return 0.5 * iso_quad(p.A_s(), xi); }

double g_weak(const ModelParams& p, double eps, const SymMat& xi) {
  if (!(eps > 0.0)) throw std::invalid_argument("g_weak: eps must be positive");
  return 0.5 * p.eta_of(eps) * iso_quad(p.A_w(), xi) + p.kappa / eps;
}

double w_eps(const ModelParams& p, double eps, const SymMat& xi) {
  return std::min(f_strong(p, xi), g_weak(p, eps, xi));
}

double G_general(double lambda, double mu, double tau_lo, double tau_hi, int* branch) {
  const double beta = (lambda + 2.0 * mu) / (2.0 * (lambda + mu));
  const double m = beta * (tau_lo + tau_hi);
  int br;
  double val;
  if (m < tau_lo) {
    br = 0;
    val = tau_lo * tau_lo / (lambda + 2.0 * mu);
  } else if (m > tau_hi) {
    br = 2;
    val = tau_hi * tau_hi / (lambda + 2.0 * mu);
  } else {
    br = 1;
    const double d = tau_lo - tau_hi, s = tau_lo + tau_hi;
    val = d * d / (4.0 * mu) + s * s / (4.0 * (lambda + mu));
  }
  if (branch) *branch = br;
  return val;
}

double G_quad(const ModelParams& p, const SymMat& tau, int* branch) {
  const auto w = eigenvalues(tau);
  return G_general(p.lambda_w, p.mu_w, w[0], w[tau.dim - 1], branch);
}

double h_general(double lambda, double mu, std::span<const double> w) {
  double abs_sum = 0.0, sum = 0.0;
  for (double x : w) {
    abs_sum += std::abs(x);
    sum += x;
  }
  return mu * abs_sum * abs_sum + (lambda + mu) * sum * sum;
}

double h_density(const ModelParams& p, const SymMat& xi) {
  const auto w = eigenvalues(xi);
  return h_general(p.lambda_w, p.mu_w, std::span<const double>(w.data(), xi.dim));
}

double h_r(const ModelParams& p, double r, const SymMat& xi) {
  if (xi.dim != 2) throw std::invalid_argument("h_r: dim must be 2");
  if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("h_r: r must lie in [0,1]");
  return iso_quad(p.A_w(), xi) + 4.0 * p.mu_w * r * det(xi);
}

void ConvMElement::validate() const {
  double sum = 0.0;
  for (const auto& [w, atom] : terms) {
    if (!(w >= 0.0)) throw std::invalid_argument("ConvMElement: weights must be >= 0");
    sum += w;
    if (!atom.identity) {
      const double n2 =
          atom.y[0] * atom.y[0] + atom.y[1] * atom.y[1] + atom.y[2] * atom.y[2];
      if (std::abs(n2 - 1.0) > 1e-10)
        throw std::invalid_argument("ConvMElement: rank-one atoms need |y| = 1");
    }
  }
  if (std::abs(sum - 1.0) > 1e-10)
    throw std::invalid_argument("ConvMElement: weights must sum to 1");
}

double h_A(const ModelParams& p, const ConvMElement& A, const SymMat& xi) {
  if (xi.dim != 3) throw std::invalid_argument("h_A: dim must be 3");
  const SymMat cof = cofactor(xi);
  double pairing = 0.0;
  for (const auto& [w, atom] : A.terms) {
    if (atom.identity) {
      pairing += w * cof.trace();
    } else {
      double yy = 0.0;  // cof(xi) y . y
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) yy += cof(i, j) * atom.y[i] * atom.y[j];
      pairing += w * yy;
    }
  }
  return iso_quad(p.A_w(), xi) + 4.0 * p.mu_w * pairing;
}

bool in_K(const ModelParams& p, const SymMat& tau) {
  return G_quad(p, tau) <= 2.0 * p.alpha * p.kappa * (1.0 + 1e-12);
}

double support_K(const ModelParams& p, const SymMat& xi) {
  return std::sqrt(2.0 * p.alpha * p.kappa * h_density(p, xi));
}

std::vector<std::array<double, 3>> fibonacci_sphere(int count) {
  if (count < 1) throw std::invalid_argument("fibonacci_sphere: count must be >= 1");
  std::vector<std::array<double, 3>> pts(count);
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = (count == 1) ? 0.0 : 1.0 - 2.0 * i / double(count - 1);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    pts[i] = {r * std::cos(phi), r * std::sin(phi), z};
  }
  return pts;
}

namespace {

void require_deviatoric(const SymMat& xi, const char* who) {
  if (std::abs(xi.trace()) > 1e-12 * (1.0 + norm(xi)))
    throw std::invalid_argument(std::string(who) + ": input must be deviatoric");
}

}  // namespace

double G_tilde_eps(const ModelParams& p, double eps, const SymMat& tau, int* branch) {
  if (!(eps > 0.0)) throw std::invalid_argument("G_tilde_eps: eps must be positive");
  const auto w = eigenvalues(tau);
  return G_general(p.lambda_w / eps, p.mu_w, w[0], w[tau.dim - 1], branch);
}

double G_tilde(const ModelParams& p, const SymMat& tau) {
  const auto w = eigenvalues(tau);
  const double d = w[tau.dim - 1] - w[0];
  return d * d / (4.0 * p.mu_w);
}

double h_tilde(const ModelParams& p, const SymMat& xi_dev) {
  require_deviatoric(xi_dev, "h_tilde");
  const auto w = eigenvalues(xi_dev);
  double abs_sum = 0.0;
  for (int i = 0; i < xi_dev.dim; ++i) abs_sum += std::abs(w[i]);
  return p.mu_w * abs_sum * abs_sum;
}

bool in_K_tilde(const ModelParams& p, const SymMat& tau_dev) {
  require_deviatoric(tau_dev, "in_K_tilde");
  const auto w = eigenvalues(tau_dev);
  const double spread = w[tau_dev.dim - 1] - w[0];
  return spread <= 2.0 * std::sqrt(2.0 * p.kappa * p.mu_w) * (1.0 + 1e-12);
}

double support_K_tilde(const ModelParams& p, const SymMat& xi_dev) {
  return std::sqrt(2.0 * p.kappa * h_tilde(p, xi_dev));
}

}  // namespace brittle
