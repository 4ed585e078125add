// Hard-input hammering of the envelope machinery: exact eigenvalue ties,
// wide parameter ratios, extreme strain scales, and the tight corners of
// the eps preconditions.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "brittle/densities.hpp"
#include "brittle/envelopes.hpp"
#include "brittle/rng.hpp"
#include "brittle/symcalc.hpp"

using namespace brittle;

namespace {

ModelParams wide_params(std::mt19937_64& rng) {
  ModelParams p;
  p.lambda_w = std::exp(uniform(rng, std::log(0.05), std::log(20.0)));
  p.mu_w = std::exp(uniform(rng, std::log(0.05), std::log(20.0)));
  p.lambda_s = p.lambda_w * std::exp(uniform(rng, 0.0, std::log(10.0)));
  p.mu_s = std::exp(uniform(rng, std::log(0.05), std::log(20.0)));
  p.kappa = std::exp(uniform(rng, std::log(0.01), std::log(10.0)));
  p.alpha = std::exp(uniform(rng, std::log(0.05), std::log(10.0)));
  return p;
}

}  // namespace

TEST_CASE("inner maximization beats dense sampling on exact eigenvalue ties") {
  std::mt19937_64 rng(601);
  const double eps = 0.05;
  for (int k = 0; k < 60; ++k) {
    ModelParams p;
    p.lambda_w = uniform(rng, 0.3, 2.0);
    p.mu_w = uniform(rng, 0.3, 2.0);
    p.lambda_s = p.lambda_w + uniform(rng, 0.1, 2.0);
    p.mu_s = uniform(rng, 1.0, 3.0);
    p.kappa = uniform(rng, 0.3, 2.0);
    const double eta = p.eta_of(eps);
    const double theta = uniform(rng, 0.0, 1.0);

    const int dim = (k % 2) ? 3 : 2;
    SymMat xi = SymMat::zero(dim);
    const double a = uniform(rng, -2.0, 2.0), b = uniform(rng, -2.0, 2.0);
    if (dim == 2) {
      xi = SymMat::diag2(a, a);  // fully degenerate spectrum
    } else {
      switch (k % 3) {
        case 0:
          xi = SymMat::diag3(a, a, b);
          break;
        case 1:
          xi = SymMat::diag3(a, b, b);
          break;
        default:
          xi = SymMat::diag3(a, a, a);
          break;
      }
    }
    const double exact = F_eps(p, eps, theta, xi);

    // dense random stress sampling (rotated and diagonal) must stay below
    const IsoTensor B{p.lambda_s - eta * p.lambda_w, p.mu_s - eta * p.mu_w};
    const double outer = 0.5 * eta * iso_quad(p.A_w(), xi) + p.kappa * theta / eps;
    double sampled = -1e300;
    for (int s = 0; s < 4000; ++s) {
      SymMat tau = random_symmat(rng, dim, uniform(rng, 0.1, 12.0));
      const double phi = ddot(tau, xi) - 0.5 * ddot(iso_inverse_apply(B, tau), tau) -
                         theta / (2.0 * eta) * G_quad(p, tau);
      sampled = std::max(sampled, outer + (1.0 - theta) * phi);
    }
    CHECK(sampled <= exact + 1e-9 * (1.0 + std::abs(exact)));
  }
}

TEST_CASE("duality survives wide parameter ratios and extreme strain scales") {
  std::mt19937_64 rng(607);
  int tested = 0;
  for (int k = 0; k < 250; ++k) {
    const ModelParams p = wide_params(rng);
    const int dim = (k % 2) ? 3 : 2;
    const double scale = std::exp(uniform(rng, std::log(1e-3), std::log(1e3)));
    const SymMat xi = scale * random_symmat(rng, dim, 1.0);
    const EnvelopeEval primal = w_bar_primal(p, xi);  // throws above 1e-6
    CHECK(primal.residual <= 1e-6);
    ++tested;

    const SymMat dev = dev_split(xi).deviator;
    ModelParams q = p;  // Tresca ordering holds by construction
    const EnvelopeEval wt = w_tilde(q, dev);
    CHECK(wt.residual <= 1e-6);
  }
  CHECK(tested == 250);
}

TEST_CASE("sq_envelope at very small eps stays within its bounds and near Wbar") {
  std::mt19937_64 rng(613);
  ModelParams p;
  p.lambda_w = p.mu_w = 1.0;
  p.lambda_s = p.mu_s = 2.0;
  p.kappa = 1.0;
  p.alpha = 1.0;
  for (int k = 0; k < 10; ++k) {
    const int dim = (k % 2) ? 3 : 2;
    const SymMat xi = random_symmat(rng, dim, 2.5);
    const double wbar = w_bar_dual(p, xi).value;
    for (double eps : {1e-5, 1e-6}) {
      const EnvelopeEval e = sq_envelope(p, eps, xi);
      CHECK(e.value <= w_eps(p, eps, xi) * (1.0 + 1e-10));
      CHECK(std::abs(e.value - wbar) <= 1e-3 * (1.0 + wbar));
    }
  }
}

TEST_CASE("eps preconditions of the Tresca envelope are enforced") {
  ModelParams p;
  p.lambda_w = 1.0;
  p.mu_w = 2.0;
  p.lambda_s = 2.0;
  p.mu_s = 1.0;  // mu_s - eps mu_w <= 0 for eps >= 0.5
  p.kappa = 1.0;
  CHECK_THROWS_AS(F_eps_tresca(p, 0.6, 0.5, SymMat::identity(2)), std::domain_error);
  CHECK_NOTHROW(F_eps_tresca(p, 0.1, 0.5, SymMat::identity(2)));
  CHECK_THROWS_AS(F_eps_tresca(p, -0.1, 0.5, SymMat::identity(2)), std::invalid_argument);
  CHECK_THROWS_AS(F_eps(p, 0.1, 1.5, SymMat::identity(2)), std::invalid_argument);
}

TEST_CASE("error contracts: invalid eps and deviatoric-only inputs") {
  ModelParams p;
  CHECK_THROWS_AS(g_weak(p, 0.0, SymMat::zero(2)), std::invalid_argument);
  CHECK_THROWS_AS(g_weak(p, -1.0, SymMat::zero(2)), std::invalid_argument);
  CHECK_THROWS_AS(kohn_strang_envelope(p, 0.0, SymMat::zero(2)), std::invalid_argument);
  CHECK_THROWS_AS(w_bar_recession_probe(p, SymMat::identity(2), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(support_K_tilde(p, SymMat::identity(3)), std::invalid_argument);
}

TEST_CASE("recession probe approaches support_K under wide parameters too") {
  std::mt19937_64 rng(617);
  for (int k = 0; k < 30; ++k) {
    const ModelParams p = wide_params(rng);
    const int dim = (k % 2) ? 3 : 2;
    SymMat xi = random_symmat(rng, dim, 1.0);
    const double n = norm(xi);
    if (n < 1e-8) continue;
    xi *= 1.0 / n;
    const double rec = w_bar_recession(p, xi);
    // duality gives rec - W(t xi)/t <= max_{tau in K} 1/2 A_s^-1 tau:tau / t,
    // and |tau|^2 <= 4 n alpha kappa (lambda_w + mu_w) on K
    const double rate = dim * p.alpha * p.kappa * (p.lambda_w + p.mu_w) / (p.mu_s * 1e5);
    CHECK(std::abs(w_bar_recession_probe(p, xi, 1e5) - rec) <= 1.5 * rate + 1e-9);
  }
}
