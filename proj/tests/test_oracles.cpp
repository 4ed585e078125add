#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "brittle/envelopes.hpp"
#include "brittle/oracles.hpp"
#include "brittle/rng.hpp"

using namespace brittle;

namespace {

ModelParams unit_params() {
  ModelParams p;
  p.lambda_w = p.mu_w = 1.0;
  p.lambda_s = p.mu_s = 2.0;
  p.kappa = 1.0;
  p.alpha = 1.0;
  return p;
}

}  // namespace

TEST_CASE("brute_inf_convolution: zero input and the dual consistency triple") {
  const ModelParams p = unit_params();
  const InfConvBrute z = brute_inf_convolution(p, SymMat::zero(2), 16, 100, 1);
  CHECK(z.diag_grid_min == doctest::Approx(0.0).scale(1.0));

  std::mt19937_64 rng(311);
  for (int k = 0; k < 20; ++k) {
    const int dim = (k % 2) ? 3 : 2;
    const SymMat xi = random_symmat(rng, dim, 2.5);
    const double dual = w_bar_dual(p, xi).value;
    const InfConvBrute b = brute_inf_convolution(p, xi, 48, 3000, 7 + k);
    CHECK(b.argmin_interior);
    // grid min brackets the true value from above, within the grid bound
    CHECK(b.diag_grid_min >= dual - 1e-8 * (1.0 + std::abs(dual)));
    CHECK(b.diag_grid_min <= dual + b.grid_error_bound + 1e-8 * (1.0 + std::abs(dual)));
    // rotation-augmented sampling cannot undercut the restricted value
    CHECK(b.rotated_min >= dual - 1e-8 * (1.0 + std::abs(dual)));
  }
}

TEST_CASE("brute_inf_convolution: grid refinement shrinks the gap at the worst case") {
  const ModelParams p = unit_params();
  std::mt19937_64 rng(313);
  const SymMat xi = 3.0 * random_symmat(rng, 2, 1.0);
  const double dual = w_bar_dual(p, xi).value;
  const double gap_coarse =
      std::abs(brute_inf_convolution(p, xi, 24, 10, 1).diag_grid_min - dual);
  const double gap_fine =
      std::abs(brute_inf_convolution(p, xi, 96, 10, 1).diag_grid_min - dual);
  CHECK(gap_fine <= gap_coarse + 1e-12);
}

TEST_CASE("rotation_robustness: eigenframe reduction survives sampled frames") {
  const ModelParams p = unit_params();
  for (int dim : {2, 3}) {
    const auto feps = rotation_robustness(p, RotationOp::FEpsInner, dim, 12, 6, 1001);
    CHECK(feps.max_rel_gap <= 1e-6);
    const auto dual = rotation_robustness(p, RotationOp::WBarDual, dim, 12, 6, 1003);
    CHECK(dual.max_rel_gap <= 1e-6);
    const auto primal = rotation_robustness(p, RotationOp::WBarPrimal, dim, 4, 4, 1005);
    CHECK(primal.max_rel_gap <= 1e-6);
    const auto iso = rotation_robustness(p, RotationOp::WBarIsotropy, dim, 12, 6, 1007);
    CHECK(iso.max_rel_gap <= 1e-8);
  }
}

TEST_CASE("rotation_robustness reports are reproducible from the seed") {
  const ModelParams p = unit_params();
  const auto a = rotation_robustness(p, RotationOp::WBarDual, 3, 6, 4, 99);
  const auto b = rotation_robustness(p, RotationOp::WBarDual, 3, 6, 4, 99);
  CHECK(a.max_abs_gap == b.max_abs_gap);
  CHECK(a.max_rel_gap == b.max_rel_gap);
  CHECK(a.worst_case_input == b.worst_case_input);
  CHECK(oracle_report_json(a) == oracle_report_json(b));
  CHECK(oracle_report_json(a).find("\"seed\":99") != std::string::npos);
}

TEST_CASE("conjugate_bruteforce: G* = h/4 (via G*(2 xi) = h) and G~* = h~/4") {
  const ModelParams p = unit_params();
  CHECK(conjugate_bruteforce(p, ConjugateWhich::G, SymMat::zero(2), 51) ==
        doctest::Approx(0.0).scale(1.0));
  // hand value: lambda_w = mu_w = 1, xi = Id2 -> h = 12
  const double brute = conjugate_bruteforce(p, ConjugateWhich::G, SymMat::identity(2));
  CHECK(std::abs(brute - 12.0) <= 5e-3 * 12.0);

  std::mt19937_64 rng(317);
  for (int k = 0; k < 8; ++k) {
    const int dim = (k % 2) ? 3 : 2;
    const SymMat xi = random_symmat(rng, dim, 2.0);
    const double grid = conjugate_bruteforce(p, ConjugateWhich::G, xi);
    const double exact = h_density(p, xi);
    CHECK(std::abs(grid - exact) <= (dim == 2 ? 5e-3 : 6e-2) * (1.0 + exact));

    const SymMat dev = dev_split(xi).deviator;
    const double grid_t = conjugate_bruteforce(p, ConjugateWhich::GTilde, dev);
    const double exact_t = h_tilde(p, dev) / 4.0;
    CHECK(std::abs(grid_t - exact_t) <= (dim == 2 ? 1e-3 : 2e-2) * (1.0 + exact_t));
  }
}

TEST_CASE("convexity_probe: w_bar and sqrt(2 a k h_r) convex, W_eps not") {
  const ModelParams p = unit_params();
  const auto wb = convexity_probe(p, ConvexityFn::WBar, 3, 400, 41);
  CHECK(wb.max_rel_gap <= 1e-8);
  const auto hr = convexity_probe(p, ConvexityFn::SqrtHr, 2, 1000, 43);
  CHECK(hr.max_rel_gap <= 1e-8);
  const auto we = convexity_probe(p, ConvexityFn::WEps, 2, 100, 47);
  CHECK(we.max_abs_gap > 1e-6);  // a violating segment exists near the crossover
  CHECK(!we.worst_case_input.empty());
}
