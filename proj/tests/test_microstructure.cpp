#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "brittle/envelopes.hpp"
#include "brittle/microstructure.hpp"
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

TEST_CASE("LaminateSpec: Case 1 rejects opposite-sign or non-diagonal targets") {
  const ModelParams p = unit_params();
  CHECK_NOTHROW(LaminateSpec::case_one(SymMat::diag2(1.0, 2.0), 0.1, 3, p));
  CHECK_NOTHROW(LaminateSpec::case_one(SymMat::diag2(-1.0, -0.5), 0.1, 3, p));
  CHECK_THROWS_AS(LaminateSpec::case_one(SymMat::diag2(1.0, -1.0), 0.1, 3, p),
                  std::invalid_argument);
  CHECK_THROWS_AS(LaminateSpec::case_one(SymMat::diag2(0.0, 1.0), 0.1, 3, p),
                  std::invalid_argument);
  SymMat offdiag = SymMat::diag2(1.0, 1.0);
  offdiag.set(0, 1, 0.3);
  CHECK_THROWS_AS(LaminateSpec::case_one(offdiag, 0.1, 3, p), std::invalid_argument);
}

TEST_CASE("build_laminate: N=1 gives a single strip at 1/2; strips stay disjoint") {
  const ModelParams p = unit_params();
  const auto spec = LaminateSpec::case_two({1.0, 0.0}, {0.0, 1.0}, 0.1, 1, p);
  const LaminateConstruction c = build_laminate(spec);
  REQUIRE(c.profile[0].strips.size() == 1);
  CHECK(c.profile[0].strips[0].center == doctest::Approx(0.5));
  // delta = sqrt(h)/(2 sqrt(2 kappa)) * eps/(N+1), h(e1.e2) = mu_w = 1
  CHECK(c.profile[0].strips[0].half_width ==
        doctest::Approx(0.1 / (2.0 * std::sqrt(2.0) * 2.0)).epsilon(1e-12));

  // overlapping strips (huge eps) must be rejected
  CHECK_THROWS_AS(build_laminate(LaminateSpec::case_one(SymMat::diag2(9.0, 9.0), 2.0, 1, p)),
                  std::invalid_argument);
}

TEST_CASE("construction: displacement is a staircase with zero strain off the strips") {
  const ModelParams p = unit_params();
  std::mt19937_64 rng(401);
  const auto spec = LaminateSpec::case_one(SymMat::diag2(1.5, 0.5), 0.05, 4, p);
  const LaminateConstruction c = build_laminate(spec);
  double off_strip_strain = 0.0;
  int off_samples = 0;
  for (int k = 0; k < 20000; ++k) {
    const std::array<double, 2> x = {uniform(rng, 0.0, 1.0), uniform(rng, 0.0, 1.0)};
    if (c.damaged(x)) continue;
    off_strip_strain = std::max(off_strip_strain, norm(c.strain(x)));
    ++off_samples;
  }
  CHECK(off_samples > 15000);
  CHECK(off_strip_strain == 0.0);

  // ramps connect the plateaus continuously and end at xi_j * N/(N+1)
  for (int j = 0; j < 2; ++j) {
    const auto& pr = c.profile[j];
    CHECK(pr.value(0.0) == 0.0);
    CHECK(pr.value(1.0) == doctest::Approx(spec.xi(j, j) * 4.0 / 5.0).epsilon(1e-12));
    for (const auto& s : pr.strips) {
      const double below = pr.value(s.center - s.half_width - 1e-12);
      const double above = pr.value(s.center + s.half_width + 1e-12);
      CHECK(above - below == doctest::Approx(pr.step).epsilon(1e-9));
    }
  }
}

TEST_CASE("Case 2 displacement: strain is rank-one along a (.) b inside strips") {
  const ModelParams p = unit_params();
  const auto spec = LaminateSpec::case_two({2.0, 1.0}, {-0.5, 1.5}, 0.02, 5, p);
  const LaminateConstruction c = build_laminate(spec);
  const SymMat ab = sym_outer(std::span<const double>(spec.a.data(), 2),
                              std::span<const double>(spec.b.data(), 2));
  std::mt19937_64 rng(403);
  for (int k = 0; k < 20000; ++k) {
    const std::array<double, 2> x = {uniform(rng, 0.0, 1.0), uniform(rng, 0.0, 1.0)};
    const SymMat e = c.strain(x);
    if (!c.damaged(x)) {
      CHECK(norm(e) == 0.0);
    } else if (norm(e) > 0.0) {
      // proportional to a (.) b
      const double scale = ddot(e, ab) / ddot(ab, ab);
      CHECK(norm(e - scale * ab) <= 1e-12 * (1.0 + norm(e)));
    }
  }
}

TEST_CASE("laminate_energy Case 1: the 2 sqrt(6) desk number") {
  const ModelParams p = unit_params();
  const double bound = 2.0 * std::sqrt(6.0);
  double prev_gap = std::numeric_limits<double>::infinity();
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const int N = default_layers(eps);
    const auto res =
        laminate_energy(LaminateSpec::case_one(SymMat::identity(2), eps, N, p));
    CHECK(res.limit_bound == doctest::Approx(bound).epsilon(1e-12));
    const double gap = std::abs(res.energy - bound) / bound;
    CHECK(gap <= prev_gap * (1.0 + 1e-9));
    prev_gap = gap;
  }
  CHECK(prev_gap <= 0.03);  // 3% at eps = 1e-4, N = 100
}

TEST_CASE("laminate_energy Case 2: sqrt(2) for the unit shear") {
  const ModelParams p = unit_params();
  const double bound = std::sqrt(2.0);
  double final_gap = 1.0;
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const int N = default_layers(eps);
    const auto res =
        laminate_energy(LaminateSpec::case_two({1.0, 0.0}, {0.0, 1.0}, eps, N, p));
    CHECK(res.limit_bound == doctest::Approx(bound).epsilon(1e-12));
    // axis-aligned profile: exact Young equality, E = N/(N+1) * bound
    CHECK(res.energy == doctest::Approx(bound * N / (N + 1.0)).epsilon(1e-11));
    final_gap = std::abs(res.energy - bound) / bound;
  }
  CHECK(final_gap <= 0.03);
}

TEST_CASE("laminate_energy: degenerate zero target has zero thickness and energy") {
  const ModelParams p = unit_params();
  const auto res = laminate_energy(LaminateSpec::case_two({0.0, 0.0}, {0.0, 1.0}, 0.1, 3, p));
  CHECK(res.energy == 0.0);
  CHECK(res.damaged_volume == 0.0);
  CHECK(res.limit_bound == 0.0);
}

TEST_CASE("laminate_energy: exact damaged volume and intersection accounting") {
  const ModelParams p = unit_params();
  std::mt19937_64 rng(409);
  for (int k = 0; k < 50; ++k) {
    const double eps = std::exp(uniform(rng, std::log(1e-4), std::log(5e-2)));
    const int N = 1 + int(uniform(rng, 0.0, 20.0));
    const double d1 = uniform(rng, 0.3, 2.0), d2 = uniform(rng, 0.3, 2.0);
    const auto spec = LaminateSpec::case_one(SymMat::diag2(d1, d2), eps, N, p);
    const auto c = build_laminate(spec);
    const double delta1 = c.profile[0].strips[0].half_width;
    const double delta2 = c.profile[1].strips[0].half_width;
    const double L1 = 2.0 * N * delta1, L2 = 2.0 * N * delta2;
    const auto res = laminate_energy(spec);
    CHECK(res.damaged_volume ==
          doctest::Approx(L1 + L2 - L1 * L2).epsilon(1e-12).scale(1e-12));

    // closed-form thickness matches the construction
    const double expect1 = d1 * std::sqrt(3.0) / (2.0 * std::sqrt(2.0)) * eps / (N + 1);
    CHECK(delta1 == doctest::Approx(expect1).epsilon(1e-12));

    // chained upper bound: excess over the limit is only the intersection
    // cross term, eps lambda_w xi1 xi2 (N/(N+1))^2 at most
    const double excess_cap = eps * p.lambda_w * d1 * d2;
    CHECK(res.energy <= res.limit_bound + excess_cap + 1e-12);
  }
}

TEST_CASE("laminate_energy Case 2: tilted normals use exact chord areas") {
  const ModelParams p = unit_params();
  for (double eps : {5e-2, 1e-2, 1e-3, 1e-4}) {
    const int N = default_layers(eps);
    const auto res = laminate_energy(LaminateSpec::case_two({1.0, 0.5}, {0.6, 0.8}, eps, N, p));
    CHECK(res.energy <= res.limit_bound * 1.2);
    if (eps == 1e-4)
      CHECK(std::abs(res.energy - res.limit_bound) <= 0.03 * res.limit_bound);
    // damaged volume vanishes along the default layer schedule
    CHECK(res.damaged_volume <= 4.0 * std::sqrt(eps));
  }
}

TEST_CASE("general alpha is exposed through the kappa rescale") {
  ModelParams p = unit_params();
  p.alpha = 2.5;
  const auto res = laminate_energy(LaminateSpec::case_two({1.0, 0.0}, {0.0, 1.0}, 1e-3, 31, p));
  CHECK(res.limit_bound ==
        doctest::Approx(std::sqrt(2.0 * p.alpha * p.kappa * 1.0)).epsilon(1e-12));
  CHECK(res.limit_bound == doctest::Approx(support_K(p, sym_outer(
      std::span<const double>(std::array<double,2>{1.0,0.0}.data(), 2),
      std::span<const double>(std::array<double,2>{0.0,1.0}.data(), 2)))).epsilon(1e-12));
}

TEST_CASE("limit_energy_piecewise: affine bulk, unit jump, Tresca variant") {
  const ModelParams p = unit_params();
  std::mt19937_64 rng(419);

  // no jumps, affine u = xi x on the unit square -> Wbar(xi)
  const SymMat xi = random_symmat(rng, 2, 1.5);
  const SymMat strains[] = {xi};
  const double weights[] = {1.0};
  CHECK(limit_energy_piecewise(p, LimitModel::Hencky, {strains, 1}, {weights, 1}, {}) ==
        doctest::Approx(w_bar_dual(p, xi).value).epsilon(1e-12));

  // single unit jump segment, [u] = e1, nu = e2: sqrt(2 A_w(e1.e2):(e1.e2)) = sqrt(2)
  JumpSegment seg;
  seg.p0 = {0.0, 0.5};
  seg.p1 = {1.0, 0.5};
  seg.jump = {1.0, 0.0};
  seg.normal = {0.0, 1.0};
  CHECK(limit_energy_piecewise(p, LimitModel::Hencky, {}, {}, {&seg, 1}) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  // Tresca: orthogonal jump weighs 2 sqrt(kappa mu_w) |[u] (.) nu|
  const SymMat ab = sym_outer(std::span<const double>(seg.jump.data(), 2),
                              std::span<const double>(seg.normal.data(), 2));
  CHECK(limit_energy_piecewise(p, LimitModel::Tresca, {}, {}, {&seg, 1}) ==
        doctest::Approx(2.0 * std::sqrt(p.kappa * p.mu_w) * norm(ab)).epsilon(1e-12));

  // contract violations
  JumpSegment bad = seg;
  bad.normal = {0.0, 2.0};
  CHECK_THROWS_AS(limit_energy_piecewise(p, LimitModel::Hencky, {}, {}, {&bad, 1}),
                  std::invalid_argument);
  JumpSegment normal_jump = seg;
  normal_jump.jump = {0.0, 1.0};  // [u] parallel to nu: divergence not in L^2
  CHECK_THROWS_AS(limit_energy_piecewise(p, LimitModel::Tresca, {}, {}, {&normal_jump, 1}),
                  std::invalid_argument);
}
