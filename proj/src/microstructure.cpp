#include "brittle/microstructure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "brittle/envelopes.hpp"

namespace brittle {

LaminateSpec LaminateSpec::case_one(const SymMat& xi, double eps, int layers,
                                    ModelParams params) {
  LaminateSpec s;
  s.which = LaminateCase::One;
  s.xi = xi;
  s.eps = eps;
  s.layers = layers;
  s.params = params;
  s.validate();
  return s;
}

LaminateSpec LaminateSpec::case_two(std::array<double, 2> a, std::array<double, 2> b, double eps,
                                    int layers, ModelParams params) {
  LaminateSpec s;
  s.which = LaminateCase::Two;
  s.a = a;
  s.b = b;
  s.eps = eps;
  s.layers = layers;
  s.params = params;
  s.validate();
  return s;
}

void LaminateSpec::validate() const {
  params.validate();
  if (!(eps > 0.0)) throw std::invalid_argument("LaminateSpec: eps must be positive");
  if (layers < 1) throw std::invalid_argument("LaminateSpec: layers must be >= 1");
  if (which == LaminateCase::One) {
    if (xi.dim != 2) throw std::invalid_argument("LaminateSpec: Case 1 needs a 2x2 target");
    if (std::abs(xi(0, 1)) > 1e-12 * (1.0 + norm(xi)))
      throw std::invalid_argument("LaminateSpec: Case 1 target must be diagonal");
    if (!(xi(0, 0) * xi(1, 1) > 0.0))
      throw std::invalid_argument(
          "LaminateSpec: Case 1 requires same-sign eigenvalues (xi1*xi2 > 0); "
          "opposite signs belong to Case 2 via xi = a (.) b");
  }
}

int default_layers(double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("default_layers: eps must be positive");
  return static_cast<int>(std::ceil(1.0 / std::sqrt(eps)));
}

double StaircaseProfile::value(double t) const {
  double v = base;
  for (std::size_t i = 0; i < strips.size(); ++i) {
    const double lo = strips[i].center - strips[i].half_width;
    const double hi = strips[i].center + strips[i].half_width;
    if (t >= hi) {
      v = base + step * double(i + 1);
    } else if (t > lo) {
      return base + step * double(i) +
             step / (2.0 * strips[i].half_width) * (t - lo);
    } else {
      break;
    }
  }
  return v;
}

double StaircaseProfile::slope(double t) const {
  for (const auto& s : strips)
    if (t > s.center - s.half_width && t < s.center + s.half_width)
      return step / (2.0 * s.half_width);
  return 0.0;
}

namespace {

// Cross-section length of the chord {x . u = t} in the unit square for a
// unit vector u; a trapezoid in t. `shift` maps general signs onto the
// nonnegative-component case.
struct CrossSection {
  double P = 0.0, Q = 0.0, shift = 0.0;

  explicit CrossSection(std::array<double, 2> u) {
    P = std::abs(u[0]);
    Q = std::abs(u[1]);
    shift = std::min(0.0, u[0]) + std::min(0.0, u[1]);
  }
  double lo() const { return shift; }
  double hi() const { return shift + P + Q; }

  double length(double t) const {
    t -= shift;
    const double mn = std::min(P, Q), mx = std::max(P, Q);
    if (t <= 0.0 || t >= P + Q) return 0.0;
    if (mn < 1e-14) return 1.0;  // axis-aligned: unit chords
    if (t < mn) return t / (P * Q);
    if (t <= mx) return mn / (P * Q);
    return (P + Q - t) / (P * Q);
  }

  // exact integral of the trapezoid over [a, b]
  double area(double a, double b) const {
    a = std::max(a, lo());
    b = std::min(b, hi());
    if (b <= a) return 0.0;
    const double mn = std::min(P, Q), mx = std::max(P, Q);
    double breaks[4] = {a, std::clamp(shift + mn, a, b), std::clamp(shift + mx, a, b), b};
    double total = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double l = breaks[k], r = breaks[k + 1];
      if (r > l) total += 0.5 * (length(l) + length(r)) * (r - l);
    }
    return total;
  }

  // integral over a thin strip (center - delta, center + delta); the width
  // 2*delta is kept exact instead of being re-derived from the endpoints,
  // which would cancel ~7 digits for delta ~ 1e-7
  double strip_area(double center, double delta) const {
    const double a = center - delta, b = center + delta;
    if (b <= lo() || a >= hi()) return 0.0;
    const double mn = std::min(P, Q), mx = std::max(P, Q);
    const bool breaks_inside =
        (a < lo() && b > lo()) || (a < hi() && b > hi()) ||
        (a < shift + mn && b > shift + mn) || (a < shift + mx && b > shift + mx);
    if (breaks_inside) return area(a, b);
    return 2.0 * delta * length(center);  // midpoint rule is exact on a linear piece
  }
};

}  // namespace

LaminateConstruction build_laminate(const LaminateSpec& spec) {
  spec.validate();
  const ModelParams& p = spec.params;
  const double kappa_eff = p.alpha * p.kappa;
  const int N = spec.layers;
  LaminateConstruction c;
  c.which = spec.which;

  if (spec.which == LaminateCase::One) {
    // A_w(e_j x e_j):(e_j x e_j) = lambda_w + 2 mu_w
    const double aw_axis = p.lambda_w + 2.0 * p.mu_w;
    for (int j = 0; j < 2; ++j) {
      const double xij = spec.xi(j, j);
      StaircaseProfile& pr = c.profile[j];
      pr.t0 = 0.0;
      pr.t1 = 1.0;
      pr.base = 0.0;
      pr.step = xij / double(N + 1);
      const double delta = std::abs(xij) * std::sqrt(aw_axis) /
                           (2.0 * std::sqrt(2.0 * kappa_eff)) * spec.eps / double(N + 1);
      if (!(delta > 0.0))
        throw std::invalid_argument("build_laminate: Case 1 strip thickness must be positive");
      if (!(delta < 0.5 / double(N + 1)))
        throw std::invalid_argument(
            "build_laminate: strips overlap; decrease eps or increase layers");
      for (int i = 1; i <= N; ++i)
        pr.strips.push_back({double(i) / double(N + 1), delta});
    }
    return c;
  }

  // Case 2
  const double bl = std::hypot(spec.b[0], spec.b[1]);
  SymMat ab = sym_outer(std::span<const double>(spec.a.data(), 2),
                        std::span<const double>(spec.b.data(), 2));
  if (norm(ab) < 1e-300) {
    // degenerate target: empty construction, zero energy
    c.b_hat = {0.0, 1.0};
    c.a_scaled = {0.0, 0.0};
    c.profile[0].t0 = 0.0;
    c.profile[0].t1 = 1.0;
    return c;
  }
  c.b_hat = {spec.b[0] / bl, spec.b[1] / bl};
  c.a_scaled = {spec.a[0] * bl, spec.a[1] * bl};

  const CrossSection cs(c.b_hat);
  StaircaseProfile& pr = c.profile[0];
  pr.t0 = cs.lo();
  pr.t1 = cs.hi();
  const double ell = (pr.t1 - pr.t0) / double(N + 1);
  pr.base = pr.t0;
  pr.step = ell;
  const double hval = h_density(p, ab);
  const double delta =
      ell * spec.eps * std::sqrt(hval) / (2.0 * std::sqrt(2.0 * kappa_eff));
  if (!(delta < 0.5 * ell))
    throw std::invalid_argument("build_laminate: strips overlap; decrease eps or increase layers");
  for (int i = 1; i <= N; ++i)
    pr.strips.push_back({pr.t0 + double(i) * ell, delta});
  return c;
}

std::array<double, 2> LaminateConstruction::displacement(std::array<double, 2> x) const {
  if (which == LaminateCase::One)
    return {profile[0].value(x[0]), profile[1].value(x[1])};
  const double w = profile[0].value(x[0] * b_hat[0] + x[1] * b_hat[1]);
  return {a_scaled[0] * w, a_scaled[1] * w};
}

SymMat LaminateConstruction::strain(std::array<double, 2> x) const {
  if (which == LaminateCase::One)
    return SymMat::diag2(profile[0].slope(x[0]), profile[1].slope(x[1]));
  const double wp = profile[0].slope(x[0] * b_hat[0] + x[1] * b_hat[1]);
  SymMat ab = sym_outer(std::span<const double>(a_scaled.data(), 2),
                        std::span<const double>(b_hat.data(), 2));
  return wp * ab;
}

bool LaminateConstruction::damaged(std::array<double, 2> x) const {
  auto in_strips = [](const StaircaseProfile& pr, double t) {
    for (const auto& s : pr.strips)
      if (t >= s.center - s.half_width && t <= s.center + s.half_width) return true;
    return false;
  };
  if (which == LaminateCase::One)
    return in_strips(profile[0], x[0]) || in_strips(profile[1], x[1]);
  return in_strips(profile[0], x[0] * b_hat[0] + x[1] * b_hat[1]);
}

LaminateResult laminate_energy(const LaminateSpec& spec) {
  const LaminateConstruction c = build_laminate(spec);
  const ModelParams& p = spec.params;
  const double kappa_eff = p.alpha * p.kappa;
  const double eps = spec.eps;
  LaminateResult out;

  if (spec.which == LaminateCase::One) {
    const int N = spec.layers;
    double L[2], slope[2];
    for (int j = 0; j < 2; ++j) {
      const double delta = c.profile[j].strips.front().half_width;
      L[j] = 2.0 * double(N) * delta;
      slope[j] = c.profile[j].step / (2.0 * delta);
      for (const auto& s : c.profile[j].strips)
        out.band_geometry.push_back({double(j), s.center, s.half_width});
    }
    const double only1 = L[0] * (1.0 - L[1]);
    const double only2 = L[1] * (1.0 - L[0]);
    const double both = L[0] * L[1];
    const IsoTensor Aw = p.A_w();
    const double d1 = 0.5 * eps * iso_quad(Aw, SymMat::diag2(slope[0], 0.0));
    const double d2 = 0.5 * eps * iso_quad(Aw, SymMat::diag2(0.0, slope[1]));
    // superposed slopes on the strip intersections kept exactly
    const double db = 0.5 * eps * iso_quad(Aw, SymMat::diag2(slope[0], slope[1]));
    out.damaged_volume = L[0] + L[1] - both;
    out.energy = only1 * d1 + only2 * d2 + both * db + kappa_eff / eps * out.damaged_volume;
    out.limit_bound = std::sqrt(2.0 * kappa_eff * h_density(p, spec.xi));
    return out;
  }

  // Case 2
  SymMat ab = sym_outer(std::span<const double>(spec.a.data(), 2),
                        std::span<const double>(spec.b.data(), 2));
  out.limit_bound = std::sqrt(2.0 * kappa_eff * h_density(p, ab));
  const StaircaseProfile& pr = c.profile[0];
  if (pr.strips.empty()) return out;  // degenerate target

  const CrossSection cs(c.b_hat);
  const double delta = pr.strips.front().half_width;
  const double slope = pr.step / (2.0 * delta);
  const double bulk_density = 0.5 * eps * slope * slope * iso_quad(p.A_w(), ab);
  for (const auto& s : pr.strips) {
    const double area = cs.strip_area(s.center, s.half_width);
    out.damaged_volume += area;
    out.energy += area * bulk_density;
    out.band_geometry.push_back({2.0, s.center, s.half_width});
  }
  out.energy += kappa_eff / eps * out.damaged_volume;
  return out;
}

double limit_energy_piecewise(const ModelParams& p, LimitModel model,
                              std::span<const SymMat> cell_strains,
                              std::span<const double> cell_weights,
                              std::span<const JumpSegment> jumps) {
  if (cell_strains.size() != cell_weights.size())
    throw std::invalid_argument("limit_energy_piecewise: strain/weight count mismatch");
  double bulk = 0.0;
  for (std::size_t i = 0; i < cell_strains.size(); ++i) {
    const double density = (model == LimitModel::Hencky)
                               ? w_bar_dual(p, cell_strains[i]).value
                               : tresca_limit_bulk(p, cell_strains[i]);
    bulk += cell_weights[i] * density;
  }
  double singular = 0.0;
  for (const auto& seg : jumps) {
    const double nu_len = std::hypot(seg.normal[0], seg.normal[1]);
    if (std::abs(nu_len - 1.0) > 1e-12)
      throw std::invalid_argument("limit_energy_piecewise: jump normal must be unit");
    const double len = std::hypot(seg.p1[0] - seg.p0[0], seg.p1[1] - seg.p0[1]);
    const SymMat ab = sym_outer(std::span<const double>(seg.jump.data(), 2),
                                std::span<const double>(seg.normal.data(), 2));
    if (model == LimitModel::Hencky) {
      singular += len * std::sqrt(2.0 * p.alpha * p.kappa * iso_quad(p.A_w(), ab));
    } else {
      const double jn = seg.jump[0] * seg.normal[0] + seg.jump[1] * seg.normal[1];
      const double jl = std::hypot(seg.jump[0], seg.jump[1]);
      if (std::abs(jn) > 1e-10 * (1.0 + jl))
        throw std::invalid_argument(
            "limit_energy_piecewise: Tresca jumps need [u].nu = 0 (div u in L^2)");
      singular += len * std::sqrt(2.0 * p.kappa * h_tilde(p, dev_split(ab).deviator));
    }
  }
  return bulk + singular;
}

}  // namespace brittle
