#include "brittle/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "brittle/csv.hpp"
#include "brittle/envelopes.hpp"
#include "brittle/rng.hpp"

namespace brittle {

std::string oracle_report_json(const OracleReport& rep) {
  std::ostringstream os;
  os << "{\"name\":\"" << rep.name << "\",\"samples\":" << rep.samples
     << ",\"max_abs_gap\":" << format_double(rep.max_abs_gap)
     << ",\"max_rel_gap\":" << format_double(rep.max_rel_gap) << ",\"worst_case_input\":\""
     << rep.worst_case_input << "\",\"seed\":" << rep.seed << "}";
  return os.str();
}

namespace {

std::string describe(const SymMat& m) {
  std::ostringstream os;
  os << "dim=" << m.dim << " [";
  for (int k = 0; k < m.packed_size(); ++k) {
    if (k) os << ' ';
    os << format_double(m.v[k]);
  }
  os << "]";
  return os.str();
}

void track(OracleReport& rep, double abs_gap, double rel_gap, const SymMat& input) {
  if (abs_gap > rep.max_abs_gap) rep.max_abs_gap = abs_gap;
  if (rel_gap > rep.max_rel_gap) {
    rep.max_rel_gap = rel_gap;
    rep.worst_case_input = describe(input);
  }
}

// primal objective in eigen-coordinates (independent re-derivation; the
// envelope optimizers are not consulted)
double primal_value_diag(const ModelParams& p, std::span<const double> x, int n,
                         std::span<const double> y) {
  double dsum = 0.0, dsq = 0.0, asum = 0.0, ysum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = x[i] - y[i];
    dsum += d;
    dsq += d * d;
    asum += std::abs(y[i]);
    ysum += y[i];
  }
  const double h = p.mu_w * asum * asum + (p.lambda_w + p.mu_w) * ysum * ysum;
  return 0.5 * p.lambda_s * dsum * dsum + p.mu_s * dsq +
         std::sqrt(2.0 * p.alpha * p.kappa * h);
}

double primal_value_full(const ModelParams& p, const SymMat& xi, const SymMat& xip) {
  const SymMat d = xi - xip;
  return f_strong(p, d) + std::sqrt(2.0 * p.alpha * p.kappa * h_density(p, xip));
}

}  // namespace

InfConvBrute brute_inf_convolution(const ModelParams& p, const SymMat& xi, int grid_per_axis,
                                   int rotated_samples, unsigned long long seed) {
  p.validate();
  const int n = xi.dim;
  const int G = std::max(3, grid_per_axis);
  const Spectrum spec = eigs(xi);
  const double r = std::max(norm(xi), 1e-12);

  std::array<double, 3> x{};
  for (int i = 0; i < n; ++i) x[i] = spec.w[i];

  InfConvBrute out;
  const double lo = -4.0 * r, step = 8.0 * r / (G - 1);
  double best = std::numeric_limits<double>::infinity();
  std::array<int, 3> best_ix{};
  std::array<double, 3> y{};
  std::array<int, 3> ix{};
  const int kmax = (n == 3) ? G : 1;
  for (ix[0] = 0; ix[0] < G; ++ix[0])
    for (ix[1] = 0; ix[1] < G; ++ix[1])
      for (ix[2] = 0; ix[2] < kmax; ++ix[2]) {
        for (int d = 0; d < n; ++d) y[d] = lo + step * ix[d];
        const double v =
            primal_value_diag(p, std::span<const double>(x.data(), n), n,
                              std::span<const double>(y.data(), n));
        if (v < best) {
          best = v;
          best_ix = ix;
        }
      }
  out.diag_grid_min = best;
  for (int d = 0; d < n; ++d)
    if (best_ix[d] == 0 || best_ix[d] == G - 1) out.argmin_interior = false;

  // Lipschitz bound over the box: |grad f| + |grad sqrt(2 a k h)|
  const double cs_max = n * p.lambda_s + 2.0 * p.mu_s;
  const double Ch = std::sqrt(double(n) * (p.lambda_w + 2.0 * p.mu_w));
  const double lip = cs_max * r * (1.0 + 4.0 * std::sqrt(double(n))) +
                     std::sqrt(2.0 * p.alpha * p.kappa) * Ch;
  out.grid_error_bound = lip * 0.5 * step * std::sqrt(double(n));

  // rotation-augmented general xi' sampling
  std::mt19937_64 rng(seed);
  double best_rot = std::numeric_limits<double>::infinity();
  for (int k = 0; k < rotated_samples; ++k) {
    const auto R = random_rotation(rng, n);
    std::array<double, 3> d{};
    for (int i = 0; i < n; ++i) d[i] = uniform(rng, -4.0 * r, 4.0 * r);
    SymMat xip = SymMat::zero(n);
    for (int i = 0; i < n; ++i) xip.set(i, i, d[i]);
    best_rot = std::min(best_rot, primal_value_full(p, xi, rotate(xip, R)));
  }
  out.rotated_min = best_rot;
  return out;
}

namespace {

// frame pairing l_i = v_i^T xi v_i, sorted ascending
std::array<double, 3> frame_pairing(const SymMat& xi,
                                    const std::array<std::array<double, 3>, 3>& R, int n) {
  std::array<double, 3> l{};
  for (int k = 0; k < n; ++k) {
    double s = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) s += R[k][a] * xi(a, b) * R[k][b];
    l[k] = s;
  }
  std::sort(l.begin(), l.begin() + n);
  return l;
}

// coarse descent on the frame-restricted primal objective: grid then
// golden-section coordinate sweeps
double rotated_primal_min(const ModelParams& p, const SymMat& xi,
                          const std::array<std::array<double, 3>, 3>& R, int n) {
  const auto l = frame_pairing(xi, R, n);
  const double tr = xi.trace();
  const double nsq = ddot(xi, xi);
  auto value = [&](const std::array<double, 3>& y) {
    double ysum = 0.0, ydot = 0.0, ysq = 0.0, asum = 0.0;
    for (int i = 0; i < n; ++i) {
      ysum += y[i];
      ydot += y[i] * l[i];
      ysq += y[i] * y[i];
      asum += std::abs(y[i]);
    }
    const double t = tr - ysum;
    const double frob = nsq - 2.0 * ydot + ysq;  // |xi - xi'|_F^2
    const double h = p.mu_w * asum * asum + (p.lambda_w + p.mu_w) * ysum * ysum;
    return 0.5 * (p.lambda_s * t * t + 2.0 * p.mu_s * frob) +
           std::sqrt(2.0 * p.alpha * p.kappa * h);
  };
  const double r = std::max(norm(xi), 1e-12);
  const int G = 33;
  std::array<double, 3> y{}, best_y{};
  double best = std::numeric_limits<double>::infinity();
  std::array<int, 3> ix{};
  const int kmax = (n == 3) ? G : 1;
  for (ix[0] = 0; ix[0] < G; ++ix[0])
    for (ix[1] = 0; ix[1] < G; ++ix[1])
      for (ix[2] = 0; ix[2] < kmax; ++ix[2]) {
        for (int d = 0; d < n; ++d) y[d] = -4.0 * r + 8.0 * r * ix[d] / (G - 1);
        const double v = value(y);
        if (v < best) {
          best = v;
          best_y = y;
        }
      }
  y = best_y;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int sweep = 0; sweep < 120; ++sweep) {
    const double before = best;
    for (int i = 0; i < n; ++i) {
      double a = -4.5 * r, b = 4.5 * r;
      for (int it = 0; it < 80; ++it) {
        const double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
        std::array<double, 3> y1 = y, y2 = y;
        y1[i] = x1;
        y2[i] = x2;
        if (value(y1) <= value(y2))
          b = x2;
        else
          a = x1;
      }
      std::array<double, 3> cand = y;
      cand[i] = 0.5 * (a + b);
      double v = value(cand);
      std::array<double, 3> zero = y;
      zero[i] = 0.0;
      const double v0 = value(zero);
      if (v0 < v) {
        v = v0;
        cand[i] = 0.0;
      }
      if (v < best) {
        best = v;
        y = cand;
      }
    }
    if (before - best <= 1e-13 * (1.0 + std::abs(best))) break;
  }
  return best;
}

}  // namespace

OracleReport rotation_robustness(const ModelParams& p, RotationOp op, int dim, int samples,
                                 int frames_per_sample, unsigned long long seed) {
  p.validate();
  OracleReport rep;
  rep.seed = seed;
  rep.samples = samples;
  std::mt19937_64 rng(seed);
  switch (op) {
    case RotationOp::FEpsInner:
      rep.name = "rotation_robustness.F_eps_inner_max";
      break;
    case RotationOp::WBarDual:
      rep.name = "rotation_robustness.w_bar_dual";
      break;
    case RotationOp::WBarPrimal:
      rep.name = "rotation_robustness.w_bar_primal";
      break;
    case RotationOp::WBarIsotropy:
      rep.name = "rotation_robustness.w_bar_isotropy";
      break;
  }

  for (int k = 0; k < samples; ++k) {
    SymMat xi = random_symmat(rng, dim, 2.5);
    // adversarial near-degenerate spectra every third sample
    if (k % 3 == 2) {
      const auto spec = eigs(xi);
      std::array<double, 3> w = spec.w;
      w[dim - 1] = w[0] + uniform(rng, 0.0, 1e-9);
      xi = from_eigen_coords(spec, std::span<const double>(w.data(), dim));
    }
    const double eps = std::exp(uniform(rng, std::log(1e-3), std::log(0.5)));
    const double theta = uniform(rng, 0.0, 1.0);

    double restricted = 0.0;
    switch (op) {
      case RotationOp::FEpsInner: {
        const auto spec = eigs(xi);
        restricted = f_eps_inner_max_with_pairing(
            p, eps, theta, dim, std::span<const double>(spec.w.data(), dim));
        break;
      }
      case RotationOp::WBarDual:
        restricted = w_bar_dual(p, xi).value;
        break;
      case RotationOp::WBarPrimal:
        restricted = w_bar_primal(p, xi).value;
        break;
      case RotationOp::WBarIsotropy:
        restricted = w_bar_dual(p, xi).value;
        break;
    }

    for (int f = 0; f < frames_per_sample; ++f) {
      // include the identity frame so exact agreement is exercised
      std::array<std::array<double, 3>, 3> R{};
      if (f == 0) {
        R[0] = {1, 0, 0};
        R[1] = {0, 1, 0};
        R[2] = {0, 0, 1};
      } else {
        R = random_rotation(rng, dim);
      }
      double value = 0.0;
      switch (op) {
        case RotationOp::FEpsInner: {
          const auto l = frame_pairing(xi, R, dim);
          value = f_eps_inner_max_with_pairing(p, eps, theta, dim,
                                               std::span<const double>(l.data(), dim));
          break;
        }
        case RotationOp::WBarDual: {
          const auto l = frame_pairing(xi, R, dim);
          value = w_bar_dual_with_pairing(p, dim, std::span<const double>(l.data(), dim));
          break;
        }
        case RotationOp::WBarPrimal:
          value = rotated_primal_min(p, xi, R, dim);
          break;
        case RotationOp::WBarIsotropy:
          value = w_bar_dual(p, rotate(xi, R)).value;
          break;
      }
      double gap = 0.0;
      if (op == RotationOp::WBarPrimal) {
        gap = restricted - value;  // a lower rotated minimum falsifies the reduction
      } else if (op == RotationOp::WBarIsotropy) {
        gap = std::abs(value - restricted);
      } else {
        gap = value - restricted;  // a higher rotated-frame optimum falsifies it
      }
      track(rep, std::max(gap, 0.0), std::max(gap, 0.0) / (1.0 + std::abs(restricted)), xi);
    }
  }
  return rep;
}

double conjugate_bruteforce(const ModelParams& p, ConjugateWhich which, const SymMat& xi,
                            int grid_per_axis) {
  p.validate();
  const int n = xi.dim;
  const auto w = eigenvalues(xi);
  double xmax = 0.0;
  for (int i = 0; i < n; ++i) xmax = std::max(xmax, std::abs(w[i]));
  const double radius = 2.0 * n * (p.lambda_w + 2.0 * p.mu_w) * (1.0 + xmax);

  if (which == ConjugateWhich::G) {
    const int G = grid_per_axis > 0 ? grid_per_axis : (n == 2 ? 401 : 97);
    double best = -std::numeric_limits<double>::infinity();
    std::array<double, 3> t{};
    std::array<int, 3> ix{};
    const int kmax = (n == 3) ? G : 1;
    for (ix[0] = 0; ix[0] < G; ++ix[0])
      for (ix[1] = 0; ix[1] < G; ++ix[1])
        for (ix[2] = 0; ix[2] < kmax; ++ix[2]) {
          double dot = 0.0, lo = radius, hi = -radius;
          for (int d = 0; d < n; ++d) {
            t[d] = -radius + 2.0 * radius * ix[d] / (G - 1);
            dot += t[d] * w[d];
            lo = std::min(lo, t[d]);
            hi = std::max(hi, t[d]);
          }
          best = std::max(best, 2.0 * dot - G_general(p.lambda_w, p.mu_w, lo, hi));
        }
    return best;
  }

  // GTilde: deviatoric tau grid, objective tau:xi - (tau_max - tau_min)^2/(4 mu_w)
  const int G = grid_per_axis > 0 ? grid_per_axis : (n == 2 ? 20001 : 801);
  double best = -std::numeric_limits<double>::infinity();
  if (n == 2) {
    for (int i = 0; i < G; ++i) {
      const double u = -radius + 2.0 * radius * i / (G - 1);
      const double dot = -u * w[0] + u * w[1];
      const double d = 2.0 * std::abs(u);
      best = std::max(best, dot - d * d / (4.0 * p.mu_w));
    }
    return best;
  }
  for (int i = 0; i < G; ++i)
    for (int j = 0; j < G; ++j) {
      const double t0 = -radius + 2.0 * radius * i / (G - 1);
      const double t1 = -radius + 2.0 * radius * j / (G - 1);
      const double t2 = -t0 - t1;
      const double dot = t0 * w[0] + t1 * w[1] + t2 * w[2];
      const double lo = std::min({t0, t1, t2}), hi = std::max({t0, t1, t2});
      best = std::max(best, dot - (hi - lo) * (hi - lo) / (4.0 * p.mu_w));
    }
  return best;
}

OracleReport convexity_probe(const ModelParams& p, ConvexityFn fn, int dim, int samples,
                             unsigned long long seed, double eps) {
  p.validate();
  OracleReport rep;
  rep.seed = seed;
  rep.samples = samples;
  std::mt19937_64 rng(seed);

  if (fn == ConvexityFn::WEps) {
    rep.name = "convexity_probe.W_eps";
    // search across the f = g_eps crossover along random rays
    for (int k = 0; k < samples; ++k) {
      SymMat dir = random_symmat(rng, dim, 1.0);
      const double nn = norm(dir);
      if (nn < 1e-9) continue;
      dir *= 1.0 / nn;
      const double eta = p.eta_of(eps);
      const double a2 = f_strong(p, dir);
      const double b2 = 0.5 * eta * iso_quad(p.A_w(), dir);
      if (a2 <= b2) continue;
      const double t0 = std::sqrt(p.kappa / eps / (a2 - b2));
      const double delta = t0 * uniform(rng, 0.01, 0.3);
      const SymMat m0 = t0 * dir;
      const SymMat ma = (t0 - delta) * dir;
      const SymMat mb = (t0 + delta) * dir;
      const double gap = w_eps(p, eps, m0) -
                         0.5 * (w_eps(p, eps, ma) + w_eps(p, eps, mb));
      track(rep, gap, gap / (1.0 + std::abs(w_eps(p, eps, m0))), m0);
    }
    return rep;
  }

  rep.name = fn == ConvexityFn::WBar ? "convexity_probe.w_bar" : "convexity_probe.sqrt_h_r";
  for (int k = 0; k < samples; ++k) {
    const int d = (fn == ConvexityFn::SqrtHr) ? 2 : dim;
    const SymMat a = random_symmat(rng, d, 3.0);
    const SymMat b = random_symmat(rng, d, 3.0);
    const double lam = uniform(rng, 0.1, 0.9);
    const SymMat mid = lam * a + (1.0 - lam) * b;
    double va, vb, vm;
    if (fn == ConvexityFn::WBar) {
      va = w_bar_dual(p, a).value;
      vb = w_bar_dual(p, b).value;
      vm = w_bar_dual(p, mid).value;
    } else {
      const double r = uniform(rng, 0.0, 1.0);
      va = std::sqrt(2.0 * p.alpha * p.kappa * h_r(p, r, a));
      vb = std::sqrt(2.0 * p.alpha * p.kappa * h_r(p, r, b));
      vm = std::sqrt(2.0 * p.alpha * p.kappa * h_r(p, r, mid));
    }
    const double gap = vm - (lam * va + (1.0 - lam) * vb);
    track(rep, gap, gap / (1.0 + std::abs(vm)), mid);
  }
  return rep;
}

}  // namespace brittle
