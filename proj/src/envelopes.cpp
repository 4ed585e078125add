#include "brittle/envelopes.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "brittle/rng.hpp"

namespace brittle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Eigenframe-restricted maximizer for the piecewise concave-quadratic inner
// problems. With xi's eigenvalues l (ascending) the problem is
//
//   maximize  l.t - Aq (sum t)^2 - Bq sum t^2 - c * G(t)   over t in R^n,
//
// optionally with sum t = 0, where G is the 3-branch stress form (Hencky),
// the single-branch Tresca limit (t_max-t_min)^2/(4mu), or absent. Since G
// is C^1 across its branch boundaries at a fixed ordering pattern, the
// maximizer is a stationary point of one branch quadratic restricted to the
// affine hull of its tie pattern (equal coordinates). Candidates: all tie
// patterns x all branches; each is a <=4x4 linear solve. Candidates are
// screened against sortedness and the branch region; the true objective is
// evaluated at every candidate (any point gives a valid lower bound), and
// the best one wins.
// ---------------------------------------------------------------------------

struct GKind {
  enum class Type { None, Hencky, TrescaLimit };
  Type type = Type::None;
  double lambda = 0.0;
  double mu = 1.0;
};

struct SpectralProblem {
  int n = 2;
  std::array<double, 3> lin{};  // ascending
  double Aq = 0.0, Bq = 0.25;
  double c = 0.0;
  GKind g;
  bool trace_zero = false;
};

struct SpectralResult {
  double value = -kInf;
  std::array<double, 3> t{};
  bool feasible_found = false;
  double g_at_opt = 0.0;
};

double eval_G(const GKind& g, double lo, double hi) {
  switch (g.type) {
    case GKind::Type::None:
      return 0.0;
    case GKind::Type::Hencky:
      return G_general(g.lambda, g.mu, lo, hi);
    case GKind::Type::TrescaLimit: {
      const double d = hi - lo;
      return d * d / (4.0 * g.mu);
    }
  }
  return 0.0;
}

// Branch quadratic G = aff*uf^2 + 2*afl*uf*ul + all*ul^2 in the extreme
// coordinates (uf = t_min, ul = t_max).
struct BranchQuad {
  double aff = 0.0, afl = 0.0, all = 0.0;
};

void branch_quads(const GKind& g, std::vector<BranchQuad>& out) {
  out.clear();
  if (g.type == GKind::Type::None) {
    out.push_back({});
    return;
  }
  if (g.type == GKind::Type::TrescaLimit) {
    const double q = 1.0 / (4.0 * g.mu);
    out.push_back({q, -q, q});
    return;
  }
  const double lam = g.lambda, mu = g.mu;
  out.push_back({1.0 / (lam + 2.0 * mu), 0.0, 0.0});  // low branch
  const double d = 1.0 / (4.0 * mu), s = 1.0 / (4.0 * (lam + mu));
  out.push_back({d + s, s - d, d + s});               // middle branch
  out.push_back({0.0, 0.0, 1.0 / (lam + 2.0 * mu)});  // high branch
}

bool branch_region_ok(const GKind& g, int branch, double lo, double hi, double tol) {
  if (g.type != GKind::Type::Hencky) return true;
  const double beta = (g.lambda + 2.0 * g.mu) / (2.0 * (g.lambda + g.mu));
  const double m = beta * (lo + hi);
  switch (branch) {
    case 0:
      return m <= lo + tol;
    case 1:
      return lo - tol <= m && m <= hi + tol;
    default:
      return m >= hi - tol;
  }
}

// Gaussian elimination with partial pivoting on an augmented d x (d+1)
// system; returns false when singular.
bool solve_dense(int d, std::array<std::array<double, 5>, 4>& m, std::array<double, 4>& sol) {
  for (int col = 0; col < d; ++col) {
    int piv = col;
    for (int r = col + 1; r < d; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    if (std::abs(m[piv][col]) < 1e-300) return false;
    std::swap(m[piv], m[col]);
    for (int r = col + 1; r < d; ++r) {
      const double f = m[r][col] / m[col][col];
      for (int cc = col; cc <= d; ++cc) m[r][cc] -= f * m[col][cc];
    }
  }
  for (int r = d - 1; r >= 0; --r) {
    double s = m[r][d];
    for (int cc = r + 1; cc < d; ++cc) s -= m[r][cc] * sol[cc];
    sol[r] = s / m[r][r];
  }
  return true;
}

SpectralResult maximize_spectral(const SpectralProblem& prob) {
  const int n = prob.n;
  static const std::vector<std::vector<int>> patterns2 = {{1, 1}, {2}};
  static const std::vector<std::vector<int>> patterns3 = {{1, 1, 1}, {2, 1}, {1, 2}, {3}};
  const auto& patterns = (n == 2) ? patterns2 : patterns3;

  std::vector<BranchQuad> quads;
  branch_quads(prob.g, quads);

  SpectralResult best;
  double scale = 1.0;
  for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(prob.lin[i]));

  auto true_objective = [&](const std::array<double, 3>& t) {
    double S = 0.0, sq = 0.0, lo = t[0], hi = t[0], dot = 0.0;
    for (int i = 0; i < n; ++i) {
      S += t[i];
      sq += t[i] * t[i];
      lo = std::min(lo, t[i]);
      hi = std::max(hi, t[i]);
      dot += prob.lin[i] * t[i];
    }
    return dot - prob.Aq * S * S - prob.Bq * sq - prob.c * eval_G(prob.g, lo, hi);
  };

  for (const auto& pat : patterns) {
    const int k = static_cast<int>(pat.size());
    std::array<double, 4> L{}, sz{};
    {
      int ofs = 0;
      for (int g = 0; g < k; ++g) {
        sz[g] = pat[g];
        for (int i = 0; i < pat[g]; ++i) L[g] += prob.lin[ofs + i];
        ofs += pat[g];
      }
    }
    for (int br = 0; br < static_cast<int>(quads.size()); ++br) {
      const BranchQuad& q = quads[br];
      const int d = k + (prob.trace_zero ? 1 : 0);
      std::array<std::array<double, 5>, 4> M{};
      for (int g = 0; g < k; ++g) {
        for (int h = 0; h < k; ++h) M[g][h] = 2.0 * prob.Aq * sz[g] * sz[h];
        M[g][g] += 2.0 * prob.Bq * sz[g];
        M[g][d] = L[g];
      }
      // G contributions: extremes are the first and last group
      if (k == 1) {
        M[0][0] += prob.c * 2.0 * (q.aff + 2.0 * q.afl + q.all);
      } else {
        M[0][0] += prob.c * 2.0 * q.aff;
        M[0][k - 1] += prob.c * 2.0 * q.afl;
        M[k - 1][0] += prob.c * 2.0 * q.afl;
        M[k - 1][k - 1] += prob.c * 2.0 * q.all;
      }
      if (prob.trace_zero) {
        for (int g = 0; g < k; ++g) {
          M[g][k] = sz[g];
          M[k][g] = sz[g];
        }
        M[k][k] = 0.0;
        M[k][d] = 0.0;
      }
      std::array<double, 4> u{};
      if (!solve_dense(d, M, u)) continue;

      std::array<double, 3> t{};
      {
        int ofs = 0;
        for (int g = 0; g < k; ++g)
          for (int i = 0; i < pat[g]; ++i) t[ofs++] = u[g];
      }
      double tmax = 0.0;
      for (int i = 0; i < n; ++i) tmax = std::max(tmax, std::abs(t[i]));
      const double tol = 1e-9 * (scale + tmax + 1.0);

      bool sorted = true;
      for (int i = 0; i + 1 < n; ++i) sorted = sorted && (t[i] <= t[i + 1] + tol);
      const bool region = branch_region_ok(prob.g, br, t[0], t[n - 1], tol);

      const double val = true_objective(t);
      if (val > best.value) {
        best.value = val;
        best.t = t;
      }
      if (sorted && region) best.feasible_found = true;
    }
  }
  {
    double lo = best.t[0], hi = best.t[0];
    for (int i = 0; i < n; ++i) {
      lo = std::min(lo, best.t[i]);
      hi = std::max(hi, best.t[i]);
    }
    best.g_at_opt = eval_G(prob.g, lo, hi);
  }
  return best;
}

// Aq/Bq of the quadratic 1/2 C^{-1} tau : tau in eigen-coordinates.
void inverse_quad_coeffs(int n, double lamC, double muC, double& Aq, double& Bq) {
  const double bulk = n * lamC + 2.0 * muC;
  if (!(muC > 0.0) || !(bulk > 0.0))
    throw std::domain_error("inner maximization: degenerate effective moduli");
  Aq = 1.0 / (2.0 * n * bulk) - 1.0 / (4.0 * n * muC);
  Bq = 1.0 / (4.0 * muC);
}

double golden_min(const std::function<double(double)>& f, double a, double b, int iters,
                  double* xmin, double* gap) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    }
  }
  if (gap) *gap = std::abs(f1 - f2);
  if (f1 <= f2) {
    if (xmin) *xmin = x1;
    return f1;
  }
  if (xmin) *xmin = x2;
  return f2;
}

// Scalar multiplier search for sup { l.t - quad(t) : G(t) <= bound }:
// G(t*(m)) is nonincreasing in the penalty weight m, so the active boundary
// case reduces to a monotone bisection over per-branch KKT solves.
struct ConstrainedMax {
  double value = 0.0;
  std::array<double, 3> t{};
  double multiplier = 0.0;
  double residual = 0.0;  // weak-duality gap of the bisection
};

ConstrainedMax constrained_spectral_max(SpectralProblem prob, double bound) {
  auto solve_pen = [&](double m) {
    prob.c = 0.5 * m;
    SpectralResult r = maximize_spectral(prob);
    if (!r.feasible_found)
      throw std::runtime_error("constrained maximization: no feasible branch candidate");
    return r;
  };
  auto plain_value = [&](const std::array<double, 3>& t) {
    double S = 0.0, sq = 0.0, dot = 0.0;
    for (int i = 0; i < prob.n; ++i) {
      S += t[i];
      sq += t[i] * t[i];
      dot += prob.lin[i] * t[i];
    }
    return dot - prob.Aq * S * S - prob.Bq * sq;
  };

  ConstrainedMax out;
  SpectralResult r0 = solve_pen(0.0);
  if (r0.g_at_opt <= bound * (1.0 + 1e-12)) {
    out.value = plain_value(r0.t);
    out.t = r0.t;
    return out;
  }
  double lo = 0.0, hi = 1.0;
  SpectralResult rhi = solve_pen(hi);
  int guard = 0;
  while (rhi.g_at_opt > bound && guard++ < 400) {
    hi *= 4.0;
    rhi = solve_pen(hi);
  }
  if (rhi.g_at_opt > bound)
    throw std::runtime_error("constrained maximization: multiplier search failed");
  for (int it = 0; it < 300 && (hi - lo) > 1e-15 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    SpectralResult rm = solve_pen(mid);
    if (rm.g_at_opt > bound) {
      lo = mid;
    } else {
      hi = mid;
      rhi = rm;
    }
  }
  out.value = plain_value(rhi.t);  // feasible side: G(t) <= bound
  out.t = rhi.t;
  out.multiplier = hi;
  // weak duality: value <= sup <= penalized + (m/2) * bound
  const double dual_upper = rhi.value + 0.5 * hi * bound;
  out.residual = std::abs(dual_upper - out.value) / (1.0 + std::abs(out.value));
  return out;
}

void check_theta(double theta) {
  if (!(theta >= 0.0 && theta <= 1.0))
    throw std::invalid_argument("F_eps: theta must lie in [0,1]");
}

}  // namespace

// ---------------------------------------------------------------------------
// Hencky family
// ---------------------------------------------------------------------------

double F_eps(const ModelParams& p, double eps, double theta, const SymMat& xi, SymMat* tau_opt) {
  check_theta(theta);
  const double eta = p.eta_of(eps);
  const int n = xi.dim;
  const Spectrum spec = eigs(xi);

  SpectralProblem prob;
  prob.n = n;
  for (int i = 0; i < n; ++i) prob.lin[i] = spec.w[i];
  inverse_quad_coeffs(n, p.lambda_s - eta * p.lambda_w, p.mu_s - eta * p.mu_w, prob.Aq, prob.Bq);
  prob.c = theta / (2.0 * eta);
  prob.g = {GKind::Type::Hencky, p.lambda_w, p.mu_w};

  const SpectralResult r = maximize_spectral(prob);
  if (!r.feasible_found)
    throw std::runtime_error("F_eps: inner maximization found no feasible branch solution");
  if (tau_opt) *tau_opt = from_eigen_coords(spec, std::span<const double>(r.t.data(), n));
  return 0.5 * eta * iso_quad(p.A_w(), xi) + p.kappa * theta / eps + (1.0 - theta) * r.value;
}

namespace {

EnvelopeEval minimize_theta(const std::function<double(double)>& F, const EnvelopeOptions& opt) {
  EnvelopeEval out;
  const int m = opt.theta_grid;
  int best_i = 0;
  double best_v = kInf;
  for (int i = 0; i <= m; ++i) {
    const double v = F(double(i) / m);
    if (v < best_v) {
      best_v = v;
      best_i = i;
    }
  }
  const double a = std::max(0.0, (best_i - 1.0) / m);
  const double b = std::min(1.0, (best_i + 1.0) / m);
  double theta = 0.0, gap = 0.0;
  double v = golden_min(F, a, b, opt.golden_iters, &theta, &gap);
  if (best_v < v) {  // grid point was already the minimum
    v = best_v;
    theta = double(best_i) / m;
  }
  out.value = v;
  out.theta_opt = theta;
  out.residual = gap / (1.0 + std::abs(v));
  out.route = EnvelopeRoute::ClosedForm;
  return out;
}

}  // namespace

EnvelopeEval sq_envelope(const ModelParams& p, double eps, const SymMat& xi,
                         const EnvelopeOptions& opt) {
  EnvelopeEval out =
      minimize_theta([&](double th) { return F_eps(p, eps, th, xi); }, opt);
  F_eps(p, eps, out.theta_opt, xi, &out.tau_opt);
  return out;
}

EnvelopeEval w_bar_dual(const ModelParams& p, const SymMat& xi) {
  p.validate();
  const int n = xi.dim;
  const Spectrum spec = eigs(xi);

  SpectralProblem prob;
  prob.n = n;
  for (int i = 0; i < n; ++i) prob.lin[i] = spec.w[i];
  inverse_quad_coeffs(n, p.lambda_s, p.mu_s, prob.Aq, prob.Bq);
  prob.g = {GKind::Type::Hencky, p.lambda_w, p.mu_w};

  const ConstrainedMax cm = constrained_spectral_max(prob, 2.0 * p.alpha * p.kappa);
  EnvelopeEval out;
  out.value = cm.value;
  out.tau_opt = from_eigen_coords(spec, std::span<const double>(cm.t.data(), n));
  out.route = EnvelopeRoute::Dual;
  out.residual = cm.residual;
  return out;
}

// ---------------------------------------------------------------------------
// Primal route: grid + coordinate descent + active-set Newton polish, all in
// xi's eigen-coordinates.
// ---------------------------------------------------------------------------

namespace {

struct PrimalObjective {
  int n = 2;
  std::array<double, 3> x{};  // eigenvalues of xi, ascending
  double ls = 0, ms = 0;      // strong Lame coefficients
  double lw = 0, mw = 0;      // weak Lame coefficients
  double s = 0;               // sqrt(2 alpha kappa)

  double eval(const std::array<double, 3>& y) const {
    double dsum = 0.0, dsq = 0.0, asum = 0.0, ysum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = x[i] - y[i];
      dsum += d;
      dsq += d * d;
      asum += std::abs(y[i]);
      ysum += y[i];
    }
    const double h = mw * asum * asum + (lw + mw) * ysum * ysum;
    return 0.5 * ls * dsum * dsum + ms * dsq + s * std::sqrt(h);
  }
};

// One full pass of coordinate descent with exact (golden-section) line
// minimizations; the 1-D sections are convex with at most one kink at 0,
// which is probed explicitly.
double coordinate_descent(const PrimalObjective& P, std::array<double, 3>& y, double span,
                          int max_sweeps) {
  double val = P.eval(y);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const double before = val;
    for (int i = 0; i < P.n; ++i) {
      auto line = [&](double t) {
        std::array<double, 3> z = y;
        z[i] = t;
        return P.eval(z);
      };
      double tbest = 0.0;
      double v = golden_min(line, -span, span, 90, &tbest, nullptr);
      const double v0 = line(0.0);
      if (v0 < v) {
        v = v0;
        tbest = 0.0;
      }
      if (v < val) {
        val = v;
        y[i] = tbest;
      }
    }
    if (before - val <= 1e-14 * (1.0 + std::abs(val))) break;
  }
  return val;
}

// Active-set damped Newton on the sign orthant of y; pins coordinates that
// hit zero and releases them when a one-sided derivative says so. Valid in
// regions where h(y) > 0.
double polish_primal(const PrimalObjective& P, std::array<double, 3>& y, double val_in) {
  std::array<double, 3> y_best = y;
  double val_best = val_in;
  const int n = P.n;

  std::array<int, 3> sigma{};  // 0 = pinned at zero
  double ymax = 0.0;
  for (int i = 0; i < n; ++i) ymax = std::max(ymax, std::abs(y[i]));
  for (int i = 0; i < n; ++i) {
    if (std::abs(y[i]) <= 1e-12 * (1.0 + ymax)) {
      y[i] = 0.0;
      sigma[i] = 0;
    } else {
      sigma[i] = y[i] > 0 ? 1 : -1;
    }
  }

  for (int outer = 0; outer < 40; ++outer) {
    // gradient / Hessian pieces at y within the current sign pattern
    auto derivs = [&](const std::array<double, 3>& z, std::array<double, 3>& grad,
                      std::array<std::array<double, 3>, 3>& hess, double& h, double& asum,
                      double& zsum) {
      double dsum = 0.0;
      asum = 0.0;
      zsum = 0.0;
      for (int i = 0; i < n; ++i) {
        dsum += P.x[i] - z[i];
        asum += sigma[i] * z[i];
        zsum += z[i];
      }
      h = P.mw * asum * asum + (P.lw + P.mw) * zsum * zsum;
      const double rt = std::sqrt(std::max(h, 1e-300));
      for (int i = 0; i < n; ++i) {
        const double hi_ = 2.0 * P.mw * asum * sigma[i] + 2.0 * (P.lw + P.mw) * zsum;
        grad[i] = -P.ls * dsum - 2.0 * P.ms * (P.x[i] - z[i]) + P.s * hi_ / (2.0 * rt);
      }
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double hij = 2.0 * P.mw * sigma[i] * sigma[j] + 2.0 * (P.lw + P.mw);
          const double hi_ = 2.0 * P.mw * asum * sigma[i] + 2.0 * (P.lw + P.mw) * zsum;
          const double hj_ = 2.0 * P.mw * asum * sigma[j] + 2.0 * (P.lw + P.mw) * zsum;
          hess[i][j] = P.ls + (i == j ? 2.0 * P.ms : 0.0) + P.s * (hij / (2.0 * rt) - hi_ * hj_ / (4.0 * h * rt));
        }
    };

    bool any_free = false;
    for (int i = 0; i < n; ++i) any_free = any_free || sigma[i] != 0;
    if (!any_free) break;  // y = 0: the kink at the origin is left to the CD stage

    double val = P.eval(y);
    for (int it = 0; it < 60; ++it) {
      std::array<double, 3> grad{};
      std::array<std::array<double, 3>, 3> hess{};
      double h, asum, zsum;
      derivs(y, grad, hess, h, asum, zsum);
      if (h <= 0.0) break;

      // reduced Newton system over free coordinates
      std::array<int, 3> free_ix{};
      int nf = 0;
      double gnorm = 0.0;
      for (int i = 0; i < n; ++i)
        if (sigma[i] != 0) {
          free_ix[nf++] = i;
          gnorm = std::max(gnorm, std::abs(grad[i]));
        }
      if (nf == 0 || gnorm <= 1e-13 * (1.0 + std::abs(val))) break;

      std::array<std::array<double, 5>, 4> M{};
      for (int a = 0; a < nf; ++a) {
        for (int b = 0; b < nf; ++b) M[a][b] = hess[free_ix[a]][free_ix[b]];
        M[a][nf] = -grad[free_ix[a]];
      }
      std::array<double, 4> step{};
      if (!solve_dense(nf, M, step)) break;

      double tcap = 1.0;
      for (int a = 0; a < nf; ++a) {
        const int i = free_ix[a];
        if (step[a] * sigma[i] < 0.0) {  // moving toward the kink
          const double tc = -y[i] / step[a];
          if (tc < tcap) tcap = tc;
        }
      }
      double t = tcap;
      bool accepted = false;
      for (int bt = 0; bt < 40; ++bt) {
        std::array<double, 3> z = y;
        for (int a = 0; a < nf; ++a) z[free_ix[a]] += t * step[a];
        for (int i = 0; i < n; ++i)
          if (sigma[i] != 0 && z[i] * sigma[i] < 0.0) z[i] = 0.0;
        const double v = P.eval(z);
        if (v <= val) {
          y = z;
          val = v;
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      if (!accepted) break;
      for (int i = 0; i < n; ++i)
        if (sigma[i] != 0 && y[i] == 0.0) sigma[i] = 0;
    }

    if (val < val_best) {
      val_best = val;
      y_best = y;
    }

    // release pinned coordinates when a one-sided derivative descends
    std::array<double, 3> grad{};
    std::array<std::array<double, 3>, 3> hess{};
    double h, asum, zsum;
    derivs(y, grad, hess, h, asum, zsum);
    if (h <= 0.0) break;
    const double rt = std::sqrt(h);
    bool released = false;
    double dsum = 0.0;
    for (int i = 0; i < n; ++i) dsum += P.x[i] - y[i];
    for (int i = 0; i < n && !released; ++i) {
      if (sigma[i] != 0) continue;
      const double base = -P.ls * dsum - 2.0 * P.ms * (P.x[i] - y[i]) +
                          P.s * (2.0 * (P.lw + P.mw) * zsum) / (2.0 * rt);
      const double kink = P.s * (2.0 * P.mw * asum) / (2.0 * rt);
      const double tol = 1e-13 * (1.0 + std::abs(val_best));
      if (base + kink < -tol) {
        sigma[i] = 1;
        released = true;
      } else if (base - kink > tol) {
        sigma[i] = -1;
        released = true;
      }
    }
    if (!released) break;
  }

  y = y_best;
  return val_best;
}

}  // namespace

EnvelopeEval w_bar_primal(const ModelParams& p, const SymMat& xi, const EnvelopeOptions& opt) {
  p.validate();
  const int n = xi.dim;
  const Spectrum spec = eigs(xi);
  const double r = norm(xi);

  EnvelopeEval out;
  out.route = EnvelopeRoute::Primal;
  const EnvelopeEval dual = w_bar_dual(p, xi);

  if (r < 1e-300) {
    out.tau_opt = SymMat::zero(n);
    out.residual = std::abs(dual.value);
    return out;
  }

  PrimalObjective P;
  P.n = n;
  for (int i = 0; i < n; ++i) P.x[i] = spec.w[i];
  P.ls = p.lambda_s;
  P.ms = p.mu_s;
  P.lw = p.lambda_w;
  P.mw = p.mu_w;
  P.s = std::sqrt(2.0 * p.alpha * p.kappa);

  // coarse grid over the eigenvalue box [-4r, 4r]^n; the minimizer is
  // interior since f's coercivity pins xi' near xi (|xi - xi'| <= cond^(1/2) |xi|)
  const int G = std::max(8, opt.primal_grid);
  std::array<double, 3> y{}, best_y{};
  double best_v = kInf;
  const double lo = -4.0 * r, step = 8.0 * r / (G - 1);
  std::array<int, 3> ix{};
  const int kmax = (n == 3) ? G : 1;
  for (ix[0] = 0; ix[0] < G; ++ix[0])
    for (ix[1] = 0; ix[1] < G; ++ix[1])
      for (ix[2] = 0; ix[2] < kmax; ++ix[2]) {
        for (int d = 0; d < n; ++d) y[d] = lo + step * ix[d];
        const double v = P.eval(y);
        if (v < best_v) {
          best_v = v;
          best_y = y;
        }
      }
  y = best_y;
  double val = coordinate_descent(P, y, 4.5 * r, opt.cd_max_sweeps);

  // The origin is the one point where the directional structure of the
  // dissipation is not coordinate-separable; probe mixed sign directions.
  {
    double ymax = 0.0;
    for (int i = 0; i < n; ++i) ymax = std::max(ymax, std::abs(y[i]));
    if (ymax <= 1e-6 * r) {
      bool moved = false;
      std::array<int, 3> sgn{};
      const int total = (n == 2) ? 9 : 27;
      for (int code = 0; code < total; ++code) {
        int cc = code;
        double nrm = 0.0;
        std::array<double, 3> d{};
        for (int i = 0; i < n; ++i) {
          sgn[i] = cc % 3 - 1;
          cc /= 3;
          d[i] = sgn[i];
          nrm += d[i] * d[i];
        }
        if (nrm == 0.0) continue;
        for (int i = 0; i < n; ++i) d[i] /= std::sqrt(nrm);
        auto ray = [&](double t) {
          std::array<double, 3> z = y;
          for (int i = 0; i < n; ++i) z[i] += t * d[i];
          return P.eval(z);
        };
        double tb = 0.0;
        const double v = golden_min(ray, 0.0, 5.0 * r, 80, &tb, nullptr);
        if (v < val - 1e-14 * (1.0 + std::abs(val))) {
          for (int i = 0; i < n; ++i) y[i] += tb * d[i];
          val = v;
          moved = true;
        }
      }
      if (moved) val = coordinate_descent(P, y, 4.5 * r, opt.cd_max_sweeps);
    }
  }

  val = polish_primal(P, y, val);

  out.value = val;
  // stress paired with the optimal elastic strain xi - xi'
  std::array<double, 3> elastic{};
  for (int i = 0; i < n; ++i) elastic[i] = P.x[i] - y[i];
  out.tau_opt = apply_iso(p.A_s(), from_eigen_coords(spec, std::span<const double>(elastic.data(), n)));
  out.theta_opt = 0.0;
  out.residual = std::abs(val - dual.value) / (1.0 + std::abs(val));
  if (out.residual > opt.duality_tol)
    throw std::runtime_error("w_bar_primal: duality gap above tolerance");
  return out;
}

double w_bar_recession(const ModelParams& p, const SymMat& xi) { return support_K(p, xi); }

double w_bar_recession_probe(const ModelParams& p, const SymMat& xi, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("w_bar_recession_probe: t must be positive");
  return w_bar_dual(p, t * xi).value / t;
}

double kohn_strang_envelope(const ModelParams& p, double eps, const SymMat& xi) {
  if (!(eps > 0.0)) throw std::invalid_argument("kohn_strang_envelope: eps must be positive");
  const double eta = p.eta_of(eps);
  const double h = h_density(p, xi);
  const double quad = iso_quad(p.A_w(), xi);
  if (h >= 2.0 * p.kappa / (eta * eps))
    return 0.5 * eta * quad + p.kappa / eps;
  return std::sqrt(2.0 * eta * p.kappa * h / eps) + 0.5 * eta * (quad - h);
}

// ---------------------------------------------------------------------------
// Tresca family
// ---------------------------------------------------------------------------

namespace {

void require_deviatoric_input(const SymMat& xi, const char* who) {
  if (std::abs(xi.trace()) > 1e-12 * (1.0 + norm(xi)))
    throw std::invalid_argument(std::string(who) + ": input must be deviatoric");
}

// Exact primal for Wtilde: in deviatoric eigen-coordinates the dissipation
// sqrt(2 kappa htilde) = sqrt(2 kappa mu_w) * sum |y_i| is piecewise linear,
// so each sign sector of the trace-zero plane reduces to a linear solve and
// each sector edge to a scalar soft-threshold.
double w_tilde_primal_exact(const ModelParams& p, const std::array<double, 3>& x, int n,
                            std::array<double, 3>* y_opt) {
  const double ms = p.mu_s;
  const double ct = std::sqrt(2.0 * p.kappa * p.mu_w);

  auto eval = [&](const std::array<double, 3>& y) {
    double q = 0.0, a = 0.0;
    for (int i = 0; i < n; ++i) {
      q += (x[i] - y[i]) * (x[i] - y[i]);
      a += std::abs(y[i]);
    }
    return ms * q + ct * a;
  };

  std::array<double, 3> best{};
  double best_v = eval(best);

  auto consider = [&](const std::array<double, 3>& y) {
    const double v = eval(y);
    if (v < best_v) {
      best_v = v;
      best = y;
    }
  };

  // soft-threshold minimizer of A (t - B)^2 + C |t|
  auto soft = [](double A, double B, double C) {
    const double shrink = C / (2.0 * A);
    if (B > shrink) return B - shrink;
    if (B < -shrink) return B + shrink;
    return 0.0;
  };

  if (n == 2) {
    // y = (-u, u): 2 mu_s (u - (x1-x0)/2)^2 + 2 ct |u| + const
    const double u = soft(2.0 * ms, 0.5 * (x[1] - x[0]), 2.0 * ct);
    consider({-u, u, 0.0});
  } else {
    // sector interiors: fixed signs of (y0, y1, y2), y2 = -y0-y1
    for (int s0 = -1; s0 <= 1; s0 += 2)
      for (int s1 = -1; s1 <= 1; s1 += 2)
        for (int s2 = -1; s2 <= 1; s2 += 2) {
          // stationarity in (a,b) with y=(a, b, -a-b)
          // 2ms[(a-x0) - (y2-x2)] + ct(s0 - s2) = 0
          // 2ms[(b-x1) - (y2-x2)] + ct(s1 - s2) = 0
          std::array<std::array<double, 5>, 4> M{};
          M[0][0] = 4.0 * ms;
          M[0][1] = 2.0 * ms;
          M[1][0] = 2.0 * ms;
          M[1][1] = 4.0 * ms;
          M[0][2] = 2.0 * ms * (x[0] - x[2]) - ct * (s0 - s2);
          M[1][2] = 2.0 * ms * (x[1] - x[2]) - ct * (s1 - s2);
          std::array<double, 4> sol{};
          if (!solve_dense(2, M, sol)) continue;
          const std::array<double, 3> y = {sol[0], sol[1], -sol[0] - sol[1]};
          if (y[0] * s0 < 0.0 || y[1] * s1 < 0.0 || y[2] * s2 < 0.0) continue;
          consider(y);
        }
    // sector edges y_i = 0
    {
      const double b = soft(2.0 * ms, 0.5 * (x[1] - x[2]), 2.0 * ct);
      consider({0.0, b, -b});
      const double a = soft(2.0 * ms, 0.5 * (x[0] - x[2]), 2.0 * ct);
      consider({a, 0.0, -a});
      const double a2 = soft(2.0 * ms, 0.5 * (x[0] - x[1]), 2.0 * ct);
      consider({a2, -a2, 0.0});
    }
  }
  if (y_opt) *y_opt = best;
  return best_v;
}

}  // namespace

EnvelopeEval w_tilde(const ModelParams& p, const SymMat& xi_dev, const EnvelopeOptions& opt) {
  p.validate_tresca();
  require_deviatoric_input(xi_dev, "w_tilde");
  const int n = xi_dev.dim;
  const Spectrum spec = eigs(xi_dev);

  SpectralProblem prob;
  prob.n = n;
  for (int i = 0; i < n; ++i) prob.lin[i] = spec.w[i];
  inverse_quad_coeffs(n, p.lambda_s, p.mu_s, prob.Aq, prob.Bq);
  prob.g = {GKind::Type::TrescaLimit, 0.0, p.mu_w};
  prob.trace_zero = true;

  const ConstrainedMax cm = constrained_spectral_max(prob, 2.0 * p.kappa);

  std::array<double, 3> x{};
  for (int i = 0; i < n; ++i) x[i] = spec.w[i];
  const double primal = w_tilde_primal_exact(p, x, n, nullptr);

  EnvelopeEval out;
  out.value = cm.value;
  out.tau_opt = from_eigen_coords(spec, std::span<const double>(cm.t.data(), n));
  out.route = EnvelopeRoute::Dual;
  out.residual = std::abs(primal - cm.value) / (1.0 + std::abs(cm.value));
  if (out.residual > opt.duality_tol)
    throw std::runtime_error("w_tilde: primal-dual gap above tolerance");
  return out;
}

double tresca_limit_bulk(const ModelParams& p, const SymMat& xi) {
  const DevSplit split = dev_split(xi);
  const double tr = split.trace;
  return tr * tr * (0.5 * p.lambda_s + p.mu_s / xi.dim) + w_tilde(p, split.deviator).value;
}

double F_eps_tresca(const ModelParams& p, double eps, double theta, const SymMat& xi,
                    SymMat* tau_opt) {
  check_theta(theta);
  p.validate_tresca();
  if (!(eps > 0.0)) throw std::invalid_argument("F_eps_tresca: eps must be positive");
  const int n = xi.dim;
  const Spectrum spec = eigs(xi);

  SpectralProblem prob;
  prob.n = n;
  for (int i = 0; i < n; ++i) prob.lin[i] = spec.w[i];
  inverse_quad_coeffs(n, p.lambda_s - p.lambda_w, p.mu_s - eps * p.mu_w, prob.Aq, prob.Bq);
  prob.c = theta / (2.0 * eps);
  prob.g = {GKind::Type::Hencky, p.lambda_w / eps, p.mu_w};

  const SpectralResult r = maximize_spectral(prob);
  if (!r.feasible_found)
    throw std::runtime_error("F_eps_tresca: inner maximization found no feasible branch solution");
  if (tau_opt) *tau_opt = from_eigen_coords(spec, std::span<const double>(r.t.data(), n));
  const IsoTensor A_w_eps{p.lambda_w, eps * p.mu_w};
  return 0.5 * iso_quad(A_w_eps, xi) + p.kappa * theta / eps + (1.0 - theta) * r.value;
}

EnvelopeEval sq_envelope_tresca(const ModelParams& p, double eps, const SymMat& xi,
                                const EnvelopeOptions& opt) {
  EnvelopeEval out =
      minimize_theta([&](double th) { return F_eps_tresca(p, eps, th, xi); }, opt);
  F_eps_tresca(p, eps, out.theta_opt, xi, &out.tau_opt);
  return out;
}

double f_eps_inner_max_with_pairing(const ModelParams& p, double eps, double theta, int dim,
                                    std::span<const double> pairing) {
  check_theta(theta);
  const double eta = p.eta_of(eps);
  SpectralProblem prob;
  prob.n = dim;
  for (int i = 0; i < dim; ++i) prob.lin[i] = pairing[i];
  inverse_quad_coeffs(dim, p.lambda_s - eta * p.lambda_w, p.mu_s - eta * p.mu_w, prob.Aq,
                      prob.Bq);
  prob.c = theta / (2.0 * eta);
  prob.g = {GKind::Type::Hencky, p.lambda_w, p.mu_w};
  return maximize_spectral(prob).value;
}

double w_bar_dual_with_pairing(const ModelParams& p, int dim, std::span<const double> pairing) {
  SpectralProblem prob;
  prob.n = dim;
  for (int i = 0; i < dim; ++i) prob.lin[i] = pairing[i];
  inverse_quad_coeffs(dim, p.lambda_s, p.mu_s, prob.Aq, prob.Bq);
  prob.g = {GKind::Type::Hencky, p.lambda_w, p.mu_w};
  return constrained_spectral_max(prob, 2.0 * p.alpha * p.kappa).value;
}

CharacterizationReport characterization_check(const ModelParams& p, int dim, int samples,
                                              unsigned long long seed) {
  p.validate();
  CharacterizationReport rep;
  rep.samples = samples;
  rep.dim = dim;
  rep.seed = seed;
  std::mt19937_64 rng(seed);
  for (int k = 0; k < samples; ++k) {
    const SymMat xi = random_symmat(rng, dim, 3.0);
    rep.max_excess_over_f =
        std::max(rep.max_excess_over_f, w_bar_dual(p, xi).value - f_strong(p, xi));

    const SymMat ab = random_rank_one(rng, dim, 2.0);
    const double bound = std::sqrt(2.0 * p.alpha * p.kappa * iso_quad(p.A_w(), ab));
    rep.max_excess_rank_one =
        std::max(rep.max_excess_rank_one, w_bar_dual(p, ab).value - bound);
    rep.max_recession_gap =
        std::max(rep.max_recession_gap, std::abs(w_bar_recession(p, ab) - bound));
  }
  return rep;
}

}  // namespace brittle
