#include "brittle/gammalab.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "brittle/envelopes.hpp"

namespace brittle {

AffineBC AffineBC::from_strain(const SymMat& xi) {
  if (xi.dim != 2) throw std::invalid_argument("AffineBC: strain datum must be 2x2");
  AffineBC bc;
  bc.M[0][0] = xi(0, 0);
  bc.M[0][1] = xi(0, 1);
  bc.M[1][0] = xi(0, 1);
  bc.M[1][1] = xi(1, 1);
  return bc;
}

SymMat AffineBC::strain() const {
  SymMat xi = SymMat::zero(2);
  xi.set(0, 0, M[0][0]);
  xi.set(1, 1, M[1][1]);
  xi.set(0, 1, 0.5 * (M[0][1] + M[1][0]));
  return xi;
}

GridState make_grid(int nx, int ny, double h, const AffineBC& bc) {
  if (nx < 2 || ny < 2) throw std::invalid_argument("make_grid: need at least 2x2 cells");
  if (!(h > 0.0)) throw std::invalid_argument("make_grid: cell size must be positive");
  GridState s;
  s.nx = nx;
  s.ny = ny;
  s.h = h;
  s.bc = bc;
  s.u.assign(2 * s.node_count(), 0.0);
  s.damage.assign(s.cell_count(), 0);
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      const double x = i * h, y = j * h;
      const int nid = j * (nx + 1) + i;
      s.u[2 * nid] = bc.M[0][0] * x + bc.M[0][1] * y + bc.c[0];
      s.u[2 * nid + 1] = bc.M[1][0] * x + bc.M[1][1] * y + bc.c[1];
    }
  return s;
}

IsoTensor damaged_tensor(const ModelParams& p, double eps, SolverModel model) {
  if (model == SolverModel::Hencky) {
    const double eta = p.eta_of(eps);
    return IsoTensor{eta * p.lambda_w, eta * p.mu_w};
  }
  return IsoTensor{p.lambda_w, eps * p.mu_w};
}

namespace {

constexpr double kGauss = 0.57735026918962576451;  // 1/sqrt(3)

// per-Gauss-point shape gradients on a square cell of size h
struct ElementTables {
  double dndx[4][4];  // [gp][node]
  double dndy[4][4];
  double w = 0.0;  // physical quadrature weight per gp

  explicit ElementTables(double h) {
    const double xi_a[4] = {-1.0, 1.0, 1.0, -1.0};
    const double eta_a[4] = {-1.0, -1.0, 1.0, 1.0};
    const double gp[4][2] = {{-kGauss, -kGauss}, {kGauss, -kGauss}, {kGauss, kGauss},
                             {-kGauss, kGauss}};
    for (int g = 0; g < 4; ++g)
      for (int a = 0; a < 4; ++a) {
        dndx[g][a] = 0.25 * xi_a[a] * (1.0 + eta_a[a] * gp[g][1]) * (2.0 / h);
        dndy[g][a] = 0.25 * eta_a[a] * (1.0 + xi_a[a] * gp[g][0]) * (2.0 / h);
      }
    w = 0.25 * h * h;
  }
};

inline void cell_nodes(const GridState& s, int ci, int cj, int nid[4]) {
  nid[0] = cj * (s.nx + 1) + ci;
  nid[1] = nid[0] + 1;
  nid[2] = nid[0] + s.nx + 2;
  nid[3] = nid[0] + s.nx + 1;
}

inline void gp_strain(const ElementTables& T, int g, const double ue[8], double& e11,
                      double& e22, double& e12) {
  e11 = e22 = e12 = 0.0;
  for (int a = 0; a < 4; ++a) {
    e11 += ue[2 * a] * T.dndx[g][a];
    e22 += ue[2 * a + 1] * T.dndy[g][a];
    e12 += 0.5 * (ue[2 * a] * T.dndy[g][a] + ue[2 * a + 1] * T.dndx[g][a]);
  }
}

bool boundary_node(const GridState& s, int nid) {
  const int i = nid % (s.nx + 1), j = nid / (s.nx + 1);
  return i == 0 || j == 0 || i == s.nx || j == s.ny;
}

void pin_boundary(GridState& s) {
  for (int j = 0; j <= s.ny; ++j)
    for (int i = 0; i <= s.nx; ++i) {
      if (i != 0 && j != 0 && i != s.nx && j != s.ny) continue;
      const double x = i * s.h, y = j * s.h;
      const int nid = j * (s.nx + 1) + i;
      s.u[2 * nid] = s.bc.M[0][0] * x + s.bc.M[0][1] * y + s.bc.c[0];
      s.u[2 * nid + 1] = s.bc.M[1][0] * x + s.bc.M[1][1] * y + s.bc.c[1];
    }
}

struct CellCoeffs {
  std::vector<double> lambda, mu;
};

CellCoeffs cell_coeffs(const GridState& s, const ModelParams& p, double eps, SolverModel model) {
  const IsoTensor dam = damaged_tensor(p, eps, model);
  CellCoeffs c;
  c.lambda.resize(s.cell_count());
  c.mu.resize(s.cell_count());
  for (int k = 0; k < s.cell_count(); ++k) {
    c.lambda[k] = s.damage[k] ? dam.lambda : p.lambda_s;
    c.mu[k] = s.damage[k] ? dam.mu : p.mu_s;
  }
  return c;
}

void apply_stiffness(const GridState& s, const ElementTables& T, const CellCoeffs& c,
                     const std::vector<double>& v, std::vector<double>& out) {
  std::fill(out.begin(), out.end(), 0.0);
  int nid[4];
  double ue[8];
  for (int cj = 0; cj < s.ny; ++cj)
    for (int ci = 0; ci < s.nx; ++ci) {
      cell_nodes(s, ci, cj, nid);
      for (int a = 0; a < 4; ++a) {
        ue[2 * a] = v[2 * nid[a]];
        ue[2 * a + 1] = v[2 * nid[a] + 1];
      }
      const int k = s.cell_index(ci, cj);
      const double lam = c.lambda[k], mu = c.mu[k];
      double fe[8] = {0};
      for (int g = 0; g < 4; ++g) {
        double e11, e22, e12;
        gp_strain(T, g, ue, e11, e22, e12);
        const double tr = e11 + e22;
        const double s11 = lam * tr + 2.0 * mu * e11;
        const double s22 = lam * tr + 2.0 * mu * e22;
        const double s12 = 2.0 * mu * e12;
        for (int a = 0; a < 4; ++a) {
          fe[2 * a] += T.w * (s11 * T.dndx[g][a] + s12 * T.dndy[g][a]);
          fe[2 * a + 1] += T.w * (s12 * T.dndx[g][a] + s22 * T.dndy[g][a]);
        }
      }
      for (int a = 0; a < 4; ++a) {
        out[2 * nid[a]] += fe[2 * a];
        out[2 * nid[a] + 1] += fe[2 * a + 1];
      }
    }
}

double elastic_energy(const GridState& s, const ElementTables& T, const CellCoeffs& c) {
  double total = 0.0;
  int nid[4];
  double ue[8];
  for (int cj = 0; cj < s.ny; ++cj)
    for (int ci = 0; ci < s.nx; ++ci) {
      cell_nodes(s, ci, cj, nid);
      for (int a = 0; a < 4; ++a) {
        ue[2 * a] = s.u[2 * nid[a]];
        ue[2 * a + 1] = s.u[2 * nid[a] + 1];
      }
      const int k = s.cell_index(ci, cj);
      const IsoTensor C{c.lambda[k], c.mu[k]};
      for (int g = 0; g < 4; ++g) {
        SymMat e = SymMat::zero(2);
        gp_strain(T, g, ue, e.v[0], e.v[1], e.v[2]);
        total += 0.5 * T.w * iso_quad(C, e);
      }
    }
  return total;
}

}  // namespace

double grid_energy(const GridState& s, const ModelParams& p, double eps, SolverModel model) {
  const ElementTables T(s.h);
  const CellCoeffs c = cell_coeffs(s, p, eps, model);
  double damaged_cells = 0.0;
  for (auto d : s.damage) damaged_cells += d;
  return elastic_energy(s, T, c) + p.kappa / eps * damaged_cells * s.cell_area();
}

SolveInfo elastic_solve(GridState& s, const ModelParams& p, double eps, SolverModel model,
                        double tol, int max_iters, std::vector<double>* energy_trace) {
  const ElementTables T(s.h);
  const CellCoeffs coeffs = cell_coeffs(s, p, eps, model);
  pin_boundary(s);

  const int ndof = 2 * s.node_count();
  std::vector<char> fixed(ndof, 0);
  for (int nid = 0; nid < s.node_count(); ++nid)
    if (boundary_node(s, nid)) fixed[2 * nid] = fixed[2 * nid + 1] = 1;

  // Jacobi preconditioner: element-wise diagonal of K
  std::vector<double> diag(ndof, 0.0);
  {
    int nid[4];
    for (int cj = 0; cj < s.ny; ++cj)
      for (int ci = 0; ci < s.nx; ++ci) {
        cell_nodes(s, ci, cj, nid);
        const int k = s.cell_index(ci, cj);
        const double lam = coeffs.lambda[k], mu = coeffs.mu[k];
        for (int g = 0; g < 4; ++g)
          for (int a = 0; a < 4; ++a) {
            const double bx = T.dndx[g][a], by = T.dndy[g][a];
            diag[2 * nid[a]] += T.w * ((lam + 2.0 * mu) * bx * bx + mu * by * by);
            diag[2 * nid[a] + 1] += T.w * ((lam + 2.0 * mu) * by * by + mu * bx * bx);
          }
      }
    for (double& d : diag)
      if (!(d > 0.0)) d = 1.0;
  }

  std::vector<double> r(ndof), z(ndof), dir(ndof), Ad(ndof);
  apply_stiffness(s, T, coeffs, s.u, r);
  for (int i = 0; i < ndof; ++i) r[i] = fixed[i] ? 0.0 : -r[i];

  auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double t = 0.0;
    for (int i = 0; i < ndof; ++i) t += a[i] * b[i];
    return t;
  };

  SolveInfo info;
  const double r0 = std::sqrt(dot(r, r));
  if (r0 == 0.0) {
    info.converged = true;
    return info;
  }
  for (int i = 0; i < ndof; ++i) z[i] = r[i] / diag[i];
  dir = z;
  double rz = dot(r, z);
  if (max_iters <= 0) max_iters = std::max(1000, 15 * ndof);

  for (int it = 0; it < max_iters; ++it) {
    apply_stiffness(s, T, coeffs, dir, Ad);
    for (int i = 0; i < ndof; ++i)
      if (fixed[i]) Ad[i] = 0.0;
    const double dAd = dot(dir, Ad);
    if (!(dAd > 0.0)) break;  // numerically singular direction
    const double alpha = rz / dAd;
    for (int i = 0; i < ndof; ++i) {
      s.u[i] += alpha * dir[i];
      r[i] -= alpha * Ad[i];
    }
    info.iters = it + 1;
    if (energy_trace) energy_trace->push_back(elastic_energy(s, T, coeffs));
    const double rn = std::sqrt(dot(r, r));
    info.rel_residual = rn / r0;
    if (rn <= tol * r0) {
      info.converged = true;
      return info;
    }
    for (int i = 0; i < ndof; ++i) z[i] = r[i] / diag[i];
    const double rz_new = dot(r, z);
    dir.swap(z);
    for (int i = 0; i < ndof; ++i) dir[i] += (rz_new / rz) * z[i];  // z holds old dir
    rz = rz_new;
  }
  return info;
}

int damage_update(GridState& s, const ModelParams& p, double eps, SolverModel model) {
  const ElementTables T(s.h);
  const IsoTensor dam = damaged_tensor(p, eps, model);
  const IsoTensor diff{p.lambda_s - dam.lambda, p.mu_s - dam.mu};
  const double threshold = 2.0 * p.kappa / eps;
  int changed = 0;
  int nid[4];
  double ue[8];
  for (int cj = 0; cj < s.ny; ++cj)
    for (int ci = 0; ci < s.nx; ++ci) {
      cell_nodes(s, ci, cj, nid);
      for (int a = 0; a < 4; ++a) {
        ue[2 * a] = s.u[2 * nid[a]];
        ue[2 * a + 1] = s.u[2 * nid[a] + 1];
      }
      double avg = 0.0;  // quadrature average of (A_s - A_dam) e : e
      for (int g = 0; g < 4; ++g) {
        SymMat e = SymMat::zero(2);
        gp_strain(T, g, ue, e.v[0], e.v[1], e.v[2]);
        avg += 0.25 * iso_quad(diff, e);
      }
      const std::uint8_t chi = avg >= threshold ? 1 : 0;
      const int k = s.cell_index(ci, cj);
      if (chi != s.damage[k]) ++changed;
      s.damage[k] = chi;
    }
  return changed;
}

AmResult alternate_minimize(GridState& s, const ModelParams& p, double eps, SolverModel model,
                            double tol, int max_iters) {
  AmResult out;
  double prev = grid_energy(s, p, eps, model);
  for (int it = 0; it < max_iters; ++it) {
    const SolveInfo si = elastic_solve(s, p, eps, model);
    if (!si.converged) out.cap_hit = true;
    const int changed = damage_update(s, p, eps, model);
    const double e = grid_energy(s, p, eps, model);
    out.energy_trace.push_back(e);
    out.iters = it + 1;
    const bool settled = (changed == 0) || (prev - e <= tol * std::max(1.0, std::abs(prev)));
    prev = e;
    if (settled) {
      out.final_energy = e;
      return out;
    }
  }
  out.cap_hit = true;
  out.final_energy = prev;
  return out;
}

void seed_laminate_damage(GridState& s, const ModelParams& p, double eps, SolverModel model) {
  const IsoTensor dam = damaged_tensor(p, eps, model);
  const SymMat xi = s.bc.strain();
  // Young-optimal total slip fraction per band family
  SymMat vert = SymMat::zero(2);
  vert.set(0, 0, xi(0, 0));
  SymMat horiz = SymMat::zero(2);
  horiz.set(1, 1, xi(1, 1));
  horiz.set(0, 1, xi(0, 1));
  const double sigma_v = std::sqrt(eps * iso_quad(dam, vert) / (2.0 * p.kappa));
  const double sigma_h = std::sqrt(eps * iso_quad(dam, horiz) / (2.0 * p.kappa));

  auto band_cells = [](double sigma, double h, int n) {
    const int k = static_cast<int>(std::lround(sigma / h));
    return std::clamp(k, 0, n / 2);
  };
  const int kv = band_cells(sigma_v, s.h, s.nx);
  const int kh = band_cells(sigma_h, s.h, s.ny);
  std::fill(s.damage.begin(), s.damage.end(), 0);
  for (int m = 0; m < kv; ++m) {
    const int ci = static_cast<int>((m + 0.5) / kv * s.nx);
    for (int cj = 0; cj < s.ny; ++cj) s.damage[s.cell_index(ci, cj)] = 1;
  }
  for (int m = 0; m < kh; ++m) {
    const int cj = static_cast<int>((m + 0.5) / kh * s.ny);
    for (int ci = 0; ci < s.nx; ++ci) s.damage[s.cell_index(ci, cj)] = 1;
  }
}

namespace {

void apply_init(GridState& s, const ModelParams& p, double eps, SolverModel model,
                InitKind init, unsigned long long seed) {
  switch (init) {
    case InitKind::Undamaged:
      std::fill(s.damage.begin(), s.damage.end(), 0);
      break;
    case InitKind::Random5: {
      std::mt19937_64 rng(seed);
      std::bernoulli_distribution coin(0.05);
      for (auto& d : s.damage) d = coin(rng) ? 1 : 0;
      break;
    }
    case InitKind::Laminate:
      seed_laminate_damage(s, p, eps, model);
      break;
  }
}

RegimeReport run_sweep(const ModelParams& p, const SymMat& xi_bc,
                       const std::vector<double>& eps_list, const SweepConfig& cfg,
                       SolverModel model, double limit_reference, bool fit_scaling) {
  RegimeReport rep;
  rep.limit_reference = limit_reference;
  rep.nx = cfg.nx;
  rep.ny = cfg.ny;
  const AffineBC bc = AffineBC::from_strain(xi_bc);
  for (double eps : eps_list) {
    GridState s = make_grid(cfg.nx, cfg.ny, 1.0 / cfg.nx, bc);
    apply_init(s, p, eps, model, cfg.init, cfg.seed);
    const AmResult am = alternate_minimize(s, p, eps, model, cfg.am_tol, cfg.am_max_iters);
    RegimeRun run;
    run.eps = eps;
    run.eta = (model == SolverModel::Hencky) ? p.eta_of(eps) : eps;
    run.energy = am.final_energy;
    double cells = 0.0;
    for (auto d : s.damage) cells += d;
    run.damaged_volume = cells * s.cell_area();
    run.iters = am.iters;
    run.cap_hit = am.cap_hit;
    rep.runs.push_back(run);
    rep.final_damage = s.damage;
  }
  if (fit_scaling && rep.runs.size() >= 2) {
    // least-squares slope of log E against log sqrt(eta/eps)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (const auto& r : rep.runs) {
      if (!(r.energy > 0.0)) continue;
      const double x = 0.5 * std::log(r.eta / r.eps);
      const double y = std::log(r.energy);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++m;
    }
    if (m >= 2 && sxx * m - sx * sx > 1e-30) {
      rep.scaling_exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
      rep.has_scaling_fit = true;
    }
  }
  return rep;
}

}  // namespace

RegimeReport regime_sweep(const ModelParams& p, Regime regime, const SymMat& xi_bc,
                          const std::vector<double>& eps_list, const SweepConfig& cfg) {
  p.validate();
  if (eps_list.empty()) throw std::invalid_argument("regime_sweep: eps_list is empty");
  switch (regime) {
    case Regime::Trivial:
      if (p.eta.kind != EtaSchedule::Kind::Power || !(p.eta.exponent > 1.0))
        throw std::invalid_argument("regime_sweep: trivial regime needs eta = eps^p with p > 1");
      break;
    case Regime::Hencky:
      if (p.eta.kind != EtaSchedule::Kind::LinearAlpha)
        throw std::invalid_argument("regime_sweep: Hencky regime needs eta = alpha * eps");
      break;
    case Regime::Elastic:
      if (p.eta.kind != EtaSchedule::Kind::Power ||
          !(p.eta.exponent > 0.0 && p.eta.exponent < 1.0))
        throw std::invalid_argument(
            "regime_sweep: elastic regime needs eta = eps^q with 0 < q < 1");
      break;
  }
  const double area = double(cfg.ny) / double(cfg.nx);  // width is normalized to 1
  double ref = 0.0;
  if (regime == Regime::Hencky) ref = area * w_bar_dual(p, xi_bc).value;
  if (regime == Regime::Elastic) ref = area * f_strong(p, xi_bc);
  return run_sweep(p, xi_bc, eps_list, cfg, SolverModel::Hencky, ref,
                   regime == Regime::Trivial);
}

RegimeReport tresca_sweep(const ModelParams& p, const SymMat& xi_bc,
                          const std::vector<double>& eps_list, const SweepConfig& cfg) {
  p.validate_tresca();
  if (eps_list.empty()) throw std::invalid_argument("tresca_sweep: eps_list is empty");
  const double ref = double(cfg.ny) / double(cfg.nx) * tresca_limit_bulk(p, xi_bc);
  return run_sweep(p, xi_bc, eps_list, cfg, SolverModel::Tresca, ref, false);
}

}  // namespace brittle
