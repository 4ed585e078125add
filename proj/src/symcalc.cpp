#include "brittle/symcalc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace brittle {

namespace {

void check_dim(int n) {
  if (n != 2 && n != 3) throw std::invalid_argument("SymMat: dim must be 2 or 3");
}

// packed index of (i,j), i<=j
int pidx(int dim, int i, int j) {
  if (i > j) std::swap(i, j);
  if (dim == 2) return (i == j) ? i : 2;
  if (i == j) return i;
  if (i == 0) return j == 1 ? 3 : 4;
  return 5;  // (1,2)
}

}  // namespace

SymMat SymMat::zero(int n) {
  check_dim(n);
  SymMat m;
  m.dim = n;
  return m;
}

SymMat SymMat::identity(int n) {
  SymMat m = zero(n);
  for (int i = 0; i < n; ++i) m.v[i] = 1.0;
  return m;
}

SymMat SymMat::diag2(double a, double b) {
  SymMat m = zero(2);
  m.v[0] = a;
  m.v[1] = b;
  return m;
}

SymMat SymMat::diag3(double a, double b, double c) {
  SymMat m = zero(3);
  m.v[0] = a;
  m.v[1] = b;
  m.v[2] = c;
  return m;
}

double SymMat::operator()(int i, int j) const { return v[pidx(dim, i, j)]; }

void SymMat::set(int i, int j, double value) { v[pidx(dim, i, j)] = value; }

double SymMat::trace() const {
  double t = 0.0;
  for (int i = 0; i < dim; ++i) t += v[i];
  return t;
}

bool SymMat::finite() const {
  for (int k = 0; k < packed_size(); ++k)
    if (!std::isfinite(v[k])) return false;
  return true;
}

SymMat& SymMat::operator+=(const SymMat& o) {
  for (int k = 0; k < packed_size(); ++k) v[k] += o.v[k];
  return *this;
}

SymMat& SymMat::operator-=(const SymMat& o) {
  for (int k = 0; k < packed_size(); ++k) v[k] -= o.v[k];
  return *this;
}

SymMat& SymMat::operator*=(double s) {
  for (int k = 0; k < packed_size(); ++k) v[k] *= s;
  return *this;
}

SymMat operator+(SymMat a, const SymMat& b) { return a += b; }
SymMat operator-(SymMat a, const SymMat& b) { return a -= b; }
SymMat operator*(double s, SymMat a) { return a *= s; }

double ddot(const SymMat& a, const SymMat& b) {
  double s = 0.0;
  for (int i = 0; i < a.dim; ++i) s += a.v[i] * b.v[i];
  double off = 0.0;
  for (int k = a.dim; k < a.packed_size(); ++k) off += a.v[k] * b.v[k];
  return s + 2.0 * off;
}

double norm(const SymMat& a) { return std::sqrt(ddot(a, a)); }

double det(const SymMat& a) {
  if (a.dim == 2) return a.v[0] * a.v[1] - a.v[2] * a.v[2];
  const double a11 = a.v[0], a22 = a.v[1], a33 = a.v[2];
  const double a12 = a.v[3], a13 = a.v[4], a23 = a.v[5];
  return a11 * (a22 * a33 - a23 * a23) - a12 * (a12 * a33 - a23 * a13) +
         a13 * (a12 * a23 - a22 * a13);
}

SymMat Spectrum::reconstruct() const {
  SymMat m = SymMat::zero(dim);
  for (int k = 0; k < dim; ++k)
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j) m.set(i, j, m(i, j) + w[k] * v[k][i] * v[k][j]);
  return m;
}

namespace {

double dot3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

std::array<double, 3> cross3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double norm3(const std::array<double, 3>& a) { return std::sqrt(dot3(a, a)); }

// Gram-Schmidt in ascending order; completes near-zero vectors from the
// coordinate axes so degenerate frames still come out orthonormal.
void orthonormalize(Spectrum& s) {
  for (int k = 0; k < s.dim; ++k) {
    for (int j = 0; j < k; ++j) {
      const double p = dot3(s.v[k], s.v[j]);
      for (int i = 0; i < 3; ++i) s.v[k][i] -= p * s.v[j][i];
    }
    double n = norm3(s.v[k]);
    if (n < 1e-7) {
      for (int axis = 0; axis < 3 && n < 1e-7; ++axis) {
        s.v[k] = {0.0, 0.0, 0.0};
        s.v[k][axis] = 1.0;
        for (int j = 0; j < k; ++j) {
          const double p = dot3(s.v[k], s.v[j]);
          for (int i = 0; i < 3; ++i) s.v[k][i] -= p * s.v[j][i];
        }
        n = norm3(s.v[k]);
      }
    }
    for (int i = 0; i < 3; ++i) s.v[k][i] /= n;
  }
}

Spectrum eigs2(const SymMat& xi) {
  const double a = xi.v[0], b = xi.v[1], c = xi.v[2];
  const double m = 0.5 * (a + b);
  const double r = std::hypot(0.5 * (a - b), c);
  Spectrum s;
  s.dim = 2;
  s.w = {m - r, m + r, 0.0};
  if (r <= 1e-300 || std::abs(c) == 0.0) {
    // already diagonal (stable order on ties)
    if (a <= b) {
      s.w = {a, b, 0.0};
      s.v[0] = {1.0, 0.0, 0.0};
      s.v[1] = {0.0, 1.0, 0.0};
    } else {
      s.w = {b, a, 0.0};
      s.v[0] = {0.0, 1.0, 0.0};
      s.v[1] = {1.0, 0.0, 0.0};
    }
    return s;
  }
  // eigenvector of the larger eigenvalue from the better-conditioned column
  const double l2 = s.w[1];
  std::array<double, 3> u1 = {c, l2 - a, 0.0};
  std::array<double, 3> u2 = {l2 - b, c, 0.0};
  std::array<double, 3> u = (norm3(u1) >= norm3(u2)) ? u1 : u2;
  const double n = norm3(u);
  s.v[1] = {u[0] / n, u[1] / n, 0.0};
  s.v[0] = {-s.v[1][1], s.v[1][0], 0.0};
  return s;
}

Spectrum jacobi3(const SymMat& xi) {
  std::array<double, 9> a = {xi(0, 0), xi(0, 1), xi(0, 2), xi(1, 0), xi(1, 1),
                             xi(1, 2), xi(2, 0), xi(2, 1), xi(2, 2)};
  std::array<double, 3> w;
  std::array<double, 9> vecs;
  jacobi_eig(std::span<const double>(a.data(), 9), 3, std::span<double>(w.data(), 3),
             std::span<double>(vecs.data(), 9));
  Spectrum s;
  s.dim = 3;
  s.w = w;
  for (int k = 0; k < 3; ++k) s.v[k] = {vecs[3 * k], vecs[3 * k + 1], vecs[3 * k + 2]};
  orthonormalize(s);
  return s;
}

Spectrum eigs3(const SymMat& xi) {
  const double q = xi.trace() / 3.0;
  const double p1 = xi.v[3] * xi.v[3] + xi.v[4] * xi.v[4] + xi.v[5] * xi.v[5];
  const double d0 = xi.v[0] - q, d1 = xi.v[1] - q, d2 = xi.v[2] - q;
  const double p2 = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * p1;
  Spectrum s;
  s.dim = 3;
  if (p2 <= 1e-300) {  // multiple of the identity
    s.w = {q, q, q};
    s.v[0] = {1, 0, 0};
    s.v[1] = {0, 1, 0};
    s.v[2] = {0, 0, 1};
    return s;
  }
  const double p = std::sqrt(p2 / 6.0);
  SymMat B = xi;
  for (int i = 0; i < 3; ++i) B.v[i] -= q;
  B *= 1.0 / p;
  const double r = std::clamp(det(B) / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double lmax = q + 2.0 * p * std::cos(phi);
  const double lmin = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
  const double lmid = 3.0 * q - lmax - lmin;
  s.w = {lmin, lmid, lmax};

  const double scale = std::max({std::abs(lmin), std::abs(lmid), std::abs(lmax), 1e-300});
  const double g = ((lmax - lmin) / scale) * ((lmax - lmid) / scale) * ((lmid - lmin) / scale);
  if (g * g < 1e-13) return jacobi3(xi);

  // eigenvectors of the extreme eigenvalues from row cross products of
  // (xi - lambda I); middle one closes the frame
  auto eigvec = [&](double lambda) -> std::array<double, 3> {
    std::array<std::array<double, 3>, 3> rows;
    for (int i = 0; i < 3; ++i) {
      rows[i] = {xi(i, 0), xi(i, 1), xi(i, 2)};
      rows[i][i] -= lambda;
    }
    std::array<double, 3> best = cross3(rows[0], rows[1]);
    double bn = norm3(best);
    for (auto [i, j] : {std::pair{0, 2}, std::pair{1, 2}}) {
      auto c = cross3(rows[i], rows[j]);
      const double cn = norm3(c);
      if (cn > bn) {
        best = c;
        bn = cn;
      }
    }
    if (bn < 1e-300) return {0.0, 0.0, 0.0};
    for (double& x : best) x /= bn;
    return best;
  };
  s.v[0] = eigvec(lmin);
  s.v[2] = eigvec(lmax);
  s.v[1] = cross3(s.v[2], s.v[0]);
  orthonormalize(s);

  const double res = norm(s.reconstruct() - xi);
  if (res > 1e-12 * (1.0 + norm(xi))) return jacobi3(xi);
  return s;
}

}  // namespace

Spectrum eigs(const SymMat& xi) {
  if (!xi.finite()) throw std::invalid_argument("eigs: non-finite input");
  return xi.dim == 2 ? eigs2(xi) : eigs3(xi);
}

std::array<double, 3> eigenvalues(const SymMat& xi) { return eigs(xi).w; }

SymMat sym_outer(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || (a.size() != 2 && a.size() != 3))
    throw std::invalid_argument("sym_outer: vectors must both have length 2 or 3");
  const int n = static_cast<int>(a.size());
  SymMat m = SymMat::zero(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) m.set(i, j, 0.5 * (a[i] * b[j] + a[j] * b[i]));
  return m;
}

SymMat cofactor(const SymMat& xi) {
  if (xi.dim != 3) throw std::invalid_argument("cofactor: dim must be 3 (use det for n=2)");
  const double a = xi.v[0], b = xi.v[1], c = xi.v[2];
  const double d = xi.v[3], e = xi.v[4], f = xi.v[5];
  SymMat m = SymMat::zero(3);
  m.v[0] = b * c - f * f;
  m.v[1] = a * c - e * e;
  m.v[2] = a * b - d * d;
  m.v[3] = e * f - d * c;  // cof_12
  m.v[4] = d * f - e * b;  // cof_13
  m.v[5] = d * e - a * f;  // cof_23
  return m;
}

DevSplit dev_split(const SymMat& xi) {
  DevSplit out;
  out.trace = xi.trace();
  out.deviator = xi;
  const double mean = out.trace / xi.dim;
  for (int i = 0; i < xi.dim; ++i) out.deviator.v[i] -= mean;
  return out;
}

IsoTensor IsoTensor::checked(double lambda, double mu) {
  if (!(lambda > 0.0) || !(mu > 0.0))
    throw std::invalid_argument("IsoTensor: Lame coefficients must be positive");
  return IsoTensor{lambda, mu};
}

SymMat apply_iso(const IsoTensor& C, const SymMat& xi) {
  SymMat out = xi;
  out *= 2.0 * C.mu;
  const double lt = C.lambda * xi.trace();
  for (int i = 0; i < xi.dim; ++i) out.v[i] += lt;
  return out;
}

double iso_quad(const IsoTensor& C, const SymMat& xi) {
  const double t = xi.trace();
  return C.lambda * t * t + 2.0 * C.mu * ddot(xi, xi);
}

SymMat iso_inverse_apply(const IsoTensor& C, const SymMat& tau) {
  const int n = tau.dim;
  const double bulk = n * C.lambda + 2.0 * C.mu;
  if (!(bulk > 0.0) || !(C.mu > 0.0))
    throw std::domain_error("iso_inverse_apply: degenerate effective moduli");
  const DevSplit split = dev_split(tau);
  SymMat out = split.deviator;
  out *= 1.0 / (2.0 * C.mu);
  const double sph = split.trace / (n * bulk);
  for (int i = 0; i < n; ++i) out.v[i] += sph;
  return out;
}

SymMat from_eigen_coords(const Spectrum& frame, std::span<const double> t) {
  if (static_cast<int>(t.size()) != frame.dim)
    throw std::invalid_argument("from_eigen_coords: coordinate count must match dim");
  SymMat m = SymMat::zero(frame.dim);
  for (int k = 0; k < frame.dim; ++k)
    for (int i = 0; i < frame.dim; ++i)
      for (int j = i; j < frame.dim; ++j)
        m.set(i, j, m(i, j) + t[k] * frame.v[k][i] * frame.v[k][j]);
  return m;
}

void jacobi_eig(std::span<const double> a, int n, std::span<double> w, std::span<double> vecs) {
  if (n < 1 || n > 8) throw std::invalid_argument("jacobi_eig: n must be in [1,8]");
  std::array<double, 64> m;
  std::copy(a.begin(), a.begin() + n * n, m.begin());
  std::array<double, 64> v{};
  for (int i = 0; i < n; ++i) v[i * n + i] = 1.0;

  auto off = [&]() {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) s += m[i * n + j] * m[i * n + j];
    return s;
  };
  double scale = 0.0;
  for (int i = 0; i < n * n; ++i) scale = std::max(scale, std::abs(m[i]));
  const double tol = std::max(scale, 1e-300) * 1e-15;

  for (int sweep = 0; sweep < 100 && off() > tol * tol; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = m[p * n + q];
        if (std::abs(apq) <= tol * 1e-2) continue;
        const double app = m[p * n + p], aqq = m[q * n + q];
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double mkp = m[k * n + p], mkq = m[k * n + q];
          m[k * n + p] = c * mkp - s * mkq;
          m[k * n + q] = s * mkp + c * mkq;
        }
        for (int k = 0; k < n; ++k) {
          const double mpk = m[p * n + k], mqk = m[q * n + k];
          m[p * n + k] = c * mpk - s * mqk;
          m[q * n + k] = s * mpk + c * mqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v[p * n + k], vkq = v[q * n + k];
          v[p * n + k] = c * vkp - s * vkq;
          v[q * n + k] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::array<int, 8> order;
  for (int i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.begin() + n,
                   [&](int i, int j) { return m[i * n + i] < m[j * n + j]; });
  for (int k = 0; k < n; ++k) {
    w[k] = m[order[k] * n + order[k]];
    for (int i = 0; i < n; ++i) vecs[k * n + i] = v[order[k] * n + i];
  }
}

}  // namespace brittle
