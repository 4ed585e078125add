#pragma once

// Exact spectral and tensor algebra on 2x2 and 3x3 symmetric matrices and
// isotropic fourth-order (Hooke) tensors. Everything downstream goes through
// these types; no general n x n spectral algebra lives here.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace brittle {

// Packed symmetric matrix. Storage is the upper triangle:
//   n=2: (x11, x22, x12)
//   n=3: (x11, x22, x33, x12, x13, x23)
//
// The Frobenius product xi:eta = tr(xi*eta) doubles the off-diagonal packed
// entries. That doubling is applied in ddot() below and *only* there; every
// module computes xi:eta through ddot, which keeps the classic Voigt
// factor-2 mistake out of the codebase.
struct SymMat {
  int dim = 2;
  std::array<double, 6> v{};  // packed entries; unused tail is zero

  static SymMat zero(int n);
  static SymMat identity(int n);
  static SymMat diag2(double a, double b);
  static SymMat diag3(double a, double b, double c);

  int packed_size() const { return dim == 2 ? 3 : 6; }

  double operator()(int i, int j) const;
  void set(int i, int j, double value);

  double trace() const;
  bool finite() const;

  SymMat& operator+=(const SymMat& o);
  SymMat& operator-=(const SymMat& o);
  SymMat& operator*=(double s);
};

SymMat operator+(SymMat a, const SymMat& b);
SymMat operator-(SymMat a, const SymMat& b);
SymMat operator*(double s, SymMat a);

// Frobenius scalar product xi:eta (doubles packed off-diagonals).
double ddot(const SymMat& a, const SymMat& b);
double norm(const SymMat& a);

// det for n=2, 3x3 determinant for n=3.
double det(const SymMat& a);

// Eigen-decomposition with ascending eigenvalues and an orthonormal frame.
struct Spectrum {
  int dim = 2;
  std::array<double, 3> w{};                 // ascending; w[2] unused for n=2
  std::array<std::array<double, 3>, 3> v{};  // v[k] = eigenvector of w[k]

  SymMat reconstruct() const;
};

// Closed-form eigensolver: quadratic formula for n=2; trigonometric method
// for n=3 with a Jacobi fallback when the cubic discriminant is within 1e-13
// (relative) of zero or the trigonometric frame misses the reconstruction
// tolerance. Degenerate frames are completed by Gram-Schmidt against the
// already-found eigenvectors, so the frame is orthonormal to 1e-12 even for
// repeated eigenvalues.
Spectrum eigs(const SymMat& xi);

// Ascending eigenvalues only (no frame).
std::array<double, 3> eigenvalues(const SymMat& xi);

// Symmetric tensor product a (.) b = (a b^T + b a^T)/2, n = a.size().
SymMat sym_outer(std::span<const double> a, std::span<const double> b);

// Cofactor matrix of a 3x3 symmetric matrix (direct adjugate arithmetic;
// shares xi's eigenframe with eigenvalues xi2*xi3, xi1*xi3, xi1*xi2).
// Rejects dim=2 -- use det there.
SymMat cofactor(const SymMat& xi);

// xi = xi_D + (trace/n) Id with tr(xi_D) = 0.
struct DevSplit {
  double trace = 0.0;
  SymMat deviator;
};
DevSplit dev_split(const SymMat& xi);

// Isotropic fourth-order tensor C xi = lambda (tr xi) Id + 2 mu xi.
// Material tensors require lambda, mu > 0 (checked()); coefficient
// differences such as A_s - eta A_w may carry lambda <= 0 and are built with
// the plain constructor, with invertibility checked where it matters.
struct IsoTensor {
  double lambda = 0.0;
  double mu = 0.0;

  static IsoTensor checked(double lambda, double mu);  // requires > 0
};

SymMat apply_iso(const IsoTensor& C, const SymMat& xi);
// C xi : xi = lambda (tr xi)^2 + 2 mu xi:xi
double iso_quad(const IsoTensor& C, const SymMat& xi);

// Solves C sigma = tau:  sigma = tr(tau)/(n(n lambda + 2 mu)) Id + tau_D/(2 mu).
// Throws std::domain_error when the effective moduli degenerate
// (n lambda + 2 mu <= 0 or mu <= 0).
SymMat iso_inverse_apply(const IsoTensor& C, const SymMat& tau);

// Sigma_k t_k v_k (x) v_k for a frame and coordinates (inverse of "read xi in
// its eigenframe"); used by the eigenframe-restricted optimizers.
SymMat from_eigen_coords(const Spectrum& frame, std::span<const double> t);

// Cyclic Jacobi eigensolver for small dense symmetric matrices (n <= 8,
// row-major). Backs the n=3 fallback and serves as the independent spectral
// oracle for the closed forms; ascending order, rows of `vecs` are
// eigenvectors.
void jacobi_eig(std::span<const double> a, int n, std::span<double> eigenvalues,
                std::span<double> vecs);

}  // namespace brittle
