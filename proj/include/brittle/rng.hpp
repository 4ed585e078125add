#pragma once

// Seeded sampling helpers shared by oracles and tests. Everything is driven
// by an explicit std::mt19937_64 so reports are reproducible from the seed.

#include <array>
#include <cmath>
#include <random>

#include "brittle/symcalc.hpp"

namespace brittle {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline SymMat random_symmat(std::mt19937_64& rng, int dim, double scale = 2.0) {
  SymMat m = SymMat::zero(dim);
  for (int k = 0; k < m.packed_size(); ++k) m.v[k] = uniform(rng, -scale, scale);
  return m;
}

inline std::array<double, 3> random_vec(std::mt19937_64& rng, int dim, double scale = 2.0) {
  std::array<double, 3> a{};
  for (int i = 0; i < dim; ++i) a[i] = uniform(rng, -scale, scale);
  return a;
}

inline std::array<double, 3> random_unit_vec(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::array<double, 3> a{};
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (int i = 0; i < dim; ++i) {
      a[i] = gauss(rng);
      n2 += a[i] * a[i];
    }
  } while (n2 < 1e-12);
  const double n = std::sqrt(n2);
  for (int i = 0; i < dim; ++i) a[i] /= n;
  return a;
}

// Haar-ish random rotation: Gram-Schmidt on Gaussian columns (2-D: random
// angle). Rows of the result are the rotated basis vectors.
inline std::array<std::array<double, 3>, 3> random_rotation(std::mt19937_64& rng, int dim) {
  std::array<std::array<double, 3>, 3> R{};
  if (dim == 2) {
    const double th = uniform(rng, 0.0, 2.0 * M_PI);
    R[0] = {std::cos(th), -std::sin(th), 0.0};
    R[1] = {std::sin(th), std::cos(th), 0.0};
    R[2] = {0.0, 0.0, 1.0};
    return R;
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int k = 0; k < 3; ++k) {
    for (;;) {
      for (int i = 0; i < 3; ++i) R[k][i] = gauss(rng);
      for (int j = 0; j < k; ++j) {
        double p = 0.0;
        for (int i = 0; i < 3; ++i) p += R[k][i] * R[j][i];
        for (int i = 0; i < 3; ++i) R[k][i] -= p * R[j][i];
      }
      const double n = std::sqrt(R[k][0] * R[k][0] + R[k][1] * R[k][1] + R[k][2] * R[k][2]);
      if (n > 1e-6) {
        for (int i = 0; i < 3; ++i) R[k][i] /= n;
        break;
      }
    }
  }
  return R;
}

// R xi R^T for a rotation given by rows r_k.
inline SymMat rotate(const SymMat& xi, const std::array<std::array<double, 3>, 3>& R) {
  const int n = xi.dim;
  SymMat out = SymMat::zero(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double s = 0.0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) s += R[i][a] * xi(a, b) * R[j][b];
      out.set(i, j, s);
    }
  return out;
}

inline SymMat random_rank_one(std::mt19937_64& rng, int dim, double scale = 2.0) {
  const auto a = random_vec(rng, dim, scale);
  const auto b = random_vec(rng, dim, scale);
  return sym_outer(std::span<const double>(a.data(), dim),
                   std::span<const double>(b.data(), dim));
}

}  // namespace brittle
