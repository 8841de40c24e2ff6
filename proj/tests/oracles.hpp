#pragma once

// Independent reference computations for the tests. Nothing here goes through
// the greedy trainer or the library's kernel assembly.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

#include "vkoga_ie/kernel.hpp"

namespace oracle {

using vkoga_ie::Matrix;
using vkoga_ie::PointSet;
using vkoga_ie::ValueSet;
using vkoga_ie::Vector;

inline PointSet random_points(std::mt19937_64& rng, Eigen::Index n, Eigen::Index p, double lo = -1.0,
                              double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  PointSet x(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < p; ++k) x(i, k) = dist(rng);
  return x;
}

inline double gauss(const PointSet& a, Eigen::Index i, const PointSet& b, Eigen::Index j, double eps) {
  double sq = 0.0;
  for (Eigen::Index k = 0; k < a.cols(); ++k) sq += (a(i, k) - b(j, k)) * (a(i, k) - b(j, k));
  return std::exp(-eps * eps * sq);
}

inline Matrix gram(const PointSet& x, double eps) {
  Matrix a(x.rows(), x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.rows(); ++j) a(i, j) = gauss(x, i, x, j, eps);
  return a;
}

// Coefficients of the full interpolant from a dense LU solve of A alpha = b.
inline Matrix dense_coefficients(const PointSet& x, const ValueSet& y, double eps) {
  return gram(x, eps).fullPivLu().solve(Matrix(y));
}

inline ValueSet dense_eval(const PointSet& centers, const Matrix& alpha, double eps, const PointSet& at) {
  ValueSet out = ValueSet::Zero(at.rows(), alpha.cols());
  for (Eigen::Index i = 0; i < at.rows(); ++i)
    for (Eigen::Index j = 0; j < centers.rows(); ++j) out.row(i) += gauss(at, i, centers, j, eps) * alpha.row(j);
  return out;
}

inline double min_pairwise_distance(const PointSet& x) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = i + 1; j < x.rows(); ++j) best = std::min(best, (x.row(i) - x.row(j)).norm());
  return best;
}

// max |a - b| / max |b|
inline double relative_max_error(const ValueSet& a, const ValueSet& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(b.cwiseAbs().maxCoeff(), 1e-300);
}

// Scalar Newton for g(u) = u^2 - 4, hand-rolled.
inline int scalar_newton_iterations(double u, double tol, double* root) {
  int it = 0;
  while (std::abs(u * u - 4.0) > tol && it < 100) {
    u -= (u * u - 4.0) / (2.0 * u);
    ++it;
  }
  *root = u;
  return it;
}

}  // namespace oracle
