#pragma once

#include <Eigen/Dense>

#include <concepts>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include "vkoga_ie/errors.hpp"

namespace vkoga_ie {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// One point (or one value vector) per row, stored contiguously.
using PointSet = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ValueSet = PointSet;

inline std::span<const double> row_span(const PointSet& points, Eigen::Index i) {
  return {points.data() + i * points.cols(), static_cast<std::size_t>(points.cols())};
}

inline std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

// Gaussian shape parameter; strictly positive and finite.
class ShapeParameter {
 public:
  explicit ShapeParameter(double epsilon);
  double value() const noexcept { return epsilon_; }

  friend bool operator==(ShapeParameter, ShapeParameter) = default;

 private:
  double epsilon_;
};

// Symmetric strictly positive definite kernel usable by the assembly routines.
template <class K>
concept PositiveDefiniteKernel = requires(const K& k, std::span<const double> x, const PointSet& points) {
  { k(x, x) } -> std::convertible_to<double>;
  { k.column(points, x) } -> std::convertible_to<Vector>;
};

// K(x, y) = exp(-eps^2 |x - y|^2).
class GaussianKernel {
 public:
  explicit GaussianKernel(ShapeParameter eps) : eps_(eps) {}

  ShapeParameter shape() const noexcept { return eps_; }

  double operator()(std::span<const double> x, std::span<const double> y) const;

  // K(points_i, y) for every row of points.
  Vector column(const PointSet& points, std::span<const double> y) const;

 private:
  ShapeParameter eps_;
};

double gaussian_eval(std::span<const double> x, std::span<const double> y, ShapeParameter eps);

// First pair (i, j), i < j, of rows with exactly equal coordinates.
std::optional<std::pair<Eigen::Index, Eigen::Index>> find_duplicate_rows(const PointSet& points);

template <PositiveDefiniteKernel K>
Matrix kernel_matrix(const PointSet& points, const K& kernel) {
  if (auto dup = find_duplicate_rows(points)) {
    throw DegenerateInputError("kernel_matrix: points " + std::to_string(dup->first) + " and " +
                               std::to_string(dup->second) + " coincide");
  }
  const Eigen::Index n = points.rows();
  Matrix a(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    a.col(j) = kernel.column(points, row_span(points, j));
  }
  // enforce exact symmetry regardless of how column() rounds
  for (Eigen::Index j = 0; j < n; ++j) {
    a(j, j) = kernel(row_span(points, j), row_span(points, j));
    for (Eigen::Index i = j + 1; i < n; ++i) a(j, i) = a(i, j);
  }
  return a;
}

inline Matrix kernel_matrix(const PointSet& points, ShapeParameter eps) {
  return kernel_matrix(points, GaussianKernel(eps));
}

// s(x) = sum_j coefficients_j * K(x, centers_j)
class KernelExpansion {
 public:
  // Empty expansion; evaluates to zero.
  KernelExpansion(ShapeParameter eps, Eigen::Index input_dim, Eigen::Index output_dim);
  KernelExpansion(ShapeParameter eps, PointSet centers, ValueSet coefficients);

  Eigen::Index input_dim() const noexcept { return input_dim_; }
  Eigen::Index output_dim() const noexcept { return output_dim_; }
  Eigen::Index size() const noexcept { return centers_.rows(); }
  ShapeParameter shape() const noexcept { return kernel_.shape(); }
  const GaussianKernel& kernel() const noexcept { return kernel_; }
  const PointSet& centers() const noexcept { return centers_; }
  const ValueSet& coefficients() const noexcept { return coefficients_; }

  Vector evaluate(std::span<const double> x) const;
  Vector evaluate(const Vector& x) const { return evaluate(as_span(x)); }
  // One output row per input row.
  ValueSet evaluate_many(const PointSet& xs) const;

 private:
  GaussianKernel kernel_;
  Eigen::Index input_dim_;
  Eigen::Index output_dim_;
  PointSet centers_;
  ValueSet coefficients_;
};

Vector expansion_eval(const KernelExpansion& model, std::span<const double> x);

}  // namespace vkoga_ie
