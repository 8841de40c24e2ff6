#include "vkoga_ie/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace vkoga_ie {

ShapeParameter::ShapeParameter(double epsilon) : epsilon_(epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InputError("shape parameter must be positive and finite, got " + std::to_string(epsilon));
  }
}

double GaussianKernel::operator()(std::span<const double> x, std::span<const double> y) const {
  if (x.size() != y.size()) {
    throw InputError("gaussian kernel: dimension mismatch " + std::to_string(x.size()) + " vs " +
                     std::to_string(y.size()));
  }
  double sq = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double diff = x[k] - y[k];
    sq += diff * diff;
  }
  const double eps = eps_.value();
  return std::exp(-eps * eps * sq);
}

Vector GaussianKernel::column(const PointSet& points, std::span<const double> y) const {
  if (static_cast<std::size_t>(points.cols()) != y.size()) {
    throw InputError("gaussian kernel: dimension mismatch " + std::to_string(points.cols()) + " vs " +
                     std::to_string(y.size()));
  }
  const Eigen::Map<const Eigen::RowVectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
  const double eps2 = eps_.value() * eps_.value();
  Vector sq = (points.rowwise() - yv).rowwise().squaredNorm();
  return (-eps2 * sq.array()).exp().matrix();
}

double gaussian_eval(std::span<const double> x, std::span<const double> y, ShapeParameter eps) {
  return GaussianKernel(eps)(x, y);
}

std::optional<std::pair<Eigen::Index, Eigen::Index>> find_duplicate_rows(const PointSet& points) {
  const Eigen::Index n = points.rows();
  const Eigen::Index p = points.cols();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  auto less = [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index k = 0; k < p; ++k) {
      if (points(a, k) < points(b, k)) return true;
      if (points(b, k) < points(a, k)) return false;
    }
    return a < b;
  };
  std::sort(order.begin(), order.end(), less);
  for (std::size_t i = 1; i < order.size(); ++i) {
    const Eigen::Index a = order[i - 1];
    const Eigen::Index b = order[i];
    if (points.row(a) == points.row(b)) return std::make_pair(std::min(a, b), std::max(a, b));
  }
  return std::nullopt;
}

KernelExpansion::KernelExpansion(ShapeParameter eps, Eigen::Index input_dim, Eigen::Index output_dim)
    : kernel_(eps), input_dim_(input_dim), output_dim_(output_dim), centers_(0, input_dim),
      coefficients_(0, output_dim) {
  if (input_dim <= 0 || output_dim <= 0) throw InputError("kernel expansion: dimensions must be positive");
}

KernelExpansion::KernelExpansion(ShapeParameter eps, PointSet centers, ValueSet coefficients)
    : kernel_(eps), input_dim_(centers.cols()), output_dim_(coefficients.cols()),
      centers_(std::move(centers)), coefficients_(std::move(coefficients)) {
  if (input_dim_ <= 0 || output_dim_ <= 0) throw InputError("kernel expansion: dimensions must be positive");
  if (centers_.rows() != coefficients_.rows()) {
    throw InputError("kernel expansion: " + std::to_string(centers_.rows()) + " centers but " +
                     std::to_string(coefficients_.rows()) + " coefficient vectors");
  }
  if (auto dup = find_duplicate_rows(centers_)) {
    throw DegenerateInputError("kernel expansion: centers " + std::to_string(dup->first) + " and " +
                               std::to_string(dup->second) + " coincide");
  }
}

Vector KernelExpansion::evaluate(std::span<const double> x) const {
  if (static_cast<Eigen::Index>(x.size()) != input_dim_) {
    throw InputError("kernel expansion: expected input of length " + std::to_string(input_dim_) + ", got " +
                     std::to_string(x.size()));
  }
  if (centers_.rows() == 0) return Vector::Zero(output_dim_);
  const Vector k = kernel_.column(centers_, x);
  return coefficients_.transpose() * k;
}

ValueSet KernelExpansion::evaluate_many(const PointSet& xs) const {
  ValueSet out(xs.rows(), output_dim_);
  for (Eigen::Index i = 0; i < xs.rows(); ++i) out.row(i) = evaluate(row_span(xs, i)).transpose();
  return out;
}

Vector expansion_eval(const KernelExpansion& model, std::span<const double> x) { return model.evaluate(x); }

}  // namespace vkoga_ie
