#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "vkoga_ie/kernel.hpp"

using namespace vkoga_ie;

namespace {

std::span<const double> sp(const std::vector<double>& v) { return {v.data(), v.size()}; }

}  // namespace

TEST_CASE("shape parameter rejects non-positive values") {
  CHECK_THROWS_AS(ShapeParameter(0.0), InputError);
  CHECK_THROWS_AS(ShapeParameter(-1.0), InputError);
  CHECK_THROWS_AS(ShapeParameter(std::nan("")), InputError);
  CHECK(ShapeParameter(0.5).value() == 0.5);
}

TEST_CASE("gaussian kernel values") {
  const std::vector<double> a{0.3, -1.2};
  CHECK(gaussian_eval(sp(a), sp(a), ShapeParameter(1.0)) == 1.0);
  CHECK(gaussian_eval(sp({0.0}), sp({1.0}), ShapeParameter(1.0)) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(gaussian_eval(sp({0.0, 0.0}), sp({1.0, 1.0}), ShapeParameter(0.5)) ==
        doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
  CHECK_THROWS_AS(gaussian_eval(sp({0.0}), sp({0.0, 1.0}), ShapeParameter(1.0)), InputError);
}

TEST_CASE("gaussian kernel is symmetric and bounded") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(4), y(4);
    for (auto& v : x) v = dist(rng);
    for (auto& v : y) v = dist(rng);
    const ShapeParameter eps(0.1 + 0.01 * trial);
    const double kxy = gaussian_eval(sp(x), sp(y), eps);
    CHECK(kxy == gaussian_eval(sp(y), sp(x), eps));
    CHECK(kxy > 0.0);
    CHECK(kxy < 1.0);
  }
}

TEST_CASE("kernel matrix small cases") {
  PointSet one(1, 3);
  one << 1.0, 2.0, 3.0;
  CHECK(kernel_matrix(one, ShapeParameter(2.0))(0, 0) == 1.0);

  PointSet two(2, 1);
  two << 0.0, 1.0;
  const Matrix a = kernel_matrix(two, ShapeParameter(1.0));
  CHECK(a(0, 0) == 1.0);
  CHECK(a(1, 1) == 1.0);
  CHECK(a(0, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(a(0, 1) == a(1, 0));
}

TEST_CASE("kernel matrix rejects duplicate points") {
  PointSet x(3, 2);
  x << 0.0, 1.0, 0.5, 0.5, 0.0, 1.0;
  CHECK_THROWS_AS(kernel_matrix(x, ShapeParameter(1.0)), DegenerateInputError);
}

TEST_CASE("kernel matrix is positive definite on random sets") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 2 + trial % 19;
    const PointSet x = oracle::random_points(rng, n, 1 + trial % 4);
    const double eps = 1.0 / oracle::min_pairwise_distance(x);
    const Matrix a = kernel_matrix(x, ShapeParameter(eps));
    CHECK((a - a.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a - oracle::gram(x, eps)).cwiseAbs().maxCoeff() < 1e-15);
    Eigen::LLT<Matrix> llt(a);
    REQUIRE(llt.info() == Eigen::Success);
    CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(a).eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("expansion evaluation") {
  SUBCASE("single center reproduces its coefficient") {
    PointSet c(1, 2);
    c << 0.4, -0.1;
    ValueSet v(1, 3);
    v << 1.0, 2.0, -3.0;
    KernelExpansion m(ShapeParameter(1.3), c, v);
    const Vector out = m.evaluate(row_span(c, 0));
    CHECK(out(0) == 1.0);
    CHECK(out(1) == 2.0);
    CHECK(out(2) == -3.0);
  }
  SUBCASE("empty expansion is zero") {
    KernelExpansion m(ShapeParameter(1.0), 2, 4);
    CHECK(m.size() == 0);
    CHECK(m.evaluate(Vector{{0.5, 0.5}}) == Vector::Zero(4));
  }
  SUBCASE("two centers interpolate a dense 2x2 solve") {
    PointSet c(2, 1);
    c << 0.0, 0.7;
    ValueSet targets(2, 2);
    targets << 1.0, -1.0, 0.25, 3.0;
    const Matrix alpha = oracle::dense_coefficients(c, targets, 1.0);
    KernelExpansion m(ShapeParameter(1.0), c, ValueSet(alpha));
    for (Eigen::Index i = 0; i < 2; ++i) {
      const Vector out = expansion_eval(m, row_span(c, i));
      CHECK((out - targets.row(i).transpose()).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  SUBCASE("dimension mismatch") {
    KernelExpansion m(ShapeParameter(1.0), 2, 1);
    CHECK_THROWS_AS(m.evaluate(Vector{{1.0}}), InputError);
  }
  SUBCASE("inconsistent shapes and duplicate centers") {
    PointSet c(2, 1);
    c << 0.0, 0.0;
    CHECK_THROWS_AS(KernelExpansion(ShapeParameter(1.0), c, ValueSet::Zero(2, 1)), DegenerateInputError);
    CHECK_THROWS_AS(KernelExpansion(ShapeParameter(1.0), PointSet::Zero(1, 1), ValueSet::Zero(2, 1)), InputError);
  }
}

TEST_CASE("dense interpolant reproduces data") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const PointSet x = oracle::random_points(rng, 8, 2);
    const ValueSet y = oracle::random_points(rng, 8, 2);
    const double eps = 1.0 / oracle::min_pairwise_distance(x);
    KernelExpansion m(ShapeParameter(eps), x, ValueSet(oracle::dense_coefficients(x, y, eps)));
    const ValueSet back = m.evaluate_many(x);
    CHECK(oracle::relative_max_error(back, y) < 1e-10);
  }
}
