#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "vkoga_ie/vkoga.hpp"

using namespace vkoga_ie;

namespace {

TrainingSet random_set(std::mt19937_64& rng, Eigen::Index n, Eigen::Index p, Eigen::Index q) {
  return {oracle::random_points(rng, n, p), oracle::random_points(rng, n, q, -2.0, 2.0)};
}

TrainConfig exact_config(double eps, SelectionRule rule, Eigen::Index n) {
  TrainConfig cfg;
  cfg.tolerance = 0.0;
  cfg.max_centers = n;
  cfg.rule = rule;
  cfg.epsilon = ShapeParameter(eps);
  return cfg;
}

void check_history(const TrainResult& r) {
  for (std::size_t k = 1; k < r.max_power_sq_history.size(); ++k) {
    CHECK(r.max_power_sq_history[k] <= r.max_power_sq_history[k - 1] + 1e-15);
  }
  CHECK(r.max_selected_power_sq <= 1e-12);
}

}  // namespace

TEST_CASE("selection rule names") {
  CHECK(parse_selection_rule("f") == SelectionRule::FGreedy);
  CHECK(parse_selection_rule("p") == SelectionRule::PGreedy);
  CHECK(parse_selection_rule("fp") == SelectionRule::FPGreedy);
  CHECK_THROWS_AS(parse_selection_rule("q"), InputError);
  CHECK(to_string(SelectionRule::FPGreedy) == "fp");
}

TEST_CASE("single training point") {
  TrainingSet data{PointSet(1, 2), ValueSet(1, 3)};
  data.inputs << 0.5, -0.5;
  data.targets << 1.0, 2.0, 3.0;
  for (auto rule : {SelectionRule::FGreedy, SelectionRule::PGreedy, SelectionRule::FPGreedy}) {
    TrainConfig cfg;
    cfg.rule = rule;
    const TrainResult r = train(data, cfg);
    REQUIRE(r.model.size() == 1);
    CHECK(r.status == TrainStatus::AllPointsSelected);
    const Vector out = r.model.evaluate(row_span(data.inputs, 0));
    CHECK((out - data.targets.row(0).transpose()).norm() < 1e-14);
  }
}

TEST_CASE("full greedy run matches the dense interpolant") {
  std::mt19937_64 rng(2024);
  for (auto rule : {SelectionRule::FGreedy, SelectionRule::PGreedy, SelectionRule::FPGreedy}) {
    const TrainingSet data = random_set(rng, 5, 2, 2);
    const double eps = 1.0 / oracle::min_pairwise_distance(data.inputs);
    const TrainResult r = train(data, exact_config(eps, rule, 5));
    REQUIRE(r.model.size() == 5);
    check_history(r);

    const Matrix alpha = oracle::dense_coefficients(data.inputs, data.targets, eps);
    const PointSet probe = oracle::random_points(rng, 20, 2);
    const ValueSet dense = oracle::dense_eval(data.inputs, alpha, eps, probe);
    CHECK(oracle::relative_max_error(r.model.evaluate_many(probe), dense) < 1e-8);
  }
}

TEST_CASE("greedy state: first update is the kernel column") {
  std::mt19937_64 rng(5);
  const TrainingSet data = random_set(rng, 6, 3, 1);
  const GaussianKernel kernel(ShapeParameter(0.8));
  GreedyState state(data, kernel);
  CHECK(state.power_sq().isOnes());
  state.update_basis(2, 1e-14);
  const Vector column = kernel.column(data.inputs, row_span(data.inputs, 2));
  CHECK((state.basis_values().col(0) - column).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(state.power_sq()(2) == 0.0);
  CHECK(std::abs(state.last_pivot_leftover()) <= 1e-12);
  CHECK(state.residuals().row(2).norm() < 1e-14);
  CHECK_THROWS_AS(state.update_basis(2, 1e-14), InputError);
}

TEST_CASE("select_next rules and tie-breaking") {
  SUBCASE("f-greedy picks the largest residual") {
    TrainingSet data{PointSet(2, 1), ValueSet(2, 1)};
    data.inputs << 0.0, 10.0;
    data.targets << 3.0, 5.0;
    GreedyState state(data, GaussianKernel(ShapeParameter(1.0)));
    CHECK(state.select_next(SelectionRule::FGreedy, 1e-14) == 1);
  }
  SUBCASE("equal criteria resolve to the lower index") {
    TrainingSet data{PointSet(3, 1), ValueSet(3, 1)};
    data.inputs << -1.0, 0.0, 1.0;
    data.targets << 2.0, 0.0, 2.0;
    GreedyState state(data, GaussianKernel(ShapeParameter(1.0)));
    CHECK(state.select_next(SelectionRule::FGreedy, 1e-14) == 0);
    CHECK(state.select_next(SelectionRule::PGreedy, 1e-14) == 0);
    CHECK(state.select_next(SelectionRule::FPGreedy, 1e-14) == 0);
    state.update_basis(1, 1e-14);
    // symmetric about the middle point up to rounding in exp
    const auto next = state.select_next(SelectionRule::FPGreedy, 1e-14);
    REQUIRE(next.has_value());
    CHECK(*next != 1);
  }
  SUBCASE("selected points are never re-selected") {
    std::mt19937_64 rng(9);
    const TrainingSet data = random_set(rng, 10, 2, 2);
    GreedyState state(data, GaussianKernel(ShapeParameter(2.0)));
    std::vector<Eigen::Index> seen;
    for (int k = 0; k < 10; ++k) {
      auto next = state.select_next(SelectionRule::PGreedy, 1e-14);
      if (!next) break;
      CHECK(std::find(seen.begin(), seen.end(), *next) == seen.end());
      seen.push_back(*next);
      state.update_basis(*next, 1e-14);
      CHECK(state.power_sq()(*next) == 0.0);
    }
  }
  SUBCASE("nothing above the floor") {
    TrainingSet data{PointSet(1, 1), ValueSet(1, 1)};
    data.inputs << 0.0;
    data.targets << 1.0;
    GreedyState state(data, GaussianKernel(ShapeParameter(1.0)));
    state.update_basis(0, 1e-14);
    CHECK_FALSE(state.select_next(SelectionRule::FGreedy, 1e-14).has_value());
  }
}

TEST_CASE("near-singular pivot is refused") {
  TrainingSet data{PointSet(2, 1), ValueSet(2, 1)};
  data.inputs << 0.0, 1e-9;
  data.targets << 1.0, 2.0;
  GreedyState state(data, GaussianKernel(ShapeParameter(1.0)));
  state.update_basis(0, 1e-14);
  CHECK(state.power_sq()(1) < 1e-14);
  CHECK_THROWS_AS(state.update_basis(1, 1e-14), NearSingularPivotError);

  TrainConfig cfg;
  cfg.tolerance = 0.0;
  const TrainResult r = train(data, cfg);
  CHECK(r.status == TrainStatus::PowerFloorReached);
  CHECK(r.near_singular_stop());
  CHECK(r.model.size() == 1);
}

TEST_CASE("training stops at the tolerance and at max_centers") {
  std::mt19937_64 rng(17);
  TrainingSet data = random_set(rng, 40, 1, 1);
  for (Eigen::Index i = 0; i < data.size(); ++i) data.targets(i, 0) = std::sin(3.0 * data.inputs(i, 0));

  TrainConfig cfg;
  cfg.epsilon = ShapeParameter(2.0);
  cfg.tolerance = 1e-4;
  const TrainResult loose = train(data, cfg);
  CHECK(loose.status == TrainStatus::ToleranceReached);
  CHECK(loose.max_criterion_history.back() <= 1e-4);
  CHECK(loose.model.size() < 40);
  // every training point is within the tolerance once training stops
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    CHECK(std::abs(loose.model.evaluate(row_span(data.inputs, i))(0) - data.targets(i, 0)) <= 1e-4 + 1e-12);
  }

  cfg.max_centers = 3;
  const TrainResult capped = train(data, cfg);
  CHECK(capped.status == TrainStatus::MaxCentersReached);
  CHECK(capped.model.size() == 3);
}

TEST_CASE("greedy selections are nested") {
  std::mt19937_64 rng(23);
  const TrainingSet data = random_set(rng, 25, 3, 2);
  TrainConfig cfg;
  cfg.epsilon = ShapeParameter(1.5);
  cfg.tolerance = 0.0;
  std::vector<Eigen::Index> previous;
  for (Eigen::Index n = 1; n <= 12; ++n) {
    cfg.max_centers = n;
    const TrainResult r = train(data, cfg);
    REQUIRE(r.selected.size() == static_cast<std::size_t>(n));
    CHECK(std::equal(previous.begin(), previous.end(), r.selected.begin()));
    previous = r.selected;
  }
}

TEST_CASE("exactness at the selected centers") {
  std::mt19937_64 rng(31);
  for (auto rule : {SelectionRule::FGreedy, SelectionRule::PGreedy, SelectionRule::FPGreedy}) {
    const TrainingSet data = random_set(rng, 30, 2, 3);
    TrainConfig cfg;
    cfg.rule = rule;
    cfg.epsilon = ShapeParameter(3.0);
    cfg.max_centers = 15;
    const TrainResult r = train(data, cfg);
    check_history(r);
    for (Eigen::Index k : r.selected) {
      CHECK((r.model.evaluate(row_span(data.inputs, k)) - data.targets.row(k).transpose()).norm() <= 1e-8);
    }
  }
}

TEST_CASE("dense interpolant is permutation invariant and the full greedy run matches it") {
  std::mt19937_64 rng(41);
  const TrainingSet data = random_set(rng, 12, 2, 1);
  const double eps = 1.0 / oracle::min_pairwise_distance(data.inputs);
  std::vector<Eigen::Index> perm(12);
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  const TrainingSet shuffled = data.subset(perm);

  const PointSet probe = oracle::random_points(rng, 30, 2);
  const ValueSet a = oracle::dense_eval(data.inputs, oracle::dense_coefficients(data.inputs, data.targets, eps), eps, probe);
  const ValueSet b =
      oracle::dense_eval(shuffled.inputs, oracle::dense_coefficients(shuffled.inputs, shuffled.targets, eps), eps, probe);
  CHECK(oracle::relative_max_error(b, a) < 1e-10);

  const TrainResult r = train(shuffled, exact_config(eps, SelectionRule::FGreedy, 12));
  CHECK(oracle::relative_max_error(r.model.evaluate_many(probe), a) < 1e-8);
}

TEST_CASE("invalid training inputs") {
  TrainingSet empty{PointSet(0, 2), ValueSet(0, 1)};
  CHECK_THROWS_AS(train(empty, TrainConfig{}), InputError);
  TrainingSet dup{PointSet(2, 1), ValueSet(2, 1)};
  dup.inputs << 1.0, 1.0;
  dup.targets << 0.0, 0.0;
  CHECK_THROWS_AS(train(dup, TrainConfig{}), DegenerateInputError);
  TrainingSet mismatch{PointSet(2, 1), ValueSet(3, 1)};
  mismatch.inputs << 0.0, 1.0;
  CHECK_THROWS_AS(train(mismatch, TrainConfig{}), InputError);
  TrainConfig bad;
  bad.tolerance = -1.0;
  CHECK_THROWS_AS(bad.validate(), InputError);
}
