#include <doctest.h>

#include "vkoga_ie/config.hpp"

using namespace vkoga_ie;

TEST_CASE("shipped presets") {
  const std::filesystem::path dir(VKOGA_IE_CONFIG_DIR);
  const ExperimentConfig e1 = load_experiment_config(dir / "experiment1.cfg");
  CHECK_NOTHROW(e1.validate());
  REQUIRE(e1.offline.runs.size() == 1);
  CHECK(e1.offline.runs[0].mu == Vector{{3.4, 0.2}});
  CHECK(e1.offline.train_horizon == 4.0);
  CHECK(e1.offline.train.tolerance == 1e-12);
  CHECK_FALSE(e1.offline.fixed_epsilon.has_value());
  CHECK(e1.offline.cv.grid_count == 50);
  CHECK(e1.online.horizon == 2.0);
  CHECK(e1.online.repetitions == 10);

  const auto cases = e1.online.cases();
  REQUIRE(cases.size() == 9);
  for (const auto& c : cases) {
    CHECK(c.dt == 0.01);
    bool found = false;
    for (int i = -1; i <= 1; ++i)
      for (int j = -1; j <= 1; ++j)
        found = found || ((c.mu - Vector{{3.4 + 0.2 * i, 0.2 + 0.2 * j}}).norm() < 1e-14);
    CHECK(found);
  }

  const ExperimentConfig e2 = load_experiment_config(dir / "experiment2.cfg");
  REQUIRE(e2.offline.runs.size() == 4);
  CHECK(e2.online.cases().size() == 9);

  const ExperimentConfig e3 = load_experiment_config(dir / "experiment3.cfg");
  CHECK_NOTHROW(e3.validate());
  REQUIRE(e3.offline.runs.size() == 3);
  CHECK(e3.offline.runs[2].dt == 0.001);
  REQUIRE(e3.online.dts.size() == 10);
  CHECK(e3.online.dts.front() == doctest::Approx(0.001));
  CHECK(e3.online.dts.back() == 0.05);
  const auto raw = log_spaced(0.001, 0.05, 10);
  for (std::size_t k = 0; k < raw.size(); ++k) {
    CHECK(std::abs(e3.online.dts[k] / raw[k] - 1.0) < 0.01);
    CHECK_NOTHROW(step_count(e3.online.dts[k], 2.0));
  }
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(load_experiment_config("/nonexistent/x.cfg"), InputError);
  CHECK_THROWS_AS(parse_experiment_config("just text"), InputError);
  CHECK_THROWS_AS(parse_experiment_config("offline: {runs: 3}"), InputError);
  CHECK_THROWS_AS(parse_experiment_config("offline: {runs: [{mu: [1, 0]}]}"), InputError);
  CHECK_THROWS_AS(parse_experiment_config("offline: {runs: [{mu: [1, 0], dt: 0.01}], rule: q}"), InputError);
  const ExperimentConfig bad = parse_experiment_config("offline: {runs: [{mu: [1, 0], dt: 0.03}]}");
  CHECK_THROWS_AS(bad.validate(), InputError);
}

TEST_CASE("log spacing") {
  const auto v = log_spaced(0.01, 1.0, 3);
  CHECK(v[0] == 0.01);
  CHECK(v[1] == doctest::Approx(0.1));
  CHECK(v[2] == 1.0);
  CHECK_THROWS_AS(log_spaced(1.0, 0.1, 3), InputError);
}
