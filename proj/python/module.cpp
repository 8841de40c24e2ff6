#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "vkoga_ie/burgers.hpp"
#include "vkoga_ie/config.hpp"
#include "vkoga_ie/pipeline.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace vkoga_ie;

namespace {

py::dict trajectory_dict(const Trajectory& t) {
  Matrix states(static_cast<Eigen::Index>(t.states.size()), t.states.empty() ? 0 : t.states.front().size());
  for (std::size_t i = 0; i < t.states.size(); ++i) states.row(static_cast<Eigen::Index>(i)) = t.states[i].transpose();
  std::vector<int> iterations;
  std::vector<double> init_residuals;
  for (const auto& s : t.steps) {
    iterations.push_back(s.iterations);
    init_residuals.push_back(s.initializer_residual_norm);
  }
  return py::dict("times"_a = t.times, "states"_a = states, "iterations"_a = iterations,
                  "initializer_residuals"_a = init_residuals, "failed"_a = t.failed, "error"_a = t.error,
                  "wall_time_s"_a = t.wall_time_s);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Greedy kernel surrogates as Newton initializers for implicit Euler";

  py::register_exception<DataInconsistencyError>(m, "DataInconsistencyError");
  py::register_exception<ModelFormatError>(m, "ModelFormatError");
  py::register_exception<NearSingularPivotError>(m, "NearSingularPivotError");

  m.def("kernel_matrix", [](const PointSet& x, double eps) { return kernel_matrix(x, ShapeParameter(eps)); },
        "x"_a, "epsilon"_a);

  py::class_<KernelExpansion>(m, "KernelExpansion")
      .def_property_readonly("epsilon", [](const KernelExpansion& k) { return k.shape().value(); })
      .def_property_readonly("centers", &KernelExpansion::centers)
      .def_property_readonly("coefficients", &KernelExpansion::coefficients)
      .def("__len__", &KernelExpansion::size)
      .def("__call__", [](const KernelExpansion& k, const PointSet& x) { return k.evaluate_many(x); }, "x"_a);

  py::class_<TrainResult>(m, "TrainResult")
      .def_readonly("model", &TrainResult::model)
      .def_readonly("selected", &TrainResult::selected)
      .def_readonly("max_power_sq_history", &TrainResult::max_power_sq_history)
      .def_property_readonly("status", [](const TrainResult& r) { return to_string(r.status); });

  m.def(
      "train",
      [](const PointSet& x, const ValueSet& y, double eps, const std::string& rule, double tolerance,
         std::optional<Eigen::Index> max_centers) {
        TrainConfig cfg;
        cfg.epsilon = ShapeParameter(eps);
        cfg.rule = parse_selection_rule(rule);
        cfg.tolerance = tolerance;
        cfg.max_centers = max_centers;
        return train(TrainingSet{x, y}, cfg);
      },
      "x"_a, "y"_a, "epsilon"_a, "rule"_a = "f", "tolerance"_a = 1e-12, "max_centers"_a = py::none());

  m.def(
      "select_epsilon",
      [](const PointSet& x, const ValueSet& y, int folds, double lo, double hi, int count, std::uint64_t seed,
         const std::string& rule) {
        CvConfig cfg;
        cfg.folds = folds;
        cfg.grid_lo = lo;
        cfg.grid_hi = hi;
        cfg.grid_count = count;
        cfg.seed = seed;
        cfg.train.rule = parse_selection_rule(rule);
        const CvResult r = select_epsilon(TrainingSet{x, y}, cfg);
        std::vector<std::pair<double, double>> scores;
        for (const auto& s : r.scores) scores.emplace_back(s.epsilon, s.score);
        return py::make_tuple(r.epsilon.value(), scores);
      },
      "x"_a, "y"_a, "folds"_a = 5, "grid_lo"_a = 1e-4, "grid_hi"_a = 1e2, "grid_count"_a = 50, "seed"_a = 0,
      "rule"_a = "f");

  m.def(
      "burgers_rhs",
      [](const Vector& u, double u_left, double u_right, double half_width) {
        return burgers_rhs(u, {u_left, u_right}, BurgersGrid{u.size(), half_width});
      },
      "u"_a, "u_left"_a, "u_right"_a, "half_width"_a = 5.0);

  py::class_<SurrogateModel>(m, "SurrogateModel")
      .def_property_readonly("expansion", &SurrogateModel::expansion)
      .def_property_readonly("input_dim", &SurrogateModel::input_dim)
      .def_property_readonly("output_dim", &SurrogateModel::output_dim)
      .def("predict", &SurrogateModel::predict, "dt"_a, "u"_a)
      .def("save", [](const SurrogateModel& s, const std::filesystem::path& p) { save_model(s, p); }, "path"_a)
      .def("to_json", [](const SurrogateModel& s) { return model_to_json(s); });

  m.def("load_model", &load_model, "path"_a);

  m.def(
      "offline",
      [](const std::filesystem::path& config, std::optional<double> epsilon, std::optional<std::string> rule) {
        ExperimentConfig cfg = load_experiment_config(config);
        if (epsilon) cfg.offline.fixed_epsilon = *epsilon;
        if (rule) cfg.offline.train.rule = parse_selection_rule(*rule);
        py::gil_scoped_release release;
        return offline(cfg.offline);
      },
      "config"_a, "epsilon"_a = py::none(), "rule"_a = py::none());

  m.def(
      "integrate_burgers",
      [](double u_left, double u_right, double dt, double horizon, const SurrogateModel* model, Eigen::Index cells) {
        const BurgersProblem prob(BurgersGrid{cells, 5.0});
        const Initializer init = model ? Initializer::surrogate(std::make_shared<const SurrogateModel>(*model))
                                       : Initializer::previous_value();
        Trajectory t;
        {
          py::gil_scoped_release release;
          t = integrate(prob, Vector{{u_left, u_right}}, dt, horizon, init);
        }
        return trajectory_dict(t);
      },
      "u_left"_a, "u_right"_a, "dt"_a, "horizon"_a, "model"_a = nullptr, "cells"_a = 200);
}
