#include "vkoga_ie/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "vkoga_ie/burgers.hpp"

namespace vkoga_ie {

std::unique_ptr<IvpProblem> make_problem(const ProblemDescriptor& desc) {
  if (desc.id == "burgers") return std::make_unique<BurgersProblem>(BurgersGrid{desc.cells, desc.half_width});
  throw InputError("unknown problem id '" + desc.id + "'");
}

InputNormalization InputNormalization::fit(const PointSet& inputs) {
  if (inputs.rows() == 0) throw InputError("normalization: no inputs");
  InputNormalization n{inputs.colwise().minCoeff().transpose(), Vector(inputs.cols())};
  const Vector hi = inputs.colwise().maxCoeff().transpose();
  for (Eigen::Index k = 0; k < inputs.cols(); ++k) {
    const double range = hi(k) - n.offset(k);
    n.scale(k) = range > 0.0 ? range : 1.0;
  }
  return n;
}

Vector InputNormalization::apply(const Vector& x) const {
  return ((x - offset).array() / scale.array()).matrix();
}

PointSet InputNormalization::apply(const PointSet& xs) const {
  PointSet out = xs;
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    out.row(i) = ((xs.row(i) - offset.transpose()).array() / scale.transpose().array()).matrix();
  }
  return out;
}

void InputNormalization::validate(Eigen::Index dim) const {
  if (offset.size() != dim || scale.size() != dim) throw InputError("normalization: dimension mismatch");
  if (!((scale.array() > 0.0).all()) || !scale.allFinite() || !offset.allFinite()) {
    throw InputError("normalization: scales must be positive and finite");
  }
}

SurrogateModel::SurrogateModel(KernelExpansion expansion, std::optional<InputNormalization> normalization,
                               Provenance provenance)
    : expansion_(std::move(expansion)), normalization_(std::move(normalization)), provenance_(std::move(provenance)) {
  if (normalization_) normalization_->validate(expansion_.input_dim());
}

Vector SurrogateModel::evaluate(const Vector& raw_input) const {
  return normalization_ ? expansion_.evaluate(normalization_->apply(raw_input)) : expansion_.evaluate(raw_input);
}

Vector SurrogateModel::predict(double dt, const Vector& u_prev) const { return evaluate(concat_step_input(dt, u_prev)); }

bool SurrogateModel::trained_on_dt(double dt) const {
  return std::any_of(provenance_.runs.begin(), provenance_.runs.end(), [dt](const TrainingRun& r) {
    return std::abs(r.dt - dt) <= 1e-12 * std::max(1.0, std::abs(dt));
  });
}

namespace {

struct RowHash {
  const PointSet* points;
  std::size_t operator()(Eigen::Index i) const {
    std::size_t h = 1469598103934665603ULL;
    for (Eigen::Index k = 0; k < points->cols(); ++k) {
      double v = (*points)(i, k) + 0.0;  // folds -0.0 into 0.0
      std::uint64_t bits;
      std::memcpy(&bits, &v, sizeof bits);
      h ^= bits + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

struct RowEqual {
  const PointSet* points;
  bool operator()(Eigen::Index a, Eigen::Index b) const { return points->row(a) == points->row(b); }
};

}  // namespace

AssembledData assemble_training_set(std::span<const Trajectory> trajectories) {
  if (trajectories.empty()) throw InputError("assemble_training_set: no trajectories");
  Eigen::Index raw = 0;
  Eigen::Index dim = -1;
  for (const auto& t : trajectories) {
    if (t.failed) throw InputError("assemble_training_set: trajectory is incomplete (" + t.error + ")");
    if (t.states.size() < 2) throw InputError("assemble_training_set: trajectory has no steps");
    if (dim < 0) dim = t.states.front().size();
    if (t.states.front().size() != dim) throw InputError("assemble_training_set: trajectories differ in dimension");
    raw += static_cast<Eigen::Index>(t.states.size()) - 1;
  }

  PointSet inputs(raw, dim + 1);
  ValueSet targets(raw, dim);
  Eigen::Index row = 0;
  for (const auto& t : trajectories) {
    for (std::size_t i = 0; i + 1 < t.states.size(); ++i, ++row) {
      inputs(row, 0) = t.dt;
      inputs.row(row).tail(dim) = t.states[i].transpose();
      targets.row(row) = t.states[i + 1].transpose();
    }
  }

  std::unordered_map<Eigen::Index, Eigen::Index, RowHash, RowEqual> seen(
      static_cast<std::size_t>(raw), RowHash{&inputs}, RowEqual{&inputs});
  std::vector<Eigen::Index> keep;
  keep.reserve(static_cast<std::size_t>(raw));
  for (Eigen::Index i = 0; i < raw; ++i) {
    auto [it, inserted] = seen.emplace(i, i);
    if (inserted) {
      keep.push_back(i);
      continue;
    }
    const double diff = (targets.row(i) - targets.row(it->second)).norm();
    if (diff > 1e-10) {
      std::ostringstream msg;
      msg << "training inputs " << it->second << " and " << i << " coincide but their targets differ by " << diff
          << " (intersecting trajectories)";
      throw DataInconsistencyError(msg.str());
    }
  }

  TrainingSet all{std::move(inputs), std::move(targets)};
  AssembledData out{all.subset(keep), raw, raw - static_cast<Eigen::Index>(keep.size())};
  return out;
}

void OfflineConfig::validate() const {
  if (runs.empty()) throw InputError("offline: empty training parameter list");
  if (!(train_horizon > 0.0)) throw InputError("offline: training horizon must be positive");
  for (const auto& r : runs) step_count(r.dt, train_horizon);
  if (fixed_epsilon) ShapeParameter check(*fixed_epsilon);
  else cv.validate();
  train.validate();
  newton.validate();
}

NewtonOptions newton_for(const IvpProblem& problem, const NewtonOptions& base) {
  NewtonOptions options = base;
  options.linear_solver = problem.jacobian_structure() == JacobianStructure::Tridiagonal ? LinearSolver::Tridiagonal
                                                                                         : LinearSolver::Dense;
  return options;
}

namespace {

std::string describe(const Vector& mu) {
  std::ostringstream out;
  out << "(";
  for (Eigen::Index k = 0; k < mu.size(); ++k) out << (k ? ", " : "") << mu(k);
  out << ")";
  return out.str();
}

template <class Job>
void run_jobs(std::size_t count, unsigned jobs, Job&& job) {
  jobs = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) job(i);
  };
  if (jobs == 1) {
    worker();
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
}

}  // namespace

TrainingData generate_training_data(const OfflineConfig& cfg) {
  cfg.validate();
  const auto problem = make_problem(cfg.problem);
  const NewtonOptions newton = newton_for(*problem, cfg.newton);

  TrainingData out;
  out.trajectories.resize(cfg.runs.size());
  run_jobs(cfg.runs.size(), cfg.jobs, [&](std::size_t j) {
    out.trajectories[j] = integrate(*problem, cfg.runs[j].mu, cfg.runs[j].dt, cfg.train_horizon,
                                    Initializer::previous_value(), newton);
  });
  for (std::size_t j = 0; j < out.trajectories.size(); ++j) {
    if (out.trajectories[j].failed) {
      throw std::runtime_error("offline: integration failed for mu = " + describe(cfg.runs[j].mu) +
                               ", dt = " + std::to_string(cfg.runs[j].dt) + ": " + out.trajectories[j].error);
    }
  }

  out.assembled = assemble_training_set(out.trajectories);
  if (cfg.normalize_inputs) {
    out.normalization = InputNormalization::fit(out.assembled.data.inputs);
    out.assembled.data.inputs = out.normalization->apply(out.assembled.data.inputs);
  }
  return out;
}

OfflineResult run_offline(const OfflineConfig& cfg) {
  TrainingData generated = generate_training_data(cfg);
  AssembledData& assembled = generated.assembled;

  Provenance prov;
  prov.problem = cfg.problem;
  prov.runs = cfg.runs;
  prov.train_horizon = cfg.train_horizon;
  prov.rule = cfg.train.rule;
  prov.tolerance = cfg.train.tolerance;
  prov.max_centers = cfg.train.max_centers;
  prov.raw_pairs = assembled.raw_pairs;
  prov.training_points = assembled.data.size();

  TrainConfig train_cfg = cfg.train;
  if (cfg.fixed_epsilon) {
    train_cfg.epsilon = ShapeParameter(*cfg.fixed_epsilon);
  } else {
    CvConfig cv = cfg.cv;
    cv.train = cfg.train;
    CvResult selected = select_epsilon(assembled.data, cv);
    train_cfg.epsilon = selected.epsilon;
    prov.epsilon_from_cv = true;
    prov.cv_scores = std::move(selected.scores);
  }

  TrainResult fit = train(assembled.data, train_cfg);
  prov.train_status = to_string(fit.status);
  SurrogateModel model(fit.model, std::move(generated.normalization), std::move(prov));
  return {std::move(model), std::move(generated.trajectories), std::move(fit)};
}

RunReport make_report(const Trajectory& traj, const Vector& mu, const std::string& initializer) {
  RunReport report;
  report.mu = mu;
  report.dt = traj.dt;
  report.initializer = initializer;
  report.iterations.reserve(traj.steps.size());
  for (const auto& s : traj.steps) report.iterations.push_back(s.iterations);
  report.mean_iterations = traj.mean_iterations();
  report.mean_initializer_residual = traj.mean_initializer_residual();
  report.wall_time_s = traj.wall_time_s;
  report.failed = traj.failed;
  report.error = traj.error;
  return report;
}

namespace {

std::unique_ptr<IvpProblem> problem_for(const SurrogateModel& model) {
  auto problem = make_problem(model.provenance().problem);
  if (model.input_dim() != problem->dimension() + 1 || model.output_dim() != problem->dimension()) {
    throw InputError("model maps R^" + std::to_string(model.input_dim()) + " -> R^" +
                     std::to_string(model.output_dim()) + " but problem '" + problem->id() + "' has dimension " +
                     std::to_string(problem->dimension()));
  }
  return problem;
}

}  // namespace

OnlineResult online(const SurrogateModel& model, const Vector& mu, double dt, double horizon,
                    const NewtonOptions& newton) {
  const auto problem = problem_for(model);
  const auto init = Initializer::surrogate(std::make_shared<const SurrogateModel>(model));
  Trajectory traj = integrate(*problem, mu, dt, horizon, init, newton_for(*problem, newton));
  RunReport report = make_report(traj, mu, "surrogate");
  report.dt_mismatch = !model.trained_on_dt(dt);
  return {std::move(traj), std::move(report)};
}

double gain_percent(double old_value, double new_value) {
  if (old_value == 0.0) return new_value == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return (old_value - new_value) / old_value * 100.0;
}

ComparisonReport compare(const SurrogateModel& model, const std::vector<TestCase>& cases, double horizon,
                         int repetitions, const NewtonOptions& newton) {
  if (repetitions < 1) throw InputError("compare: repetitions must be >= 1");
  if (cases.empty()) throw InputError("compare: no test cases");
  const auto problem = problem_for(model);
  const NewtonOptions options = newton_for(*problem, newton);
  const auto surrogate = Initializer::surrogate(std::make_shared<const SurrogateModel>(model));
  const auto baseline = Initializer::previous_value();

  ComparisonReport report;
  for (const auto& tc : cases) {
    ComparisonRow row;
    row.mu = tc.mu;
    row.dt = tc.dt;
    row.dt_mismatch = !model.trained_on_dt(tc.dt);
    try {
      Trajectory old_traj;
      Trajectory new_traj;
      double old_time = 0.0;
      double new_time = 0.0;
      for (int r = 0; r < repetitions; ++r) {
        old_traj = integrate(*problem, tc.mu, tc.dt, horizon, baseline, options);
        new_traj = integrate(*problem, tc.mu, tc.dt, horizon, surrogate, options);
        old_time += old_traj.wall_time_s;
        new_time += new_traj.wall_time_s;
      }
      if (old_traj.failed) throw std::runtime_error("baseline run failed: " + old_traj.error);
      if (new_traj.failed) throw std::runtime_error("surrogate run failed: " + new_traj.error);
      row.iter_old = old_traj.mean_iterations();
      row.iter_vkoga = new_traj.mean_iterations();
      row.time_old_s = old_time / repetitions;
      row.time_vkoga_s = new_time / repetitions;
      row.gain_iter_pct = gain_percent(row.iter_old, row.iter_vkoga);
      row.gain_time_pct = gain_percent(row.time_old_s, row.time_vkoga_s);
      row.init_residual_old = old_traj.mean_initializer_residual();
      row.init_residual_vkoga = new_traj.mean_initializer_residual();
      for (std::size_t i = 0; i < old_traj.states.size(); ++i) {
        row.max_state_difference =
            std::max(row.max_state_difference, (old_traj.states[i] - new_traj.states[i]).lpNorm<Eigen::Infinity>());
      }
    } catch (const std::exception& ex) {
      row.ok = false;
      row.error = ex.what();
      ++report.failures;
      report.warnings.push_back("mu = " + describe(tc.mu) + ", dt = " + std::to_string(tc.dt) +
                                " excluded: " + row.error);
    }
    report.rows.push_back(std::move(row));
  }

  std::size_t used = 0;
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& row = report.rows[i];
    if (!row.ok) continue;
    ++used;
    report.mean.iter_old += row.iter_old;
    report.mean.iter_vkoga += row.iter_vkoga;
    report.mean.time_old_s += row.time_old_s;
    report.mean.time_vkoga_s += row.time_vkoga_s;
    report.mean.gain_iter_pct += row.gain_iter_pct;
    report.mean.gain_time_pct += row.gain_time_pct;
    if (!report.min.source || row.gain_iter_pct < report.rows[*report.min.source].gain_iter_pct) report.min.source = i;
    if (!report.max.source || row.gain_iter_pct > report.rows[*report.max.source].gain_iter_pct) report.max.source = i;
  }
  if (used == 0) {
    report.warnings.push_back("every test case failed; aggregates are empty");
    return report;
  }
  const double n = static_cast<double>(used);
  report.mean.iter_old /= n;
  report.mean.iter_vkoga /= n;
  report.mean.time_old_s /= n;
  report.mean.time_vkoga_s /= n;
  report.mean.gain_iter_pct /= n;
  report.mean.gain_time_pct /= n;
  for (AggregateRow* agg : {&report.min, &report.max}) {
    const auto& row = report.rows[*agg->source];
    agg->iter_old = row.iter_old;
    agg->iter_vkoga = row.iter_vkoga;
    agg->time_old_s = row.time_old_s;
    agg->time_vkoga_s = row.time_vkoga_s;
    agg->gain_iter_pct = row.gain_iter_pct;
    agg->gain_time_pct = row.gain_time_pct;
  }
  return report;
}

}  // namespace vkoga_ie
