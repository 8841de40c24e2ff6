#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vkoga_ie/model_select.hpp"
#include "vkoga_ie/ode.hpp"
#include "vkoga_ie/vkoga.hpp"

namespace vkoga_ie {

// Named problem plus its discretization settings.
struct ProblemDescriptor {
  std::string id = "burgers";
  Eigen::Index cells = 200;
  double half_width = 5.0;
};

std::unique_ptr<IvpProblem> make_problem(const ProblemDescriptor& desc);

struct TrainingRun {
  Vector mu;
  double dt = 0.01;
};

// x -> (x - offset) / scale, per input coordinate.
struct InputNormalization {
  Vector offset;
  Vector scale;

  // Min-max over the rows; constant columns get scale 1.
  static InputNormalization fit(const PointSet& inputs);
  Vector apply(const Vector& x) const;
  PointSet apply(const PointSet& xs) const;
  void validate(Eigen::Index dim) const;
};

struct Provenance {
  ProblemDescriptor problem;
  std::vector<TrainingRun> runs;
  double train_horizon = 0.0;
  SelectionRule rule = SelectionRule::FGreedy;
  double tolerance = 0.0;
  std::optional<Eigen::Index> max_centers;
  bool epsilon_from_cv = false;
  std::vector<CvScore> cv_scores;
  Eigen::Index raw_pairs = 0;
  Eigen::Index training_points = 0;
  std::string train_status;
  std::string initial_condition = "riemann_step";
};

// Kernel surrogate of the implicit Euler step map (dt, u_i) -> u_{i+1}.
class SurrogateModel final : public StepPredictor {
 public:
  SurrogateModel(KernelExpansion expansion, std::optional<InputNormalization> normalization, Provenance provenance);

  Eigen::Index input_dim() const override { return expansion_.input_dim(); }
  Eigen::Index output_dim() const override { return expansion_.output_dim(); }
  Vector predict(double dt, const Vector& u_prev) const override;
  // Evaluate on a raw (unnormalized) input (dt, u).
  Vector evaluate(const Vector& raw_input) const;

  const KernelExpansion& expansion() const noexcept { return expansion_; }
  const std::optional<InputNormalization>& normalization() const noexcept { return normalization_; }
  const Provenance& provenance() const noexcept { return provenance_; }
  Provenance& provenance() noexcept { return provenance_; }

  // True if dt equals one of the training timesteps.
  bool trained_on_dt(double dt) const;

 private:
  KernelExpansion expansion_;
  std::optional<InputNormalization> normalization_;
  Provenance provenance_;
};

struct AssembledData {
  TrainingSet data;
  Eigen::Index raw_pairs = 0;
  Eigen::Index duplicates_removed = 0;
};

// Inputs (dt, u_i), targets u_{i+1}; exact-duplicate inputs are dropped (first
// occurrence kept) after checking that their targets agree to 1e-10.
AssembledData assemble_training_set(std::span<const Trajectory> trajectories);

struct OfflineConfig {
  ProblemDescriptor problem;
  std::vector<TrainingRun> runs;
  double train_horizon = 4.0;
  // Skip cross validation when set.
  std::optional<double> fixed_epsilon;
  CvConfig cv;
  TrainConfig train;
  bool normalize_inputs = false;
  NewtonOptions newton;
  unsigned jobs = 1;

  void validate() const;
};

struct TrainingData {
  std::vector<Trajectory> trajectories;
  // Inputs already normalized when the config asks for it.
  AssembledData assembled;
  std::optional<InputNormalization> normalization;
};

// Trajectories for every training run plus the assembled training set.
TrainingData generate_training_data(const OfflineConfig& cfg);

struct OfflineResult {
  SurrogateModel model;
  std::vector<Trajectory> trajectories;
  TrainResult training;
};

// Generate trajectories, assemble data, pick epsilon, train.
OfflineResult run_offline(const OfflineConfig& cfg);
inline SurrogateModel offline(const OfflineConfig& cfg) { return run_offline(cfg).model; }

struct RunReport {
  Vector mu;
  double dt = 0.0;
  std::string initializer;
  std::vector<int> iterations;
  double mean_iterations = 0.0;
  double mean_initializer_residual = 0.0;
  double wall_time_s = 0.0;
  // dt is not one of the model's training timesteps.
  bool dt_mismatch = false;
  bool failed = false;
  std::string error;
};

RunReport make_report(const Trajectory& traj, const Vector& mu, const std::string& initializer);

struct OnlineResult {
  Trajectory trajectory;
  RunReport report;
};

// Newton options used when none are given: tolerance 1e-14, 100 iterations, and
// the problem's preferred linear solver.
NewtonOptions newton_for(const IvpProblem& problem, const NewtonOptions& base);

OnlineResult online(const SurrogateModel& model, const Vector& mu, double dt, double horizon,
                    const NewtonOptions& newton = {});

struct TestCase {
  Vector mu;
  double dt = 0.01;
};

struct ComparisonRow {
  Vector mu;
  double dt = 0.0;
  double iter_old = 0.0;
  double iter_vkoga = 0.0;
  double time_old_s = 0.0;
  double time_vkoga_s = 0.0;
  double gain_iter_pct = 0.0;
  double gain_time_pct = 0.0;
  double init_residual_old = 0.0;
  double init_residual_vkoga = 0.0;
  // max_i |u_i^old - u_i^vkoga|_inf
  double max_state_difference = 0.0;
  bool dt_mismatch = false;
  bool ok = true;
  std::string error;
};

struct AggregateRow {
  double iter_old = 0.0;
  double iter_vkoga = 0.0;
  double time_old_s = 0.0;
  double time_vkoga_s = 0.0;
  double gain_iter_pct = 0.0;
  double gain_time_pct = 0.0;
  // Index into rows of the extremizing case (min/max rows only).
  std::optional<std::size_t> source;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  AggregateRow mean;
  AggregateRow min;
  AggregateRow max;
  std::size_t failures = 0;
  std::vector<std::string> warnings;
};

// Percentage reduction (old - new) / old * 100.
double gain_percent(double old_value, double new_value);

// Runs previous-value and surrogate initialization for every case. Timings are
// averaged over the repetitions, which always run serially; min/max rows are
// chosen by iteration gain.
ComparisonReport compare(const SurrogateModel& model, const std::vector<TestCase>& cases, double horizon,
                         int repetitions, const NewtonOptions& newton = {});

// Versioned JSON model files.
inline constexpr int kModelFormatVersion = 1;
void save_model(const SurrogateModel& model, const std::filesystem::path& path);
SurrogateModel load_model(const std::filesystem::path& path);
std::string model_to_json(const SurrogateModel& model);
SurrogateModel model_from_json(const std::string& text);

}  // namespace vkoga_ie
