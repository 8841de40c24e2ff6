#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "vkoga_ie/kernel.hpp"

namespace vkoga_ie {

// Paired inputs (N x p) and targets (N x q). Inputs must be pairwise distinct.
struct TrainingSet {
  PointSet inputs;
  ValueSet targets;

  Eigen::Index size() const noexcept { return inputs.rows(); }
  Eigen::Index input_dim() const noexcept { return inputs.cols(); }
  Eigen::Index output_dim() const noexcept { return targets.cols(); }

  // Throws InputError / DegenerateInputError.
  void validate() const;
  TrainingSet subset(const std::vector<Eigen::Index>& rows) const;
};

enum class SelectionRule { FGreedy, PGreedy, FPGreedy };

std::string to_string(SelectionRule rule);
// Accepts "f", "p", "fp" (also "f-greedy", "p-greedy", "f/p-greedy").
SelectionRule parse_selection_rule(const std::string& text);

struct TrainConfig {
  double tolerance = 1e-12;
  std::optional<Eigen::Index> max_centers;
  SelectionRule rule = SelectionRule::FGreedy;
  ShapeParameter epsilon{1.0};
  // Candidates whose squared power value is at or below this are never selected.
  double power_floor = 1e-14;

  void validate() const;
};

// Incremental Newton-basis state of the greedy interpolant over a fixed training set.
//
// basis_values() holds the values of the first n Newton basis functions at all N
// training inputs; its rows at the selected indices form the lower-triangular
// partial Cholesky factor of the kernel matrix. residuals() are the targets minus
// the current interpolant, power_sq() the squared power function.
//
// The state keeps a reference to the training set, which must outlive it.
class GreedyState {
 public:
  GreedyState(const TrainingSet& data, GaussianKernel kernel);

  Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(selected_.size()); }
  const std::vector<Eigen::Index>& selected_indices() const noexcept { return selected_; }
  auto basis_values() const { return basis_.leftCols(size()); }
  const ValueSet& residuals() const noexcept { return residuals_; }
  const Vector& power_sq() const noexcept { return power_sq_; }
  bool is_selected(Eigen::Index i) const { return selected_mask_[static_cast<std::size_t>(i)]; }

  // Value of the rule's selection criterion at training point i.
  double criterion(Eigen::Index i, SelectionRule rule) const;

  // Unselected index maximizing the criterion among points with power_sq above
  // the floor; lowest index wins ties. nullopt when no candidate remains.
  std::optional<Eigen::Index> select_next(SelectionRule rule, double power_floor) const;

  // Largest power_sq over unselected points (0 if all are selected).
  double max_unselected_power_sq() const;

  // Append the Newton basis function centered at index. Throws
  // NearSingularPivotError if power_sq(index) <= power_floor and InputError if it
  // is already selected.
  void update_basis(Eigen::Index index, double power_floor);

  // power_sq at the most recent center just before it was clamped to zero.
  double last_pivot_leftover() const noexcept { return last_leftover_; }

  // Interpolant on the selected centers (in selection order), obtained by
  // back-substitution through the triangular factor.
  KernelExpansion expansion() const;

 private:
  const TrainingSet* data_;
  GaussianKernel kernel_;
  Matrix basis_;              // N x capacity, column-major
  ValueSet residuals_;        // N x q
  Vector power_sq_;           // N
  ValueSet newton_coeffs_;    // capacity x q
  std::vector<Eigen::Index> selected_;
  std::vector<bool> selected_mask_;
  double last_leftover_ = 0.0;
};

enum class TrainStatus {
  ToleranceReached,
  MaxCentersReached,
  AllPointsSelected,
  // Every remaining candidate fell to the power floor before the tolerance was met.
  PowerFloorReached,
};

std::string to_string(TrainStatus status);

struct TrainResult {
  KernelExpansion model;
  TrainStatus status;
  std::vector<Eigen::Index> selected;
  // Entry k: max unselected power_sq after k selections (k = 0..n).
  std::vector<double> max_power_sq_history;
  // Entry k: max selection criterion over candidates before selection k+1
  // (final entry: at termination, when computed).
  std::vector<double> max_criterion_history;
  // Largest |power_sq| found at a selected index after training.
  double max_selected_power_sq = 0.0;

  bool near_singular_stop() const noexcept { return status == TrainStatus::PowerFloorReached; }
};

TrainResult train(const TrainingSet& data, const TrainConfig& cfg);

}  // namespace vkoga_ie
