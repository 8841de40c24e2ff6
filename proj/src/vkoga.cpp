#include "vkoga_ie/vkoga.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vkoga_ie {

void TrainingSet::validate() const {
  if (inputs.rows() < 1) throw InputError("training set is empty");
  if (inputs.rows() != targets.rows()) {
    throw InputError("training set: " + std::to_string(inputs.rows()) + " inputs but " +
                     std::to_string(targets.rows()) + " targets");
  }
  if (inputs.cols() < 1 || targets.cols() < 1) throw InputError("training set: zero-width inputs or targets");
  if (!inputs.allFinite() || !targets.allFinite()) throw InputError("training set contains non-finite values");
  if (auto dup = find_duplicate_rows(inputs)) {
    throw DegenerateInputError("training set: inputs " + std::to_string(dup->first) + " and " +
                               std::to_string(dup->second) + " coincide");
  }
}

TrainingSet TrainingSet::subset(const std::vector<Eigen::Index>& rows) const {
  TrainingSet out{PointSet(static_cast<Eigen::Index>(rows.size()), inputs.cols()),
                  ValueSet(static_cast<Eigen::Index>(rows.size()), targets.cols())};
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.inputs.row(static_cast<Eigen::Index>(k)) = inputs.row(rows[k]);
    out.targets.row(static_cast<Eigen::Index>(k)) = targets.row(rows[k]);
  }
  return out;
}

std::string to_string(SelectionRule rule) {
  switch (rule) {
    case SelectionRule::FGreedy: return "f";
    case SelectionRule::PGreedy: return "p";
    case SelectionRule::FPGreedy: return "fp";
  }
  return "?";
}

SelectionRule parse_selection_rule(const std::string& text) {
  if (text == "f" || text == "f-greedy") return SelectionRule::FGreedy;
  if (text == "p" || text == "p-greedy" || text == "P-greedy") return SelectionRule::PGreedy;
  if (text == "fp" || text == "f/p" || text == "f/p-greedy" || text == "f/P-greedy") return SelectionRule::FPGreedy;
  throw InputError("unknown selection rule '" + text + "' (expected f, p or fp)");
}

std::string to_string(TrainStatus status) {
  switch (status) {
    case TrainStatus::ToleranceReached: return "tolerance_reached";
    case TrainStatus::MaxCentersReached: return "max_centers_reached";
    case TrainStatus::AllPointsSelected: return "all_points_selected";
    case TrainStatus::PowerFloorReached: return "power_floor_reached";
  }
  return "?";
}

void TrainConfig::validate() const {
  if (!(tolerance >= 0.0) || !std::isfinite(tolerance)) throw InputError("train tolerance must be >= 0");
  if (max_centers && *max_centers < 1) throw InputError("max_centers must be positive");
  if (!(power_floor >= 0.0)) throw InputError("power floor must be >= 0");
}

GreedyState::GreedyState(const TrainingSet& data, GaussianKernel kernel)
    : data_(&data), kernel_(kernel), residuals_(data.targets),
      selected_mask_(static_cast<std::size_t>(data.size()), false) {
  const Eigen::Index n = data.size();
  power_sq_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto x = row_span(data.inputs, i);
    power_sq_(i) = kernel_(x, x);
  }
  const Eigen::Index initial = std::min<Eigen::Index>(n, 32);
  basis_.resize(n, initial);
  newton_coeffs_.resize(initial, data.output_dim());
}

double GreedyState::criterion(Eigen::Index i, SelectionRule rule) const {
  const double p = std::max(power_sq_(i), 0.0);
  switch (rule) {
    case SelectionRule::FGreedy: return residuals_.row(i).norm();
    case SelectionRule::PGreedy: return std::sqrt(p);
    case SelectionRule::FPGreedy: return p > 0.0 ? residuals_.row(i).norm() / std::sqrt(p) : 0.0;
  }
  return 0.0;
}

std::optional<Eigen::Index> GreedyState::select_next(SelectionRule rule, double power_floor) const {
  std::optional<Eigen::Index> best;
  double best_value = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < data_->size(); ++i) {
    if (selected_mask_[static_cast<std::size_t>(i)] || !(power_sq_(i) > power_floor)) continue;
    const double value = criterion(i, rule);
    if (value > best_value) {
      best_value = value;
      best = i;
    }
  }
  return best;
}

double GreedyState::max_unselected_power_sq() const {
  double best = 0.0;
  for (Eigen::Index i = 0; i < data_->size(); ++i) {
    if (!selected_mask_[static_cast<std::size_t>(i)]) best = std::max(best, power_sq_(i));
  }
  return best;
}

void GreedyState::update_basis(Eigen::Index index, double power_floor) {
  if (index < 0 || index >= data_->size()) throw InputError("update_basis: index out of range");
  if (selected_mask_[static_cast<std::size_t>(index)]) {
    throw InputError("update_basis: index " + std::to_string(index) + " already selected");
  }
  const double pivot = power_sq_(index);
  if (!(pivot > power_floor)) {
    throw NearSingularPivotError("update_basis: power value " + std::to_string(pivot) + " at index " +
                                 std::to_string(index) + " is at the numerical floor");
  }

  const Eigen::Index n = size();
  if (n == basis_.cols()) {
    const Eigen::Index grown = std::min<Eigen::Index>(data_->size(), std::max<Eigen::Index>(2 * n, 1));
    basis_.conservativeResize(Eigen::NoChange, grown);
    newton_coeffs_.conservativeResize(grown, Eigen::NoChange);
  }

  Vector column = kernel_.column(data_->inputs, row_span(data_->inputs, index));
  if (n > 0) column.noalias() -= basis_.leftCols(n) * basis_.row(index).head(n).transpose();
  column /= std::sqrt(pivot);
  basis_.col(n) = column;

  newton_coeffs_.row(n) = residuals_.row(index) / column(index);
  residuals_.noalias() -= column * newton_coeffs_.row(n);
  power_sq_.array() -= column.array().square();

  selected_.push_back(index);
  selected_mask_[static_cast<std::size_t>(index)] = true;
  last_leftover_ = power_sq_(index);
  for (Eigen::Index s : selected_) power_sq_(s) = 0.0;
}

KernelExpansion GreedyState::expansion() const {
  const Eigen::Index n = size();
  const Eigen::Index q = data_->output_dim();
  if (n == 0) return KernelExpansion(kernel_.shape(), data_->input_dim(), q);

  Matrix factor(n, n);
  PointSet centers(n, data_->input_dim());
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index idx = selected_[static_cast<std::size_t>(k)];
    factor.row(k) = basis_.row(idx).head(n);
    centers.row(k) = data_->inputs.row(idx);
  }
  // s(x) = k(x)^T L^{-T} c  =>  alpha = L^{-T} c
  Matrix coeffs = newton_coeffs_.topRows(n);
  factor.triangularView<Eigen::Lower>().transpose().solveInPlace(coeffs);
  return KernelExpansion(kernel_.shape(), std::move(centers), ValueSet(coeffs));
}

TrainResult train(const TrainingSet& data, const TrainConfig& cfg) {
  data.validate();
  cfg.validate();

  GreedyState state(data, GaussianKernel(cfg.epsilon));
  const Eigen::Index cap = std::min(data.size(), cfg.max_centers.value_or(data.size()));

  TrainResult result{KernelExpansion(cfg.epsilon, data.input_dim(), data.output_dim()),
                     TrainStatus::AllPointsSelected,
                     {},
                     {state.max_unselected_power_sq()},
                     {},
                     0.0};

  for (;;) {
    if (state.size() == data.size()) {
      result.status = TrainStatus::AllPointsSelected;
      break;
    }
    if (state.size() == cap) {
      result.status = TrainStatus::MaxCentersReached;
      break;
    }
    const auto next = state.select_next(cfg.rule, cfg.power_floor);
    if (!next) {
      result.status = TrainStatus::PowerFloorReached;
      break;
    }
    const double best = state.criterion(*next, cfg.rule);
    result.max_criterion_history.push_back(best);
    if (best <= cfg.tolerance) {
      result.status = TrainStatus::ToleranceReached;
      break;
    }
    state.update_basis(*next, cfg.power_floor);

    result.max_selected_power_sq = std::max(result.max_selected_power_sq, std::abs(state.last_pivot_leftover()));
    result.max_power_sq_history.push_back(state.max_unselected_power_sq());
  }

  result.selected = state.selected_indices();
  result.model = state.expansion();
  return result;
}

}  // namespace vkoga_ie
