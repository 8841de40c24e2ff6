#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vkoga_ie/vkoga.hpp"

namespace vkoga_ie {

struct CvConfig {
  int folds = 5;
  double grid_lo = 1e-4;
  double grid_hi = 1e2;
  int grid_count = 50;
  std::uint64_t seed = 0;
  // Template for the inner fits; its epsilon is overridden per grid point.
  TrainConfig train;
  // Inner fits use max_centers = min(train-fold size, center_cap) unless train.max_centers is set.
  Eigen::Index center_cap = 400;
  // Concurrent grid evaluations; 0 picks the hardware concurrency.
  unsigned jobs = 1;

  void validate() const;
};

// grid_count log-spaced values from grid_lo to grid_hi, ascending.
std::vector<ShapeParameter> epsilon_grid(const CvConfig& cfg);

// Seeded shuffle of 0..n-1 dealt round-robin into k folds.
std::vector<std::vector<Eigen::Index>> kfold_split(Eigen::Index n, int k, std::uint64_t seed);

struct CvScore {
  double epsilon;
  // Mean squared held-out error; +inf when training failed at this epsilon.
  double score;
  bool failed = false;
};

struct CvResult {
  ShapeParameter epsilon;
  std::vector<CvScore> scores;
};

// k-fold MSE of the greedy interpolant for every grid epsilon; returns the
// minimizer (smallest epsilon on ties). Throws std::runtime_error if every grid
// point failed.
CvResult select_epsilon(const TrainingSet& data, const CvConfig& cfg);

// Score of a single epsilon on precomputed folds.
double cross_validation_score(const TrainingSet& data, const std::vector<std::vector<Eigen::Index>>& folds,
                              const TrainConfig& train_cfg, Eigen::Index center_cap);

}  // namespace vkoga_ie
