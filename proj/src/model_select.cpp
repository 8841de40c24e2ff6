#include "vkoga_ie/model_select.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

namespace vkoga_ie {

void CvConfig::validate() const {
  if (folds < 2) throw InputError("cross validation needs at least 2 folds, got " + std::to_string(folds));
  if (!(grid_lo > 0.0) || !(grid_hi > grid_lo)) throw InputError("epsilon grid needs 0 < lo < hi");
  if (grid_count < 2) throw InputError("epsilon grid needs at least 2 values");
  if (center_cap < 1) throw InputError("center cap must be positive");
  train.validate();
}

std::vector<ShapeParameter> epsilon_grid(const CvConfig& cfg) {
  cfg.validate();
  const double lo = std::log10(cfg.grid_lo);
  const double hi = std::log10(cfg.grid_hi);
  std::vector<ShapeParameter> grid;
  grid.reserve(static_cast<std::size_t>(cfg.grid_count));
  for (int k = 0; k < cfg.grid_count; ++k) {
    if (k == 0) {
      grid.emplace_back(cfg.grid_lo);
    } else if (k == cfg.grid_count - 1) {
      grid.emplace_back(cfg.grid_hi);
    } else {
      grid.emplace_back(std::pow(10.0, lo + k * (hi - lo) / (cfg.grid_count - 1)));
    }
  }
  return grid;
}

std::vector<std::vector<Eigen::Index>> kfold_split(Eigen::Index n, int k, std::uint64_t seed) {
  if (k < 2) throw InputError("kfold_split: need k >= 2");
  if (n < k) throw InputError("kfold_split: " + std::to_string(n) + " points cannot fill " + std::to_string(k) + " folds");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<Eigen::Index>> folds(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < order.size(); ++i) folds[i % folds.size()].push_back(order[i]);
  for (auto& fold : folds) std::sort(fold.begin(), fold.end());
  return folds;
}

double cross_validation_score(const TrainingSet& data, const std::vector<std::vector<Eigen::Index>>& folds,
                              const TrainConfig& train_cfg, Eigen::Index center_cap) {
  std::vector<bool> held(static_cast<std::size_t>(data.size()));
  double total = 0.0;
  for (const auto& fold : folds) {
    std::fill(held.begin(), held.end(), false);
    for (Eigen::Index i : fold) held[static_cast<std::size_t>(i)] = true;
    std::vector<Eigen::Index> train_rows;
    train_rows.reserve(static_cast<std::size_t>(data.size()) - fold.size());
    for (Eigen::Index i = 0; i < data.size(); ++i) {
      if (!held[static_cast<std::size_t>(i)]) train_rows.push_back(i);
    }
    const TrainingSet train_part = data.subset(train_rows);
    TrainConfig cfg = train_cfg;
    if (!cfg.max_centers) cfg.max_centers = std::min(train_part.size(), center_cap);
    const TrainResult fit = train(train_part, cfg);

    double sq = 0.0;
    for (Eigen::Index i : fold) {
      const Vector pred = fit.model.evaluate(row_span(data.inputs, i));
      sq += (pred - data.targets.row(i).transpose()).squaredNorm();
    }
    total += sq / (static_cast<double>(fold.size()) * static_cast<double>(data.output_dim()));
  }
  return total / static_cast<double>(folds.size());
}

CvResult select_epsilon(const TrainingSet& data, const CvConfig& cfg) {
  cfg.validate();
  data.validate();
  const auto grid = epsilon_grid(cfg);
  const auto folds = kfold_split(data.size(), cfg.folds, cfg.seed);

  std::vector<CvScore> scores(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t g = next++; g < grid.size(); g = next++) {
      TrainConfig train_cfg = cfg.train;
      train_cfg.epsilon = grid[g];
      CvScore& s = scores[g];
      s.epsilon = grid[g].value();
      try {
        s.score = cross_validation_score(data, folds, train_cfg, cfg.center_cap);
        if (!std::isfinite(s.score)) {
          s.score = std::numeric_limits<double>::infinity();
          s.failed = true;
        }
      } catch (const std::exception&) {
        s.score = std::numeric_limits<double>::infinity();
        s.failed = true;
      }
    }
  };

  unsigned jobs = cfg.jobs == 0 ? std::max(1U, std::thread::hardware_concurrency()) : cfg.jobs;
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(grid.size()));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }

  std::optional<std::size_t> best;
  for (std::size_t g = 0; g < scores.size(); ++g) {
    if (scores[g].failed) continue;
    if (!best || scores[g].score < scores[*best].score) best = g;
  }
  if (!best) throw std::runtime_error("cross validation failed at every grid epsilon");
  return {grid[*best], std::move(scores)};
}

}  // namespace vkoga_ie
