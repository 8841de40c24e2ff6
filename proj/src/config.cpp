#include "vkoga_ie/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "vkoga_ie/errors.hpp"

namespace vkoga_ie {

namespace {

InputError config_error(const std::string& what) { return InputError("config: " + what); }

Vector to_vector(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence()) throw config_error(key + " must be a list of numbers");
  Vector v(static_cast<Eigen::Index>(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i) v(static_cast<Eigen::Index>(i)) = node[i].as<double>();
  return v;
}

template <class T>
void read(const YAML::Node& node, const char* key, T& out) {
  if (const YAML::Node v = node[key]) out = v.as<T>();
}

ProblemDescriptor parse_problem(const YAML::Node& node) {
  ProblemDescriptor p;
  if (!node) return p;
  read(node, "id", p.id);
  if (const YAML::Node c = node["cells"]) p.cells = c.as<long>();
  read(node, "half_width", p.half_width);
  return p;
}

CvConfig parse_cv(const YAML::Node& node) {
  CvConfig cv;
  if (!node) return cv;
  read(node, "folds", cv.folds);
  read(node, "grid_lo", cv.grid_lo);
  read(node, "grid_hi", cv.grid_hi);
  read(node, "grid_count", cv.grid_count);
  if (const YAML::Node c = node["center_cap"]) cv.center_cap = c.as<long>();
  return cv;
}

OfflineConfig parse_offline(const YAML::Node& node, const ProblemDescriptor& problem) {
  if (!node) throw config_error("missing offline section");
  OfflineConfig cfg;
  cfg.problem = problem;
  read(node, "train_horizon", cfg.train_horizon);
  const YAML::Node runs = node["runs"];
  if (!runs || !runs.IsSequence()) throw config_error("offline.runs must be a list");
  for (const auto& r : runs) {
    if (!r["mu"] || !r["dt"]) throw config_error("each offline run needs mu and dt");
    cfg.runs.push_back({to_vector(r["mu"], "offline.runs.mu"), r["dt"].as<double>()});
  }
  if (const YAML::Node e = node["epsilon"]) cfg.fixed_epsilon = e.as<double>();
  if (const YAML::Node r = node["rule"]) cfg.train.rule = parse_selection_rule(r.as<std::string>());
  read(node, "tolerance", cfg.train.tolerance);
  if (const YAML::Node m = node["max_centers"]) cfg.train.max_centers = m.as<long>();
  read(node, "normalize_inputs", cfg.normalize_inputs);
  cfg.cv = parse_cv(node["cv"]);
  return cfg;
}

OnlineConfig parse_online(const YAML::Node& node) {
  OnlineConfig on;
  if (!node) return on;
  read(node, "horizon", on.horizon);
  read(node, "repetitions", on.repetitions);

  if (const YAML::Node list = node["params"]) {
    for (const auto& p : list) on.params.push_back(to_vector(p, "online.params"));
  }
  if (const YAML::Node grid = node["param_grid"]) {
    const Vector center = to_vector(grid["center"], "online.param_grid.center");
    const Vector step = to_vector(grid["step"], "online.param_grid.step");
    const Vector offsets = to_vector(grid["offsets"], "online.param_grid.offsets");
    if (center.size() != 2 || step.size() != 2) throw config_error("param_grid supports two parameters");
    for (double i : offsets) {
      for (double j : offsets) on.params.push_back(Vector{{center(0) + i * step(0), center(1) + j * step(1)}});
    }
  }

  if (const YAML::Node dt = node["dt"]) {
    if (dt.IsSequence()) {
      for (const auto& v : dt) on.dts.push_back(v.as<double>());
    } else {
      on.dts.push_back(dt.as<double>());
    }
  }
  if (const YAML::Node dl = node["dt_log"]) {
    auto values = log_spaced(dl["lo"].as<double>(), dl["hi"].as<double>(), dl["count"].as<int>());
    bool snap = false;
    read(dl, "snap_to_horizon", snap);
    // Implicit Euler needs horizon / dt to be an integer.
    if (snap) {
      for (double& dt : values) dt = on.horizon / std::max(1.0, std::round(on.horizon / dt));
    }
    on.dts.insert(on.dts.end(), values.begin(), values.end());
  }
  return on;
}

}  // namespace

std::vector<TestCase> OnlineConfig::cases() const {
  std::vector<TestCase> out;
  for (const auto& mu : params)
    for (double dt : dts) out.push_back({mu, dt});
  return out;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) throw config_error("log_spaced needs 0 < lo < hi and count >= 2");
  std::vector<double> out(static_cast<std::size_t>(count));
  const double a = std::log10(lo), b = std::log10(hi);
  for (int k = 0; k < count; ++k) out[static_cast<std::size_t>(k)] = std::pow(10.0, a + k * (b - a) / (count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

void ExperimentConfig::validate() const {
  offline.validate();
  if (online.repetitions < 1) throw config_error("online.repetitions must be >= 1");
  if (!(online.horizon > 0.0)) throw config_error("online.horizon must be positive");
  for (double dt : online.dts) step_count(dt, online.horizon);
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw config_error(e.what());
  }
  if (!root.IsMap()) throw config_error("top level must be a mapping");

  ExperimentConfig cfg;
  try {
    read(root, "name", cfg.name);
    read(root, "seed", cfg.seed);
    read(root, "jobs", cfg.jobs);
    const ProblemDescriptor problem = parse_problem(root["problem"]);
    cfg.offline = parse_offline(root["offline"], problem);
    cfg.offline.cv.seed = cfg.seed;
    cfg.offline.cv.jobs = cfg.jobs;
    cfg.offline.jobs = cfg.jobs;
    cfg.online = parse_online(root["online"]);
    if (const YAML::Node out = root["output"]) {
      if (out["model"]) cfg.output.model = out["model"].as<std::string>();
      if (out["report"]) cfg.output.report = out["report"].as<std::string>();
      if (out["cv"]) cfg.output.cv = out["cv"].as<std::string>();
    }
  } catch (const YAML::Exception& e) {
    throw config_error(e.what());
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

}  // namespace vkoga_ie
