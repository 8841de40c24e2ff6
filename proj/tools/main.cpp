#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "vkoga_ie/config.hpp"
#include "vkoga_ie/pipeline.hpp"

using namespace vkoga_ie;

namespace {

struct Options {
  std::string config;
  std::string model;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> jobs;
  std::optional<std::string> rule;
  std::optional<double> epsilon;
};

ExperimentConfig load(const Options& opt) {
  ExperimentConfig cfg = load_experiment_config(opt.config);
  if (opt.seed) {
    cfg.seed = *opt.seed;
    cfg.offline.cv.seed = *opt.seed;
  }
  if (opt.jobs) {
    cfg.jobs = *opt.jobs;
    cfg.offline.jobs = *opt.jobs;
    cfg.offline.cv.jobs = *opt.jobs;
  }
  if (opt.rule) cfg.offline.train.rule = parse_selection_rule(*opt.rule);
  if (opt.epsilon) cfg.offline.fixed_epsilon = *opt.epsilon;
  cfg.validate();
  return cfg;
}

std::string pick(const std::string& flag, const std::optional<std::filesystem::path>& from_config,
                 const std::string& fallback) {
  if (!flag.empty()) return flag;
  if (from_config) return from_config->string();
  return fallback;
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string mu_string(const Vector& mu) {
  std::string s;
  for (Eigen::Index i = 0; i < mu.size(); ++i) s += (i ? ";" : "") + fmt("%.10g", mu(i));
  return s;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

void write_cv_csv(const std::string& path, const std::vector<CvScore>& scores) {
  auto out = open_out(path);
  out << "epsilon,score,failed\n";
  for (const auto& s : scores) {
    out << fmt("%.17g", s.epsilon) << ',' << (s.failed ? "inf" : fmt("%.17g", s.score)) << ','
        << (s.failed ? 1 : 0) << '\n';
  }
}

int cmd_offline(const Options& opt) {
  const ExperimentConfig cfg = load(opt);
  const OfflineResult res = run_offline(cfg.offline);
  const SurrogateModel& model = res.model;
  const std::string model_path = pick(opt.out, cfg.output.model, "model.json");
  save_model(model, model_path);

  const auto& prov = model.provenance();
  std::cout << "training pairs N = " << prov.raw_pairs << " (" << prov.training_points << " after dedup)\n"
            << "selected centers n = " << model.expansion().size() << " (" << prov.train_status << ")\n"
            << "epsilon = " << fmt("%.6g", model.expansion().shape().value())
            << (prov.epsilon_from_cv ? " (cross validation)" : " (fixed)") << '\n';
  if (prov.epsilon_from_cv && cfg.output.cv) {
    write_cv_csv(cfg.output.cv->string(), prov.cv_scores);
    std::cout << "cv curve: " << cfg.output.cv->string() << '\n';
  }
  std::cout << "model: " << model_path << '\n';
  return 0;
}

int cmd_cv(const Options& opt) {
  const ExperimentConfig cfg = load(opt);
  const TrainingData data = generate_training_data(cfg.offline);
  CvConfig cv = cfg.offline.cv;
  cv.train = cfg.offline.train;
  const CvResult res = select_epsilon(data.assembled.data, cv);
  const std::string path = pick(opt.out, cfg.output.cv, "cv.csv");
  write_cv_csv(path, res.scores);
  std::cout << "selected epsilon = " << fmt("%.6g", res.epsilon.value()) << "\ncv table: " << path << '\n';
  return 0;
}

int cmd_online(const Options& opt) {
  if (opt.model.empty()) throw InputError("online needs --model");
  const ExperimentConfig cfg = load(opt);
  const SurrogateModel model = load_model(opt.model);
  const std::string path = pick(opt.out, std::nullopt, "online.csv");
  auto out = open_out(path);
  out << "mu,dt,mean_iterations,mean_initializer_residual,wall_time_s,dt_mismatch,failed\n";
  int status = 0;
  for (const auto& c : cfg.online.cases()) {
    const OnlineResult r = online(model, c.mu, c.dt, cfg.online.horizon);
    const RunReport& rep = r.report;
    out << mu_string(c.mu) << ',' << fmt("%.10g", c.dt) << ',' << fmt("%.6f", rep.mean_iterations) << ','
        << fmt("%.6e", rep.mean_initializer_residual) << ',' << fmt("%.6f", rep.wall_time_s) << ','
        << rep.dt_mismatch << ',' << rep.failed << '\n';
    std::cout << "mu = " << mu_string(c.mu) << " dt = " << fmt("%.6g", c.dt) << ": "
              << fmt("%.3f", rep.mean_iterations) << " iterations/step" << (rep.dt_mismatch ? " [dt not trained]" : "")
              << '\n';
    if (rep.failed) {
      std::cerr << "warning: run failed: " << rep.error << '\n';
      status = 1;
    }
  }
  std::cout << "report: " << path << '\n';
  return status;
}

std::string table(const ComparisonReport& rep, bool by_dt) {
  const auto label = [&](const AggregateRow& row) -> std::string {
    if (!row.source) return "";
    const ComparisonRow& r = rep.rows[*row.source];
    return by_dt ? fmt("%.4g", r.dt) : "(" + mu_string(r.mu) + ")";
  };
  std::string s;
  char line[256];
  std::snprintf(line, sizeof line, "%-5s | %9s %9s | %9s %9s | %9s %9s | %s\n", "", "old iter", "old time",
                "vkoga it", "vkoga tm", "gain it%", "gain tm%", by_dt ? "dt" : "mu");
  s += line;
  const std::pair<const char*, const AggregateRow*> rows[] = {{"Mean", &rep.mean}, {"Min", &rep.min}, {"Max", &rep.max}};
  for (const auto& [name, row] : rows) {
    std::snprintf(line, sizeof line, "%-5s | %9.2f %9.3f | %9.2f %9.3f | %9.2f %9.2f | %s\n", name, row->iter_old,
                  row->time_old_s, row->iter_vkoga, row->time_vkoga_s, row->gain_iter_pct, row->gain_time_pct,
                  label(*row).c_str());
    s += line;
  }
  s += "iteration gains are implementation independent; time gains are informational\n";
  return s;
}

int cmd_bench(const Options& opt) {
  if (opt.model.empty()) throw InputError("bench needs --model");
  const ExperimentConfig cfg = load(opt);
  const SurrogateModel model = load_model(opt.model);
  const ComparisonReport rep = compare(model, cfg.online.cases(), cfg.online.horizon, cfg.online.repetitions);

  const std::string path = pick(opt.out, cfg.output.report, "bench.csv");
  auto out = open_out(path);
  out << "mu,dt,iter_old,iter_vkoga,time_old_s,time_vkoga_s,gain_iter_pct,gain_time_pct\n";
  for (const auto& r : rep.rows) {
    out << mu_string(r.mu) << ',' << fmt("%.10g", r.dt) << ',';
    if (r.ok) {
      out << fmt("%.6f", r.iter_old) << ',' << fmt("%.6f", r.iter_vkoga) << ',' << fmt("%.6f", r.time_old_s) << ','
          << fmt("%.6f", r.time_vkoga_s) << ',' << fmt("%.4f", r.gain_iter_pct) << ','
          << fmt("%.4f", r.gain_time_pct) << '\n';
    } else {
      out << "nan,nan,nan,nan,nan,nan\n";
    }
  }

  const bool by_dt = cfg.online.params.size() == 1 && cfg.online.dts.size() > 1;
  const std::string text = table(rep, by_dt);
  std::cout << text;
  auto txt = open_out(std::filesystem::path(path).replace_extension(".txt").string());
  txt << text;
  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << "report: " << path << '\n';
  return rep.failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kernel surrogate initialization for implicit Euler"};
  app.require_subcommand(1);
  Options opt;

  const auto common = [&](CLI::App* sub, bool needs_model) {
    sub->add_option("--config", opt.config, "Experiment config file")->required()->check(CLI::ExistingFile);
    auto* m = sub->add_option("--model", opt.model, "Model file");
    if (needs_model) m->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "Output path");
    sub->add_option("--seed", opt.seed, "Fold shuffling seed");
    sub->add_option("--jobs", opt.jobs, "Concurrent jobs");
    sub->add_option("--rule", opt.rule, "Greedy selection rule")->check(CLI::IsMember({"f", "p", "fp"}));
    sub->add_option("--epsilon", opt.epsilon, "Fixed shape parameter (skips cross validation)")
        ->check(CLI::PositiveNumber);
  };
  auto* offline_cmd = app.add_subcommand("offline", "Generate trajectories and train a model");
  auto* online_cmd = app.add_subcommand("online", "Integrate the test cases with the surrogate initializer");
  auto* bench_cmd = app.add_subcommand("bench", "Compare previous-value and surrogate initialization");
  auto* cv_cmd = app.add_subcommand("cv", "Cross-validation curve for the shape parameter");
  common(offline_cmd, false);
  common(online_cmd, true);
  common(bench_cmd, true);
  common(cv_cmd, false);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*offline_cmd) return cmd_offline(opt);
    if (*online_cmd) return cmd_online(opt);
    if (*bench_cmd) return cmd_bench(opt);
    if (*cv_cmd) return cmd_cv(opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
