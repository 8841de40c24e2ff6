#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "vkoga_ie/pipeline.hpp"

namespace vkoga_ie {

using nlohmann::json;

namespace {

json rows_to_json(const PointSet& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out.push_back(std::vector<double>(m.row(i).data(), m.row(i).data() + m.cols()));
  }
  return out;
}

json vector_to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector vector_from_json(const json& j, const char* what) {
  if (!j.is_array()) throw ModelFormatError(std::string(what) + " must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Eigen::Index>(k)) = j[k].get<double>();
  return v;
}

PointSet rows_from_json(const json& j, Eigen::Index cols, const char* what) {
  if (!j.is_array()) throw ModelFormatError(std::string(what) + " must be an array of rows");
  PointSet m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& row = j[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ModelFormatError(std::string(what) + " row " + std::to_string(i) + " has wrong length");
    }
    for (std::size_t k = 0; k < row.size(); ++k) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k].get<double>();
  }
  return m;
}

json provenance_to_json(const Provenance& p) {
  json runs = json::array();
  for (const auto& r : p.runs) runs.push_back({{"mu", vector_to_json(r.mu)}, {"dt", r.dt}});
  json scores = json::array();
  for (const auto& s : p.cv_scores) {
    // JSON has no infinity; failed grid points carry a null score
    scores.push_back({{"epsilon", s.epsilon},
                      {"score", std::isfinite(s.score) ? json(s.score) : json(nullptr)},
                      {"failed", s.failed}});
  }
  return {{"problem", {{"id", p.problem.id}, {"cells", p.problem.cells}, {"half_width", p.problem.half_width}}},
          {"training_runs", runs},
          {"train_horizon", p.train_horizon},
          {"selection_rule", to_string(p.rule)},
          {"tolerance", p.tolerance},
          {"max_centers", p.max_centers ? json(*p.max_centers) : json(nullptr)},
          {"epsilon_source", p.epsilon_from_cv ? "cross_validation" : "fixed"},
          {"cv_scores", scores},
          {"raw_pairs", p.raw_pairs},
          {"training_points", p.training_points},
          {"train_status", p.train_status},
          {"initial_condition", p.initial_condition}};
}

Provenance provenance_from_json(const json& j) {
  Provenance p;
  const auto& prob = j.at("problem");
  p.problem.id = prob.at("id").get<std::string>();
  p.problem.cells = prob.at("cells").get<Eigen::Index>();
  p.problem.half_width = prob.at("half_width").get<double>();
  for (const auto& r : j.at("training_runs")) p.runs.push_back({vector_from_json(r.at("mu"), "mu"), r.at("dt").get<double>()});
  p.train_horizon = j.at("train_horizon").get<double>();
  p.rule = parse_selection_rule(j.at("selection_rule").get<std::string>());
  p.tolerance = j.at("tolerance").get<double>();
  if (!j.at("max_centers").is_null()) p.max_centers = j.at("max_centers").get<Eigen::Index>();
  p.epsilon_from_cv = j.at("epsilon_source").get<std::string>() == "cross_validation";
  for (const auto& s : j.at("cv_scores")) {
    const bool failed = s.at("failed").get<bool>();
    const double score = s.at("score").is_null() ? std::numeric_limits<double>::infinity() : s.at("score").get<double>();
    p.cv_scores.push_back({s.at("epsilon").get<double>(), score, failed});
  }
  p.raw_pairs = j.at("raw_pairs").get<Eigen::Index>();
  p.training_points = j.at("training_points").get<Eigen::Index>();
  p.train_status = j.at("train_status").get<std::string>();
  p.initial_condition = j.at("initial_condition").get<std::string>();
  return p;
}

}  // namespace

std::string model_to_json(const SurrogateModel& model) {
  const auto& exp = model.expansion();
  json j;
  j["format_version"] = kModelFormatVersion;
  j["problem_id"] = model.provenance().problem.id;
  j["input_dim"] = exp.input_dim();
  j["output_dim"] = exp.output_dim();
  j["epsilon"] = exp.shape().value();
  if (model.normalization()) {
    j["normalization"] = {{"offset", vector_to_json(model.normalization()->offset)},
                          {"scale", vector_to_json(model.normalization()->scale)}};
  } else {
    j["normalization"] = nullptr;
  }
  j["centers"] = rows_to_json(exp.centers());
  j["coefficients"] = rows_to_json(exp.coefficients());
  j["provenance"] = provenance_to_json(model.provenance());
  return j.dump(1);
}

SurrogateModel model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& ex) {
    throw ModelFormatError(std::string("model file is not valid JSON: ") + ex.what());
  }
  try {
    const int version = j.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
      throw ModelFormatError("unsupported model format version " + std::to_string(version) + " (expected " +
                             std::to_string(kModelFormatVersion) + ")");
    }
    const auto input_dim = j.at("input_dim").get<Eigen::Index>();
    const auto output_dim = j.at("output_dim").get<Eigen::Index>();
    if (input_dim < 1 || output_dim < 1) throw ModelFormatError("model dimensions must be positive");
    PointSet centers = rows_from_json(j.at("centers"), input_dim, "centers");
    ValueSet coefficients = rows_from_json(j.at("coefficients"), output_dim, "coefficients");
    if (centers.rows() != coefficients.rows()) throw ModelFormatError("centers and coefficients differ in count");

    std::optional<InputNormalization> normalization;
    if (!j.at("normalization").is_null()) {
      normalization = InputNormalization{vector_from_json(j["normalization"].at("offset"), "offset"),
                                         vector_from_json(j["normalization"].at("scale"), "scale")};
    }
    Provenance prov = provenance_from_json(j.at("provenance"));
    if (prov.problem.id != j.at("problem_id").get<std::string>()) {
      throw ModelFormatError("problem_id disagrees with provenance");
    }
    const ShapeParameter eps(j.at("epsilon").get<double>());
    KernelExpansion exp = centers.rows() == 0 ? KernelExpansion(eps, input_dim, output_dim)
                                              : KernelExpansion(eps, std::move(centers), std::move(coefficients));
    return SurrogateModel(std::move(exp), std::move(normalization), std::move(prov));
  } catch (const ModelFormatError&) {
    throw;
  } catch (const std::exception& ex) {
    throw ModelFormatError(std::string("malformed model file: ") + ex.what());
  }
}

void save_model(const SurrogateModel& model, const std::filesystem::path& path) {
  const std::string text = model_to_json(model);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write model file " + tmp.string());
    out << text << '\n';
    if (!out) throw std::runtime_error("failed writing model file " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

SurrogateModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read model file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace vkoga_ie
