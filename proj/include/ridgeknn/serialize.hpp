#pragma once

// JSON documents for models and results. Matrices are nested arrays in
// row-major order. Versioned documents carry "version": 1.

#include <nlohmann/json.hpp>

#include <fstream>
#include <string>

#include "ridgeknn/hubness.hpp"
#include "ridgeknn/modelselect.hpp"
#include "ridgeknn/pca.hpp"
#include "ridgeknn/split.hpp"
#include "ridgeknn/targets.hpp"
#include "ridgeknn/theory.hpp"
#include "ridgeknn/transform.hpp"

namespace ridgeknn {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

inline Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json vector_to_json(const Vector& v) {
  return Json(std::vector<double>(v.data(), v.data() + v.size()));
}

inline Matrix matrix_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) throw Error(what + ": expected an array of rows");
  const auto rows = static_cast<Index>(j.size());
  const Index cols = rows ? static_cast<Index>(j.front().size()) : 0;
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw Error(what + ": row " + std::to_string(i) + " has the wrong length");
    }
    for (Index c = 0; c < cols; ++c) m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

inline Vector vector_from_json(const Json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

inline void check_version(const Json& j, const std::string& what) {
  if (!j.contains("version") || j.at("version").get<int>() != kSchemaVersion) {
    throw Error(what + ": unsupported or missing schema version");
  }
}

// PcaModel

inline Json to_json(const PcaModel& m) {
  return {{"version", kSchemaVersion},
          {"d", m.input_dim()},
          {"r", m.output_dim()},
          {"mean", vector_to_json(m.mean)},
          {"components", matrix_to_json(m.components)},
          {"explained_variance", vector_to_json(m.explained_variance)}};
}

inline PcaModel pca_from_json(const Json& j) {
  check_version(j, "PCA model");
  PcaModel m;
  m.mean = vector_from_json(j.at("mean"));
  m.components = matrix_from_json(j.at("components"), "PCA components");
  m.explained_variance = vector_from_json(j.at("explained_variance"));
  if (m.components.rows() != m.mean.size() || m.components.cols() != m.explained_variance.size()) {
    throw Error("PCA model: inconsistent dimensions");
  }
  return m;
}

// Split

inline Json to_json(const Split& s) {
  return {{"version", kSchemaVersion},
          {"seed", s.seed},
          {"train_fraction", s.train_fraction},
          {"train", s.train},
          {"test", s.test}};
}

inline Split split_from_json(const Json& j) {
  check_version(j, "split");
  Split s;
  s.seed = j.at("seed").get<std::uint64_t>();
  s.train_fraction = j.at("train_fraction").get<double>();
  s.train = j.at("train").get<IndexList>();
  s.test = j.at("test").get<IndexList>();
  return s;
}

// TargetAssignment

inline Json to_json(const TargetAssignment& t) {
  return {{"k_targets", t.k_targets}, {"targets", t.targets_of}};
}

inline TargetAssignment targets_from_json(const Json& j) {
  TargetAssignment t;
  t.k_targets = j.at("k_targets").get<int>();
  t.targets_of = j.at("targets").get<std::vector<IndexList>>();
  return t;
}

// TransformModel

inline Json to_json(const TransformModel& m) {
  return {{"version", kSchemaVersion},
          {"direction", to_string(m.direction)},
          {"lambda", m.lambda},
          {"solver", to_string(m.solver)},
          {"d", m.dim()},
          {"W", matrix_to_json(m.W)}};
}

inline TransformModel transform_from_json(const Json& j) {
  check_version(j, "transform model");
  TransformModel m;
  m.direction = parse_direction(j.at("direction").get<std::string>());
  m.lambda = j.at("lambda").get<double>();
  m.solver = parse_solver(j.at("solver").get<std::string>());
  m.W = matrix_from_json(j.at("W"), "transform W");
  const auto d = j.at("d").get<Index>();
  if (m.W.rows() != d || m.W.cols() != d) {
    throw Error("transform model: W is not " + std::to_string(d) + "x" + std::to_string(d));
  }
  if (!m.W.allFinite()) throw Error("transform model: W has non-finite entries");
  return m;
}

// CvResult

inline Json to_json(const CvResult& r) {
  Json table = Json::array();
  for (const auto& c : r.table) {
    table.push_back({{"lambda", c.lambda},
                     {"k", c.k},
                     {"mean_accuracy", c.mean_accuracy},
                     {"std_accuracy", c.std_accuracy}});
  }
  return {{"version", kSchemaVersion}, {"best_lambda", r.best_lambda},
          {"best_k", r.best_k},        {"best_accuracy", r.best_accuracy},
          {"table", std::move(table)}, {"indices", r.indices},
          {"folds", r.folds}};
}

inline CvResult cv_result_from_json(const Json& j) {
  check_version(j, "CV result");
  CvResult r;
  r.best_lambda = j.at("best_lambda").get<double>();
  r.best_k = j.at("best_k").get<int>();
  r.best_accuracy = j.at("best_accuracy").get<double>();
  for (const auto& c : j.at("table")) {
    r.table.push_back({c.at("lambda").get<double>(), c.at("k").get<int>(),
                       c.at("mean_accuracy").get<double>(), c.at("std_accuracy").get<double>()});
  }
  r.indices = j.at("indices").get<IndexList>();
  r.folds = j.at("folds").get<std::vector<int>>();
  return r;
}

inline Json to_json(const CvConfig& c) {
  Json j = {{"lambda_grid", c.lambda_grid}, {"k_grid", c.k_grid},       {"n_folds", c.n_folds},
            {"seed", c.seed},               {"k_targets", c.k_targets}, {"solver", to_string(c.solver)}};
  j["direction"] = c.direction ? Json(to_string(*c.direction)) : Json("euclidean");
  return j;
}

// Theory and hubness results

inline Json to_json(const CentralityResult& r) {
  return {{"delta_hat", r.delta_hat},
          {"delta_theory", r.delta_theory},
          {"std_error", r.std_error},
          {"d", r.experiment.d},
          {"s", r.experiment.s},
          {"gamma", r.experiment.gamma},
          {"n_queries", r.experiment.n_queries},
          {"seed", r.experiment.seed},
          {"query_sd", r.experiment.query_sd},
          {"query_shift", r.experiment.query_shift}};
}

inline Json to_json(const HubnessRow& r) {
  return {{"method", r.method},
          {"k", r.k},
          {"skewness", r.skewness},
          {"max_count", r.max_count},
          {"mean_count", r.mean_count}};
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error("invalid JSON in '" + path + "': " + e.what());
  }
}

inline void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

}  // namespace ridgeknn
