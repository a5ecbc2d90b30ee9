#pragma once

#include <numeric>
#include <optional>

#include "ridgeknn/experiment.hpp"
#include "ridgeknn/serialize.hpp"

namespace ridgeknn {

/// Settings for fitting a standalone classifier on one labeled file. An
/// absent lambda or k is chosen by cross validation on the same data.
struct ClassifierOptions {
  Method method = Method::MoveLabeled;
  std::optional<double> lambda;
  std::optional<int> k;
  bool center = true;
  bool zscore = false;
  std::optional<Index> pca_dim;
  CvConfig cv;
};

/// Preprocessing, labeled reference set and learned map, enough to classify
/// raw query rows without the training file.
struct Classifier {
  Method method = Method::Euclidean;
  int k = 1;
  std::optional<ColumnScaling> scaling;
  std::optional<PcaModel> pca;
  std::optional<TransformModel> transform;
  Matrix labeled;  // preprocessed, one row per object
  LabelList labels;
  std::vector<std::string> label_names;
  std::optional<CvResult> cv;

  Matrix preprocess(const Matrix& raw) const {
    Matrix x = scaling ? scaling->apply(raw) : raw;
    return pca ? apply_pca(*pca, x) : x;
  }

  KnnModel knn() const {
    return {labeled, labels, k,
            transform ? Dissimilarity::from(*transform) : Dissimilarity::euclidean()};
  }

  LabelList predict(const Matrix& raw) const { return knn().predict(preprocess(raw)); }

  std::string label_name(Label y) const {
    return y >= 0 && static_cast<std::size_t>(y) < label_names.size()
               ? label_names[static_cast<std::size_t>(y)]
               : std::to_string(y);
  }
};

inline Classifier fit_classifier(const Dataset& ds, const ClassifierOptions& opt) {
  ds.validate();
  if (opt.k) require(*opt.k >= 1, "k must be positive");
  if (opt.lambda) require(*opt.lambda >= 0.0, "lambda must be non-negative");
  Classifier c;
  c.method = opt.method;
  c.labels = ds.labels;
  c.label_names = ds.label_names;
  if (c.label_names.empty()) {
    for (int y = 0; y < ds.class_count; ++y) c.label_names.push_back(std::to_string(y));
  }
  if (opt.zscore) c.scaling = fit_zscore(ds.features);
  else if (opt.center) c.scaling = fit_centering(ds.features);
  Matrix x = c.scaling ? c.scaling->apply(ds.features) : ds.features;
  if (opt.pca_dim) {
    c.pca = fit_pca(x, *opt.pca_dim);
    x = apply_pca(*c.pca, x);
  }
  c.labeled = x;

  const auto direction = direction_of(opt.method);
  double lambda = opt.lambda.value_or(0.0);
  c.k = opt.k.value_or(1);
  if (!opt.k || (direction && !opt.lambda)) {
    CvConfig cv = opt.cv;
    cv.direction = direction;
    if (opt.k) cv.k_grid = {*opt.k};
    if (opt.lambda || !direction) cv.lambda_grid = {lambda};
    IndexList all(ds.labels.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    c.cv = grid_search(ds.with_features(x), all, cv);
    lambda = c.cv->best_lambda;
    c.k = c.cv->best_k;
  }
  require(static_cast<Index>(c.k) <= x.rows(), "k exceeds the number of labeled objects");
  if (direction) {
    c.transform = fit_transform(x, select_targets(x, ds.labels, opt.cv.k_targets), *direction,
                                lambda, opt.cv.solver);
  }
  return c;
}

inline Json to_json(const Classifier& c) {
  Json j = {{"version", kSchemaVersion},
            {"method", to_string(c.method)},
            {"k", c.k},
            {"labeled", matrix_to_json(c.labeled)},
            {"labels", c.labels},
            {"label_names", c.label_names}};
  j["scaling"] = c.scaling ? Json{{"offset", vector_to_json(c.scaling->offset)},
                                  {"scale", vector_to_json(c.scaling->scale)}}
                           : Json(nullptr);
  j["pca"] = c.pca ? to_json(*c.pca) : Json(nullptr);
  j["transform"] = c.transform ? to_json(*c.transform) : Json(nullptr);
  j["cv"] = c.cv ? to_json(*c.cv) : Json(nullptr);
  return j;
}

inline Classifier classifier_from_json(const Json& j) {
  check_version(j, "classifier");
  Classifier c;
  c.method = parse_method(j.at("method").get<std::string>());
  c.k = j.at("k").get<int>();
  c.labeled = matrix_from_json(j.at("labeled"), "labeled points");
  c.labels = j.at("labels").get<LabelList>();
  c.label_names = j.at("label_names").get<std::vector<std::string>>();
  if (!j.at("scaling").is_null()) {
    c.scaling = ColumnScaling{vector_from_json(j.at("scaling").at("offset")),
                              vector_from_json(j.at("scaling").at("scale"))};
  }
  if (!j.at("pca").is_null()) c.pca = pca_from_json(j.at("pca"));
  if (!j.at("transform").is_null()) c.transform = transform_from_json(j.at("transform"));
  if (j.contains("cv") && !j.at("cv").is_null()) c.cv = cv_result_from_json(j.at("cv"));
  if (static_cast<Index>(c.labels.size()) != c.labeled.rows()) {
    throw Error("classifier: label count does not match labeled rows");
  }
  if (c.transform && c.transform->dim() != c.labeled.cols()) {
    throw Error("classifier: transform dimension does not match labeled points");
  }
  if (c.method != Method::Euclidean && !c.transform) {
    throw Error("classifier: method " + to_string(c.method) + " needs a transform");
  }
  return c;
}

}  // namespace ridgeknn
