#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ridgeknn/ridgeknn.hpp"

using namespace ridgeknn;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_iris_config() {
  ExperimentConfig cfg;
  cfg.dataset_path = RIDGEKNN_IRIS_CSV;
  cfg.methods = {Method::Euclidean, Method::MoveLabeled};
  cfg.n_splits = 2;
  cfg.cv.lambda_grid = {0.1, 1.0};
  cfg.cv.k_grid = {1, 3};
  cfg.cv_grids_are_defaults = false;
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("ridgeknn_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST(Method, NamesRoundTrip) {
  for (auto m : {Method::Euclidean, Method::MoveLabeled, Method::MoveQuery})
    EXPECT_EQ(parse_method(to_string(m)), m);
  EXPECT_THROW(parse_method("moved"), InvalidArgument);
  EXPECT_FALSE(direction_of(Method::Euclidean).has_value());
  EXPECT_EQ(direction_of(Method::MoveQuery), Direction::MoveQuery);
}

TEST(RunExperiment, SingleEuclideanSplit) {
  auto cfg = small_iris_config();
  cfg.methods = {Method::Euclidean};
  cfg.n_splits = 1;
  const auto r = run_experiment(cfg);
  ASSERT_EQ(r.rows.size(), 1u);
  const auto& row = r.rows[0];
  ASSERT_TRUE(row.ok()) << row.error;
  EXPECT_EQ(row.train_seconds, 0.0);
  EXPECT_FALSE(row.lambda.has_value());
  EXPECT_FALSE(row.solver_gap.has_value());
  EXPECT_GE(row.accuracy, 0.85);
  EXPECT_TRUE(row.skewness.has_value());
  EXPECT_EQ(r.n, 150);
  EXPECT_EQ(r.d, 4);
  EXPECT_EQ(r.classes, 3);
  ASSERT_EQ(r.hubness.size(), 1u);
  EXPECT_EQ(r.hubness[0].size(), 1u);
}

TEST(RunExperiment, IrisTwoMethods) {
  const auto r = run_experiment(small_iris_config());
  ASSERT_EQ(r.rows.size(), 4u);
  EXPECT_TRUE(r.ok());
  for (const auto& row : r.rows) {
    EXPECT_GE(row.accuracy, 0.85) << to_string(row.method) << " split " << row.split;
    EXPECT_EQ(row.split_seed, 1u + static_cast<std::uint64_t>(row.split));
    if (row.method == Method::MoveLabeled) {
      ASSERT_TRUE(row.lambda.has_value());
      EXPECT_TRUE(*row.lambda == 0.1 || *row.lambda == 1.0);
      ASSERT_TRUE(row.solver_gap.has_value());
      EXPECT_GE(*row.solver_gap, 0.0);
      EXPECT_GE(row.train_seconds, 0.0);
    }
  }
  ASSERT_EQ(r.summary.size(), 2u);
  EXPECT_EQ(r.summary[0].splits, 2);
  EXPECT_NEAR(r.summary[0].accuracy_mean, (r.rows[0].accuracy + r.rows[2].accuracy) / 2, 1e-15);
  ASSERT_NE(r.find(Method::MoveLabeled), nullptr);
  EXPECT_EQ(r.find(Method::MoveQuery), nullptr);
  EXPECT_EQ(r.hubness[1].size(), 2u);
}

TEST(RunExperiment, ReproducibleApartFromTiming) {
  const auto a = run_experiment(small_iris_config());
  const auto b = run_experiment(small_iris_config());
  EXPECT_EQ(mask_timing(to_json(a)).dump(), mask_timing(to_json(b)).dump());
  auto other = small_iris_config();
  other.seed = 7;
  EXPECT_NE(mask_timing(to_json(run_experiment(other))).dump(), mask_timing(to_json(a)).dump());
}

TEST(RunExperiment, ErrorRowsArePreserved) {
  Dataset ds;
  ds.features = Matrix::Random(24, 3);
  for (int i = 0; i < 24; ++i) ds.labels.push_back(i < 21 ? i % 3 : 3);
  ds.class_count = 4;
  ExperimentConfig cfg;
  cfg.methods = {Method::Euclidean, Method::MoveQuery};
  cfg.n_splits = 1;
  cfg.cv.k_grid = {1};
  const auto r = run_experiment(cfg, ds);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_FALSE(r.ok());
  EXPECT_EQ(r.rows[0].error.rfind("split 0, method euclidean: ", 0), 0u) << r.rows[0].error;
  EXPECT_EQ(r.rows[1].error.rfind("split 0, method move-query: ", 0), 0u) << r.rows[1].error;
  EXPECT_EQ(r.summary[0].splits, 0);

  const auto j = to_json(r);
  EXPECT_TRUE(j.at("rows")[0].at("error").is_string());
  std::ostringstream table;
  write_table(table, r);
  EXPECT_NE(table.str().find("ERROR"), std::string::npos);
}

TEST(ExperimentConfig, JsonRoundTripAndPathResolution) {
  auto cfg = small_iris_config();
  cfg.dataset_path = "iris.csv";
  cfg.pca_dim = 3;
  cfg.zscore = true;
  cfg.cv.k_targets = 2;
  cfg.cv.solver = Solver::ExactMinimizer;
  cfg.hubness_k = 5;
  const auto j = Json::parse(to_json(cfg).dump());
  const auto back = config_from_json(j, "/data/sets");
  EXPECT_EQ(back.dataset_path, "/data/sets/iris.csv");
  EXPECT_EQ(back.pca_dim, Index{3});
  EXPECT_TRUE(back.zscore);
  EXPECT_EQ(back.methods, cfg.methods);
  EXPECT_EQ(back.n_splits, 2);
  EXPECT_EQ(back.cv.lambda_grid, cfg.cv.lambda_grid);
  EXPECT_EQ(back.cv.k_grid, cfg.cv.k_grid);
  EXPECT_EQ(back.cv.k_targets, 2);
  EXPECT_EQ(back.cv.solver, Solver::ExactMinimizer);
  EXPECT_EQ(back.hubness_k, 5);
  EXPECT_FALSE(back.cv_grids_are_defaults);

  const auto defaults = config_from_json(Json{{"dataset", "/abs/x.csv"}}, "/data/sets");
  EXPECT_EQ(defaults.dataset_path, "/abs/x.csv");
  EXPECT_TRUE(defaults.cv_grids_are_defaults);
  EXPECT_EQ(defaults.methods.size(), 3u);
}

TEST(ExperimentConfig, SyntheticSpecRoundTrip) {
  ExperimentConfig cfg;
  cfg.synthetic = GaussianMixtureSpec{};
  cfg.synthetic->n = 200;
  cfg.synthetic->seed = 9;
  const auto back = config_from_json(Json::parse(to_json(cfg).dump()));
  ASSERT_TRUE(back.synthetic.has_value());
  EXPECT_EQ(back.synthetic->n, 200);
  EXPECT_EQ(back.synthetic->seed, 9u);
  EXPECT_EQ(back.synthetic->separation, cfg.synthetic->separation);
  EXPECT_EQ(load_experiment_dataset(back).size(), 200);
}

TEST(ExperimentConfig, InvalidValuesRejected) {
  EXPECT_THROW(config_from_json(Json{{"splits", 0}}), InvalidArgument);
  EXPECT_THROW(config_from_json(Json{{"train_fraction", 1.0}}), InvalidArgument);
  EXPECT_THROW(config_from_json(Json{{"methods", Json::array()}}), InvalidArgument);
  EXPECT_THROW(config_from_json(Json{{"methods", {"nearest"}}}), InvalidArgument);
  EXPECT_THROW(load_experiment_dataset(ExperimentConfig{}), InvalidArgument);
}

TEST(WriteReport, FilesPresentAndSchemaValid) {
  const auto r = run_experiment(small_iris_config());
  const auto dir = scratch("report");
  write_report(r, dir);
  for (const char* f : {"report.json", "report.txt", "rows.csv", "hubness_split0.csv", "hubness_split1.csv"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;

  const auto j = read_json_file((dir / "report.json").string());
  for (const char* key : {"version", "dataset", "n", "d", "classes", "config", "rows", "summary", "hubness"})
    EXPECT_TRUE(j.contains(key)) << key;
  ASSERT_EQ(j.at("rows").size(), 4u);
  for (const auto& row : j.at("rows")) {
    for (const char* key : {"method", "split", "split_seed", "accuracy", "skewness", "lambda", "k",
                            "cv_accuracy", "solver_gap", "train_seconds", "error"})
      EXPECT_TRUE(row.contains(key)) << key;
    EXPECT_TRUE(row.at("accuracy").is_number());
    EXPECT_TRUE(row.at("error").is_null());
  }
  EXPECT_EQ(j.at("summary").size(), 2u);
  EXPECT_EQ(j.at("hubness").size(), 2u);

  const auto csv = slurp(dir / "rows.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "method,split,split_seed,accuracy,skewness,lambda,k,cv_accuracy,solver_gap,train_seconds");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  EXPECT_NE(slurp(dir / "report.txt").find("move-labeled"), std::string::npos);
  fs::remove_all(dir);
}

TEST(MaskTiming, NullsOnlyTimingFields) {
  const Json j = {{"train_seconds", 1.5},
                  {"rows", {{{"accuracy", 0.9}, {"train_seconds", 2.0}}}},
                  {"summary", {{{"train_seconds_mean", 3.0}, {"k", 3}}}}};
  const auto m = mask_timing(j);
  EXPECT_TRUE(m.at("train_seconds").is_null());
  EXPECT_TRUE(m.at("rows")[0].at("train_seconds").is_null());
  EXPECT_EQ(m.at("rows")[0].at("accuracy"), 0.9);
  EXPECT_TRUE(m.at("summary")[0].at("train_seconds_mean").is_null());
  EXPECT_EQ(m.at("summary")[0].at("k"), 3);
}

TEST(Classifier, SerializedPredictionsAreBitIdentical) {
  const auto ds = load_dataset(RIDGEKNN_IRIS_CSV, Format::DenseCsv);
  const auto sp = split(ds, 0.7, 3);
  const auto train = ds.subset(sp.train);
  const Matrix queries = select_rows(ds.features, sp.test);
  for (auto method : {Method::Euclidean, Method::MoveLabeled, Method::MoveQuery}) {
    ClassifierOptions opt;
    opt.method = method;
    opt.lambda = 0.1;
    opt.k = 3;
    opt.pca_dim = 3;
    const auto c = fit_classifier(train, opt);
    const auto back = classifier_from_json(Json::parse(to_json(c).dump()));
    EXPECT_EQ(back.predict(queries), c.predict(queries)) << to_string(method);
    EXPECT_TRUE(back.labeled == c.labeled);
    if (c.transform) {
      EXPECT_TRUE(back.transform->W == c.transform->W);
    }
    EXPECT_EQ(back.label_name(0), "setosa");
  }
}

TEST(Classifier, MissingHyperparametersComeFromCv) {
  const auto ds = load_dataset(RIDGEKNN_IRIS_CSV, Format::DenseCsv);
  ClassifierOptions opt;
  opt.cv.lambda_grid = {0.01, 1.0};
  opt.cv.k_grid = {1, 5};
  const auto c = fit_classifier(ds, opt);
  ASSERT_TRUE(c.cv.has_value());
  EXPECT_EQ(c.k, c.cv->best_k);
  EXPECT_EQ(c.transform->lambda, c.cv->best_lambda);
  opt.lambda = 0.5;
  opt.k = 7;
  const auto fixed = fit_classifier(ds, opt);
  EXPECT_FALSE(fixed.cv.has_value());
  EXPECT_EQ(fixed.k, 7);
  opt.k = 151;
  EXPECT_THROW(fit_classifier(ds, opt), InvalidArgument);
}

TEST(Classifier, RejectsInconsistentJson) {
  const auto ds = load_dataset(RIDGEKNN_IRIS_CSV, Format::DenseCsv);
  ClassifierOptions opt;
  opt.lambda = 1.0;
  opt.k = 1;
  auto j = to_json(fit_classifier(ds, opt));
  j["transform"] = nullptr;
  EXPECT_THROW(classifier_from_json(j), Error);
  j["version"] = 99;
  EXPECT_THROW(classifier_from_json(j), Error);
}
