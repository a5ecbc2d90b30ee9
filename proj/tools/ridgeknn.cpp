// Command-line front end: fit, predict, hubness, cv, centrality, bench, generate.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "ridgeknn/ridgeknn.hpp"

namespace fs = std::filesystem;
using namespace ridgeknn;

namespace {

struct DataArgs {
  std::string dataset;
  std::string format = "dense-csv";
};

void add_data_args(CLI::App* cmd, DataArgs& a, bool required = true) {
  auto* opt = cmd->add_option("--dataset", a.dataset, "labeled data file")->check(CLI::ExistingFile);
  if (required) opt->required();
  cmd->add_option("--format", a.format, "dense-csv or sparse-pairs")->capture_default_str();
}

Dataset load(const DataArgs& a) { return load_dataset(a.dataset, parse_format(a.format)); }

// Writes to `path`, or stdout when empty.
template <typename Fn>
void emit(const std::string& path, Fn&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  if (const auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  write(out);
}

struct FitArgs {
  DataArgs data;
  std::string method = "move-labeled";
  std::optional<double> lambda;
  std::optional<int> k;
  int k_targets = 1;
  std::string solver = "paper";
  std::optional<Index> pca_dim;
  bool zscore = false;
  bool no_center = false;
  int folds = 5;
  std::uint64_t seed = 1;
  std::string out;
};

int run_fit(const FitArgs& a) {
  ClassifierOptions opt;
  opt.method = parse_method(a.method);
  opt.lambda = a.lambda;
  opt.k = a.k;
  opt.zscore = a.zscore;
  opt.center = !a.no_center;
  opt.pca_dim = a.pca_dim;
  opt.cv.k_targets = a.k_targets;
  opt.cv.solver = parse_solver(a.solver);
  opt.cv.n_folds = a.folds;
  opt.cv.seed = a.seed;
  const auto ds = load(a.data);
  const auto c = fit_classifier(ds, opt);
  write_json_file(a.out, to_json(c));
  Json summary = {{"model", a.out},     {"method", to_string(c.method)}, {"k", c.k},
                  {"n", ds.size()},     {"d", c.labeled.cols()},
                  {"dissimilarity", c.knn().dissimilarity().name()}};
  summary["lambda"] = c.transform ? Json(c.transform->lambda) : Json(nullptr);
  std::cout << summary.dump(2) << '\n';
  return 0;
}

struct PredictArgs {
  std::string model;
  DataArgs data;
  std::string out;
};

int run_predict(const PredictArgs& a) {
  const auto c = classifier_from_json(read_json_file(a.model));
  const auto queries = load(a.data);
  const auto predicted = c.predict(queries.features);
  std::size_t hits = 0;
  emit(a.out, [&](std::ostream& out) {
    out << "query_index,predicted_label,true_label\n";
    for (std::size_t q = 0; q < predicted.size(); ++q) {
      const auto p = c.label_name(predicted[q]);
      const auto t = queries.label_name(queries.labels[q]);
      hits += p == t;
      out << q << ',' << p << ',' << t << '\n';
    }
  });
  const Json summary = {{"accuracy", static_cast<double>(hits) / static_cast<double>(predicted.size())},
                        {"k", c.k},
                        {"dissimilarity", c.knn().dissimilarity().name()},
                        {"n_queries", predicted.size()}};
  (a.out.empty() ? std::cerr : std::cout) << summary.dump(2) << '\n';
  return 0;
}

// Shared by hubness and bench.
struct ExperimentArgs {
  DataArgs data;
  std::string config;
  std::vector<std::string> methods;
  std::optional<int> splits;
  std::optional<double> train_fraction;
  std::optional<std::uint64_t> seed;
  std::optional<Index> pca_dim;
  std::optional<int> k_targets;
  std::optional<std::string> solver;
  std::vector<double> lambda_grid;
  std::vector<int> k_grid;
  std::optional<int> folds;
  std::optional<int> hubness_k;
  bool zscore = false;
  std::string out;
};

void add_experiment_overrides(CLI::App* cmd, ExperimentArgs& a) {
  cmd->add_option("--method", a.methods, "euclidean, move-labeled or move-query (repeatable)");
  cmd->add_option("--splits", a.splits, "number of random train/test splits");
  cmd->add_option("--train-fraction", a.train_fraction, "training share of each split");
  cmd->add_option("--seed", a.seed, "seed of the first split");
  cmd->add_option("--pca-dim", a.pca_dim, "project to this many principal components");
  cmd->add_option("--k-targets", a.k_targets, "target objects per training object");
  cmd->add_option("--solver", a.solver, "paper or exact (move-labeled only)");
  cmd->add_option("--lambda-grid", a.lambda_grid, "comma-separated lambda values")->delimiter(',');
  cmd->add_option("--k-grid", a.k_grid, "comma-separated k values")->delimiter(',');
  cmd->add_option("--folds", a.folds, "cross-validation folds");
  cmd->add_flag("--zscore", a.zscore, "z-score features instead of centering");
}

ExperimentConfig experiment_config(const ExperimentArgs& a) {
  ExperimentConfig cfg;
  if (!a.config.empty()) cfg = config_from_json(read_json_file(a.config), fs::path(a.config).parent_path());
  if (!a.data.dataset.empty()) {
    cfg.dataset_path = a.data.dataset;
    cfg.synthetic.reset();
    cfg.format = parse_format(a.data.format);
  }
  if (!a.methods.empty()) {
    cfg.methods.clear();
    for (const auto& m : a.methods) cfg.methods.push_back(parse_method(m));
  }
  if (a.splits) cfg.n_splits = *a.splits;
  if (a.train_fraction) cfg.train_fraction = *a.train_fraction;
  if (a.seed) cfg.seed = *a.seed;
  if (a.pca_dim) cfg.pca_dim = *a.pca_dim;
  if (a.k_targets) cfg.cv.k_targets = *a.k_targets;
  if (a.solver) cfg.cv.solver = parse_solver(*a.solver);
  if (!a.lambda_grid.empty()) {
    cfg.cv.lambda_grid = a.lambda_grid;
    cfg.cv_grids_are_defaults = false;
  }
  if (!a.k_grid.empty()) {
    cfg.cv.k_grid = a.k_grid;
    cfg.cv_grids_are_defaults = false;
  }
  if (a.folds) cfg.cv.n_folds = *a.folds;
  if (a.hubness_k) cfg.hubness_k = *a.hubness_k;
  if (a.zscore) cfg.zscore = true;
  if (!a.out.empty()) cfg.out_dir = a.out;
  cfg.validate();
  return cfg;
}

int report_row_errors(const ExperimentReport& r) {
  int failed = 0;
  for (const auto& row : r.rows) {
    if (row.ok()) continue;
    std::cerr << "error: " << row.error << '\n';
    ++failed;
  }
  return failed == 0 ? 0 : 1;
}

int run_hubness(const ExperimentArgs& a) {
  auto cfg = experiment_config(a);
  cfg.n_splits = 1;
  const auto r = run_experiment(cfg);
  emit(a.out, [&](std::ostream& out) { write_hubness_csv(out, r.hubness[0]); });
  return report_row_errors(r);
}

int run_bench(const ExperimentArgs& a) {
  const auto cfg = experiment_config(a);
  require(!cfg.out_dir.empty(), "bench needs an output directory (--out or \"out\" in the config)");
  const auto r = run_experiment(cfg);
  write_report(r, cfg.out_dir);
  write_table(std::cout, r);
  return report_row_errors(r);
}

struct CvArgs {
  DataArgs data;
  std::string method = "move-labeled";
  std::vector<double> lambda_grid;
  std::vector<int> k_grid;
  int folds = 5;
  int k_targets = 1;
  std::string solver = "paper";
  std::uint64_t seed = 1;
  std::string out;
};

int run_cv(const CvArgs& a) {
  const auto ds = load(a.data);
  CvConfig cv;
  if (!a.lambda_grid.empty()) cv.lambda_grid = a.lambda_grid;
  if (!a.k_grid.empty()) cv.k_grid = a.k_grid;
  cv.n_folds = a.folds;
  cv.seed = a.seed;
  cv.k_targets = a.k_targets;
  cv.solver = parse_solver(a.solver);
  cv.direction = direction_of(parse_method(a.method));
  IndexList all(ds.labels.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto r = grid_search(ds, all, cv);
  Json j = to_json(r);
  j["config"] = to_json(cv);
  emit(a.out, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
  return 0;
}

struct CentralityArgs {
  std::vector<int> d{300};
  std::vector<double> s{1.0};
  std::vector<double> gamma{1.0};
  std::size_t n = 100000;
  std::uint64_t seed = 1;
  double query_sd = 1.0;
  double query_shift = 0.0;
  bool csv = false;
  std::string out;
};

int run_centrality(const CentralityArgs& a) {
  CentralityExperiment base;
  base.n_queries = a.n;
  base.seed = a.seed;
  base.query_sd = a.query_sd;
  base.query_shift = a.query_shift;
  const auto rows = centrality_sweep(a.d, a.s, a.gamma, base);
  emit(a.out, [&](std::ostream& out) {
    if (rows.size() == 1 && !a.csv) out << to_json(rows[0]).dump(2) << '\n';
    else write_centrality_csv(out, rows);
  });
  return 0;
}

struct GenerateArgs {
  GaussianMixtureSpec spec;
  std::string out;
};

int run_generate(const GenerateArgs& a) {
  const auto ds = make_gaussian_mixture(a.spec);
  emit(a.out, [&](std::ostream& out) { write_dense_csv(out, ds); });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ridge-regression hub reduction for k-nearest-neighbor classification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ridgeknn 1.0.0");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "learn a classifier and save it as JSON");
  add_data_args(fit_cmd, fit.data);
  fit_cmd->add_option("--method", fit.method, "euclidean, move-labeled or move-query")->capture_default_str();
  fit_cmd->add_option("--lambda", fit.lambda, "ridge parameter (cross-validated when omitted)");
  fit_cmd->add_option("--k", fit.k, "classification neighbors (cross-validated when omitted)");
  fit_cmd->add_option("--k-targets", fit.k_targets, "target objects per training object")->capture_default_str();
  fit_cmd->add_option("--solver", fit.solver, "paper or exact")->capture_default_str();
  fit_cmd->add_option("--pca-dim", fit.pca_dim, "project to this many principal components");
  fit_cmd->add_flag("--zscore", fit.zscore, "z-score features instead of centering");
  fit_cmd->add_flag("--no-center", fit.no_center, "leave features uncentered");
  fit_cmd->add_option("--folds", fit.folds, "cross-validation folds")->capture_default_str();
  fit_cmd->add_option("--seed", fit.seed, "cross-validation seed")->capture_default_str();
  fit_cmd->add_option("--out", fit.out, "model file to write")->required();

  PredictArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "classify a labeled query file with a saved model");
  predict_cmd->add_option("--model", predict.model, "model written by fit")->required()->check(CLI::ExistingFile);
  add_data_args(predict_cmd, predict.data);
  predict_cmd->add_option("--out", predict.out, "predictions CSV (stdout when omitted)");

  ExperimentArgs hub;
  auto* hub_cmd = app.add_subcommand("hubness", "N_k skewness of each method on one split");
  add_data_args(hub_cmd, hub.data);
  add_experiment_overrides(hub_cmd, hub);
  hub_cmd->add_option("--k", hub.hubness_k, "k of the N_k counts (default 10)");
  hub_cmd->add_option("--out", hub.out, "CSV file (stdout when omitted)");

  CvArgs cv;
  auto* cv_cmd = app.add_subcommand("cv", "cross-validated grid search over lambda and k");
  add_data_args(cv_cmd, cv.data);
  cv_cmd->add_option("--method", cv.method, "euclidean, move-labeled or move-query")->capture_default_str();
  cv_cmd->add_option("--lambda-grid", cv.lambda_grid, "comma-separated lambda values")->delimiter(',');
  cv_cmd->add_option("--k-grid", cv.k_grid, "comma-separated k values")->delimiter(',');
  cv_cmd->add_option("--folds", cv.folds, "number of folds")->capture_default_str();
  cv_cmd->add_option("--k-targets", cv.k_targets, "target objects per training object")->capture_default_str();
  cv_cmd->add_option("--solver", cv.solver, "paper or exact")->capture_default_str();
  cv_cmd->add_option("--seed", cv.seed, "fold seed")->capture_default_str();
  cv_cmd->add_option("--out", cv.out, "JSON file (stdout when omitted)");

  CentralityArgs cen;
  auto* cen_cmd = app.add_subcommand("centrality", "Monte Carlo check of the distance gap toward the mean");
  cen_cmd->add_option("--d", cen.d, "dimension(s), comma-separated")->delimiter(',')->capture_default_str();
  cen_cmd->add_option("--s", cen.s, "standard deviation(s), comma-separated")->delimiter(',')->capture_default_str();
  cen_cmd->add_option("--gamma", cen.gamma, "norm gap(s) in units of the norm spread")->delimiter(',')->capture_default_str();
  cen_cmd->add_option("--n", cen.n, "queries per cell")->capture_default_str();
  cen_cmd->add_option("--seed", cen.seed, "random seed")->capture_default_str();
  cen_cmd->add_option("--query-sd", cen.query_sd, "query standard deviation")->capture_default_str();
  cen_cmd->add_option("--query-shift", cen.query_shift, "query mean offset along z2 - z1")->capture_default_str();
  cen_cmd->add_flag("--csv", cen.csv, "CSV output even for a single cell");
  cen_cmd->add_option("--out", cen.out, "output file (stdout when omitted)");

  ExperimentArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "full experiment: splits x methods with reports");
  bench_cmd->add_option("--config", bench.config, "experiment JSON")->check(CLI::ExistingFile);
  add_data_args(bench_cmd, bench.data, false);
  add_experiment_overrides(bench_cmd, bench);
  bench_cmd->add_option("--hubness-k", bench.hubness_k, "k of the N_k counts");
  bench_cmd->add_option("--out", bench.out, "report directory");

  GenerateArgs gen;
  auto* gen_cmd = app.add_subcommand("generate", "write a synthetic Gaussian-mixture dataset");
  gen_cmd->add_option("--n", gen.spec.n, "objects")->capture_default_str();
  gen_cmd->add_option("--d", gen.spec.d, "dimension")->capture_default_str();
  gen_cmd->add_option("--classes", gen.spec.classes, "classes")->capture_default_str();
  gen_cmd->add_option("--separation", gen.spec.separation, "class-mean scale")->capture_default_str();
  gen_cmd->add_option("--spread-min", gen.spec.spread_min, "smallest class spread")->capture_default_str();
  gen_cmd->add_option("--spread-max", gen.spec.spread_max, "largest class spread")->capture_default_str();
  gen_cmd->add_option("--decay", gen.spec.spectrum_decay, "variance decay exponent")->capture_default_str();
  gen_cmd->add_option("--seed", gen.spec.seed, "random seed")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "CSV file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    std::cerr << (subs.empty() ? app.help() : subs.front()->help());
    return 2;
  }

  CLI::App* active = app.get_subcommands().front();
  try {
    if (active == fit_cmd) return run_fit(fit);
    if (active == predict_cmd) return run_predict(predict);
    if (active == hub_cmd) return run_hubness(hub);
    if (active == cv_cmd) return run_cv(cv);
    if (active == cen_cmd) return run_centrality(cen);
    if (active == bench_cmd) return run_bench(bench);
    if (active == gen_cmd) return run_generate(gen);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n\n" << active->help();
    return 1;
  }
  return 1;
}
