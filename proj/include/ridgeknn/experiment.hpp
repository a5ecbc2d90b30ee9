#pragma once

#include <chrono>
#include <filesystem>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include "ridgeknn/serialize.hpp"
#include "ridgeknn/synthetic.hpp"

namespace ridgeknn {

enum class Method { Euclidean, MoveLabeled, MoveQuery };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::Euclidean: return "euclidean";
    case Method::MoveLabeled: return "move-labeled";
    case Method::MoveQuery: return "move-query";
  }
  return "unknown";
}

inline Method parse_method(std::string_view s) {
  if (s == "euclidean") return Method::Euclidean;
  if (s == "move-labeled") return Method::MoveLabeled;
  if (s == "move-query") return Method::MoveQuery;
  throw InvalidArgument("unknown method '" + std::string(s) +
                        "' (expected euclidean, move-labeled or move-query)");
}

inline std::optional<Direction> direction_of(Method m) {
  if (m == Method::MoveLabeled) return Direction::MoveLabeled;
  if (m == Method::MoveQuery) return Direction::MoveQuery;
  return std::nullopt;
}

/// One run of the evaluation protocol: for each random split, preprocess on
/// the train side, cross-validate (lambda, k) on train, refit on all of train,
/// then score test accuracy and N_k skewness with test objects as queries.
///
/// Split s uses seed + s for the partition and cv.seed + s for the folds.
struct ExperimentConfig {
  std::string dataset_path;
  Format format = Format::DenseCsv;
  std::optional<GaussianMixtureSpec> synthetic;
  bool center = true;
  bool zscore = false;
  std::optional<Index> pca_dim;
  std::vector<Method> methods{Method::Euclidean, Method::MoveLabeled, Method::MoveQuery};
  int n_splits = 4;
  double train_fraction = 0.7;
  std::uint64_t seed = 1;
  CvConfig cv;
  bool cv_grids_are_defaults = true;
  int hubness_k = 10;
  std::string out_dir;

  void validate() const {
    require(n_splits >= 1, "experiment needs at least one split");
    require(!methods.empty(), "experiment needs at least one method");
    require(train_fraction > 0.0 && train_fraction < 1.0, "train fraction must lie in (0, 1)");
    require(hubness_k >= 1, "hubness k must be positive");
    if (pca_dim) require(*pca_dim >= 1, "pca_dim must be positive");
  }
};

struct ExperimentRow {
  Method method = Method::Euclidean;
  int split = 0;
  std::uint64_t split_seed = 0;
  double accuracy = 0.0;
  std::optional<double> skewness;
  double train_seconds = 0.0;
  std::optional<double> lambda;
  int k = 1;
  double cv_accuracy = 0.0;
  /// |W_paper - W_exact|_F / |W_paper|_F for move-labeled rows.
  std::optional<double> solver_gap;
  std::string error;

  bool ok() const { return error.empty(); }
};

struct MethodSummary {
  Method method = Method::Euclidean;
  int splits = 0;
  double accuracy_mean = 0.0, accuracy_sd = 0.0;
  double skewness_mean = 0.0, skewness_sd = 0.0;
  double train_seconds_mean = 0.0, train_seconds_sd = 0.0;
};

struct ExperimentReport {
  std::string dataset;
  Index n = 0;
  Index d = 0;
  int classes = 0;
  ExperimentConfig config;
  std::vector<ExperimentRow> rows;
  std::vector<MethodSummary> summary;
  /// Per split: one N_k row per method.
  std::vector<std::vector<HubnessRow>> hubness;

  bool ok() const {
    return std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.ok(); });
  }
  const MethodSummary* find(Method m) const {
    for (const auto& s : summary)
      if (s.method == m) return &s;
    return nullptr;
  }
};

namespace detail {

struct Prepared {
  Matrix train_x, test_x;
  LabelList train_y, test_y;
};

inline Prepared prepare_split(const Dataset& ds, const Split& sp, const ExperimentConfig& cfg) {
  Prepared p;
  p.train_x = select_rows(ds.features, sp.train);
  p.test_x = select_rows(ds.features, sp.test);
  p.train_y = select(ds.labels, sp.train);
  p.test_y = select(ds.labels, sp.test);
  if (cfg.zscore) {
    const auto z = fit_zscore(p.train_x);
    p.train_x = z.apply(p.train_x);
    p.test_x = z.apply(p.test_x);
  } else if (cfg.center) {
    const auto c = fit_centering(p.train_x);
    p.train_x = c.apply(p.train_x);
    p.test_x = c.apply(p.test_x);
  }
  if (cfg.pca_dim) {
    const auto pca = fit_pca(p.train_x, *cfg.pca_dim);
    p.train_x = apply_pca(pca, p.train_x);
    p.test_x = apply_pca(pca, p.test_x);
  }
  return p;
}

inline std::pair<double, double> mean_sd(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

}  // namespace detail

inline ExperimentRow run_method(Method method, int split_no, const Split& sp,
                                const detail::Prepared& p, const ExperimentConfig& cfg,
                                std::vector<HubnessRow>& hubness) {
  ExperimentRow row;
  row.method = method;
  row.split = split_no;
  row.split_seed = sp.seed;

  Dataset train;
  train.features = p.train_x;
  train.labels = p.train_y;
  train.class_count = *std::max_element(p.train_y.begin(), p.train_y.end()) + 1;
  IndexList all(p.train_y.size());
  std::iota(all.begin(), all.end(), 0);

  CvConfig cv = cfg.cv;
  cv.seed = cfg.cv.seed + static_cast<std::uint64_t>(split_no);
  cv.direction = direction_of(method);
  if (!cv.direction) cv.lambda_grid = {0.0};
  const auto cvr = grid_search(train, all, cv);
  row.k = cvr.best_k;
  row.cv_accuracy = cvr.best_accuracy;

  Dissimilarity diss = Dissimilarity::euclidean();
  if (cv.direction) {
    row.lambda = cvr.best_lambda;
    const auto start = std::chrono::steady_clock::now();
    const auto targets = select_targets(p.train_x, p.train_y, cv.k_targets);
    const auto model = fit_transform(p.train_x, targets, *cv.direction, cvr.best_lambda, cv.solver);
    row.train_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    diss = Dissimilarity::from(model);
    if (method == Method::MoveLabeled) {
      const auto other = cv.solver == Solver::PaperClosedForm ? Solver::ExactMinimizer
                                                              : Solver::PaperClosedForm;
      const auto alt = fit_transform(p.train_x, targets, Direction::MoveLabeled, cvr.best_lambda, other);
      const double base = model.W.norm();
      row.solver_gap = base > 0 ? (model.W - alt.W).norm() / base : (model.W - alt.W).norm();
    }
  }
  const KnnModel knn(p.train_x, p.train_y, row.k, diss);
  row.accuracy = knn.evaluate(p.test_x, p.test_y);

  const KnnModel hub_model(p.train_x, p.train_y, cfg.hubness_k, diss);
  const auto counts = nk_counts(hub_model, p.test_x, cfg.hubness_k);
  HubnessRow h;
  h.method = to_string(method);
  h.k = cfg.hubness_k;
  h.max_count = *std::max_element(counts.begin(), counts.end());
  h.mean_count = population_moments(std::span<const std::size_t>(counts)).first;
  try {
    row.skewness = skewness(counts);
    h.skewness = *row.skewness;
  } catch (const ZeroVarianceError&) {
    h.skewness = std::numeric_limits<double>::quiet_NaN();
  }
  hubness.push_back(h);
  return row;
}

/// Runs the protocol on an in-memory dataset. Errors in one (split, method)
/// cell are recorded in that row and the remaining cells still run.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg, const Dataset& ds) {
  cfg.validate();
  ds.validate();
  ExperimentReport report;
  report.dataset = ds.name;
  report.n = ds.size();
  report.d = ds.dim();
  report.classes = ds.class_count;
  report.config = cfg;
  report.hubness.resize(static_cast<std::size_t>(cfg.n_splits));

  for (int s = 0; s < cfg.n_splits; ++s) {
    const auto split_seed = cfg.seed + static_cast<std::uint64_t>(s);
    std::optional<detail::Prepared> prepared;
    Split sp;
    std::string split_error;
    try {
      sp = split(ds, cfg.train_fraction, split_seed);
      prepared = detail::prepare_split(ds, sp, cfg);
    } catch (const Error& e) {
      split_error = e.what();
    }
    for (auto method : cfg.methods) {
      ExperimentRow row;
      if (prepared) {
        try {
          row = run_method(method, s, sp, *prepared, cfg, report.hubness[static_cast<std::size_t>(s)]);
        } catch (const Error& e) {
          row.error = e.what();
        }
      } else {
        row.error = split_error;
      }
      row.method = method;
      row.split = s;
      row.split_seed = split_seed;
      if (!row.ok()) {
        row.error = "split " + std::to_string(s) + ", method " + to_string(method) + ": " + row.error;
      }
      report.rows.push_back(std::move(row));
    }
  }

  for (auto method : cfg.methods) {
    std::vector<double> acc, skew, secs;
    for (const auto& r : report.rows) {
      if (r.method != method || !r.ok()) continue;
      acc.push_back(r.accuracy);
      if (r.skewness) skew.push_back(*r.skewness);
      secs.push_back(r.train_seconds);
    }
    MethodSummary m;
    m.method = method;
    m.splits = static_cast<int>(acc.size());
    std::tie(m.accuracy_mean, m.accuracy_sd) = detail::mean_sd(acc);
    std::tie(m.skewness_mean, m.skewness_sd) = detail::mean_sd(skew);
    std::tie(m.train_seconds_mean, m.train_seconds_sd) = detail::mean_sd(secs);
    report.summary.push_back(m);
  }
  return report;
}

inline Dataset load_experiment_dataset(const ExperimentConfig& cfg) {
  if (cfg.synthetic) return make_gaussian_mixture(*cfg.synthetic);
  require(!cfg.dataset_path.empty(), "experiment config names no dataset");
  return load_dataset(cfg.dataset_path, cfg.format);
}

inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  return run_experiment(cfg, load_experiment_dataset(cfg));
}

// Configuration documents

inline Json to_json(const GaussianMixtureSpec& g) {
  return {{"n", g.n},
          {"d", g.d},
          {"classes", g.classes},
          {"separation", g.separation},
          {"spread_min", g.spread_min},
          {"spread_max", g.spread_max},
          {"spectrum_decay", g.spectrum_decay},
          {"seed", g.seed}};
}

inline GaussianMixtureSpec mixture_from_json(const Json& j) {
  GaussianMixtureSpec g;
  g.n = j.value("n", g.n);
  g.d = j.value("d", g.d);
  g.classes = j.value("classes", g.classes);
  g.separation = j.value("separation", g.separation);
  g.spread_min = j.value("spread_min", g.spread_min);
  g.spread_max = j.value("spread_max", g.spread_max);
  g.spectrum_decay = j.value("spectrum_decay", g.spectrum_decay);
  g.seed = j.value("seed", g.seed);
  return g;
}

inline Json to_json(const ExperimentConfig& c) {
  Json methods = Json::array();
  for (auto m : c.methods) methods.push_back(to_string(m));
  Json j = {{"format", to_string(c.format)},
            {"center", c.center},
            {"zscore", c.zscore},
            {"methods", methods},
            {"splits", c.n_splits},
            {"train_fraction", c.train_fraction},
            {"seed", c.seed},
            {"cv", to_json(c.cv)},
            {"cv_grids_are_defaults", c.cv_grids_are_defaults},
            {"hubness_k", c.hubness_k}};
  j["cv"].erase("direction");
  j["dataset"] = c.synthetic ? Json(nullptr) : Json(c.dataset_path);
  j["synthetic"] = c.synthetic ? to_json(*c.synthetic) : Json(nullptr);
  j["pca_dim"] = c.pca_dim ? Json(*c.pca_dim) : Json(nullptr);
  return j;
}

/// Reads a config document. A relative dataset path is resolved against
/// `base_dir` when given.
inline ExperimentConfig config_from_json(const Json& j, const std::filesystem::path& base_dir = {}) {
  ExperimentConfig c;
  if (j.contains("dataset") && !j.at("dataset").is_null()) {
    std::filesystem::path p = j.at("dataset").get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    c.dataset_path = p.string();
  }
  if (j.contains("synthetic") && !j.at("synthetic").is_null()) {
    c.synthetic = mixture_from_json(j.at("synthetic"));
  }
  if (j.contains("format")) c.format = parse_format(j.at("format").get<std::string>());
  c.center = j.value("center", c.center);
  c.zscore = j.value("zscore", c.zscore);
  if (j.contains("pca_dim") && !j.at("pca_dim").is_null()) c.pca_dim = j.at("pca_dim").get<Index>();
  if (j.contains("methods")) {
    c.methods.clear();
    for (const auto& m : j.at("methods")) c.methods.push_back(parse_method(m.get<std::string>()));
  }
  c.n_splits = j.value("splits", c.n_splits);
  c.train_fraction = j.value("train_fraction", c.train_fraction);
  c.seed = j.value("seed", c.seed);
  c.hubness_k = j.value("hubness_k", c.hubness_k);
  c.out_dir = j.value("out", c.out_dir);
  if (j.contains("cv")) {
    const auto& cv = j.at("cv");
    if (cv.contains("lambda_grid")) {
      c.cv.lambda_grid = cv.at("lambda_grid").get<std::vector<double>>();
      c.cv_grids_are_defaults = false;
    }
    if (cv.contains("k_grid")) {
      c.cv.k_grid = cv.at("k_grid").get<std::vector<int>>();
      c.cv_grids_are_defaults = false;
    }
    c.cv.n_folds = cv.value("n_folds", c.cv.n_folds);
    c.cv.seed = cv.value("seed", c.cv.seed);
    c.cv.k_targets = cv.value("k_targets", c.cv.k_targets);
    if (cv.contains("solver")) c.cv.solver = parse_solver(cv.at("solver").get<std::string>());
  }
  c.validate();
  return c;
}

// Report rendering. Fields whose names end in "seconds" hold wall-clock time
// and are the only run-to-run varying content.

namespace detail {

inline Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

inline std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

inline std::string fixed(const std::optional<double>& v, int digits) {
  return v ? fixed(*v, digits) : std::string("-");
}

}  // namespace detail

inline Json to_json(const ExperimentReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"method", to_string(row.method)},
                    {"split", row.split},
                    {"split_seed", row.split_seed},
                    {"accuracy", row.accuracy},
                    {"skewness", detail::optional_json(row.skewness)},
                    {"lambda", detail::optional_json(row.lambda)},
                    {"k", row.k},
                    {"cv_accuracy", row.cv_accuracy},
                    {"solver_gap", detail::optional_json(row.solver_gap)},
                    {"train_seconds", row.train_seconds},
                    {"error", row.error.empty() ? Json(nullptr) : Json(row.error)}});
  }
  Json summary = Json::array();
  for (const auto& s : r.summary) {
    summary.push_back({{"method", to_string(s.method)},
                       {"splits", s.splits},
                       {"accuracy_mean", s.accuracy_mean},
                       {"accuracy_sd", s.accuracy_sd},
                       {"skewness_mean", s.skewness_mean},
                       {"skewness_sd", s.skewness_sd},
                       {"train_seconds_mean", s.train_seconds_mean},
                       {"train_seconds_sd", s.train_seconds_sd}});
  }
  Json hubness = Json::array();
  for (const auto& split_rows : r.hubness) {
    Json h = Json::array();
    for (const auto& row : split_rows) h.push_back(to_json(row));
    hubness.push_back(std::move(h));
  }
  return {{"version", kSchemaVersion},
          {"dataset", r.dataset},
          {"n", r.n},
          {"d", r.d},
          {"classes", r.classes},
          {"config", to_json(r.config)},
          {"rows", std::move(rows)},
          {"summary", std::move(summary)},
          {"hubness", std::move(hubness)}};
}

/// Copy of a report JSON with every wall-clock field set to null, for
/// reproducibility comparisons.
inline Json mask_timing(Json j) {
  if (j.is_object()) {
    for (auto& [key, value] : j.items()) {
      if (key.rfind("train_seconds", 0) == 0) value = nullptr;
      else value = mask_timing(std::move(value));
    }
  } else if (j.is_array()) {
    for (auto& value : j) value = mask_timing(std::move(value));
  }
  return j;
}

inline void write_rows_csv(std::ostream& out, const ExperimentReport& r) {
  out << "method,split,split_seed,accuracy,skewness,lambda,k,cv_accuracy,solver_gap,train_seconds\n";
  for (const auto& row : r.rows) {
    const auto opt = [](const std::optional<double>& v) {
      return v ? detail::fixed(*v, 10) : std::string();
    };
    out << to_string(row.method) << ',' << row.split << ',' << row.split_seed << ','
        << (row.ok() ? detail::fixed(row.accuracy, 10) : std::string()) << ',' << opt(row.skewness)
        << ',' << opt(row.lambda) << ',' << row.k << ',' << detail::fixed(row.cv_accuracy, 10)
        << ',' << opt(row.solver_gap) << ',' << detail::fixed(row.train_seconds, 6) << '\n';
  }
}

/// Aligned plain-text table of per-split rows followed by per-method means.
inline void write_table(std::ostream& out, const ExperimentReport& r) {
  out << "dataset: " << r.dataset << "  (n=" << r.n << ", d=" << r.d << ", classes=" << r.classes
      << ")\n";
  out << "cv: " << r.config.cv.n_folds << "-fold, k_targets=" << r.config.cv.k_targets
      << ", solver=" << to_string(r.config.cv.solver)
      << (r.config.cv_grids_are_defaults ? ", default grids" : ", configured grids") << "\n\n";
  out << std::left << std::setw(14) << "method" << std::right << std::setw(6) << "split"
      << std::setw(10) << "acc[%]" << std::setw(10) << "N_k skew" << std::setw(10) << "lambda"
      << std::setw(5) << "k" << std::setw(12) << "train_s" << '\n';
  for (const auto& row : r.rows) {
    out << std::left << std::setw(14) << to_string(row.method) << std::right << std::setw(6)
        << row.split;
    if (!row.ok()) {
      out << "  ERROR " << row.error << '\n';
      continue;
    }
    std::ostringstream lambda;
    if (row.lambda) lambda << *row.lambda; else lambda << '-';
    out << std::setw(10) << detail::fixed(100.0 * row.accuracy, 2) << std::setw(10)
        << detail::fixed(row.skewness, 3) << std::setw(10) << lambda.str() << std::setw(5) << row.k
        << std::setw(12) << detail::fixed(row.train_seconds, 4) << '\n';
  }
  out << '\n'
      << std::left << std::setw(14) << "method" << std::right << std::setw(6) << "n"
      << std::setw(18) << "acc[%] mean+-sd" << std::setw(18) << "skew mean+-sd" << std::setw(12)
      << "train_s" << '\n';
  for (const auto& s : r.summary) {
    out << std::left << std::setw(14) << to_string(s.method) << std::right << std::setw(6)
        << s.splits << std::setw(18)
        << (detail::fixed(100.0 * s.accuracy_mean, 2) + "+-" + detail::fixed(100.0 * s.accuracy_sd, 2))
        << std::setw(18)
        << (detail::fixed(s.skewness_mean, 3) + "+-" + detail::fixed(s.skewness_sd, 3))
        << std::setw(12) << detail::fixed(s.train_seconds_mean, 4) << '\n';
  }
}

/// Writes report.json, report.txt, rows.csv and hubness_split<s>.csv.
inline void write_report(const ExperimentReport& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_json_file((dir / "report.json").string(), to_json(r));
  {
    std::ofstream out(dir / "report.txt");
    write_table(out, r);
  }
  {
    std::ofstream out(dir / "rows.csv");
    write_rows_csv(out, r);
  }
  for (std::size_t s = 0; s < r.hubness.size(); ++s) {
    std::ofstream out(dir / ("hubness_split" + std::to_string(s) + ".csv"));
    write_hubness_csv(out, r.hubness[s]);
  }
}

}  // namespace ridgeknn
