#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>

#include "ridgeknn/knn.hpp"
#include "ridgeknn/preprocess.hpp"

namespace ridgeknn {

/// Cross-validation grid. `direction` empty means plain Euclidean k-NN, in
/// which case the lambda grid does not affect the scores.
struct CvConfig {
  std::vector<double> lambda_grid{1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0};
  std::vector<int> k_grid{1, 3, 5, 7, 9};
  int n_folds = 5;
  std::uint64_t seed = 1;
  std::optional<Direction> direction;
  int k_targets = 1;
  Solver solver = Solver::PaperClosedForm;
};

struct CvCell {
  double lambda = 0.0;
  int k = 1;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // sample standard deviation across folds
};

struct CvResult {
  double best_lambda = 0.0;
  int best_k = 1;
  double best_accuracy = 0.0;
  std::vector<CvCell> table;  // lambda-major, both grids in config order
  IndexList indices;          // the training rows that were folded
  std::vector<int> folds;     // fold id of each entry of `indices`
};

/// Stratified fold assignment for `indices` (rows of a dataset with
/// `labels`). Members of each class are shuffled, then dealt round-robin with
/// the dealing position carried across classes, so per-class counts differ
/// by at most one between folds and fold sizes stay balanced.
inline std::vector<int> make_folds(const IndexList& indices, const LabelList& labels, int n_folds,
                                   std::uint64_t seed) {
  require(n_folds >= 2, "cross validation needs at least 2 folds");
  std::vector<std::pair<Label, std::size_t>> by_class;
  by_class.reserve(indices.size());
  for (std::size_t p = 0; p < indices.size(); ++p) by_class.emplace_back(labels.at(indices[p]), p);
  std::sort(by_class.begin(), by_class.end());

  std::vector<int> folds(indices.size(), -1);
  std::mt19937_64 rng(seed);
  std::size_t deal = 0;
  std::vector<std::size_t> members;
  for (std::size_t lo = 0; lo < by_class.size();) {
    std::size_t hi = lo;
    while (hi < by_class.size() && by_class[hi].first == by_class[lo].first) ++hi;
    if (hi - lo < static_cast<std::size_t>(n_folds)) {
      throw InvalidArgument("class " + std::to_string(by_class[lo].first) + " has " +
                            std::to_string(hi - lo) + " training objects, fewer than " +
                            std::to_string(n_folds) + " folds");
    }
    members.clear();
    for (std::size_t t = lo; t < hi; ++t) members.push_back(by_class[t].second);
    std::shuffle(members.begin(), members.end(), rng);
    for (auto p : members) folds[p] = static_cast<int>(deal++ % static_cast<std::size_t>(n_folds));
    lo = hi;
  }
  return folds;
}

namespace detail {

inline double prefix_accuracy(const std::vector<std::vector<Neighbor>>& nbs, int k,
                              const LabelList& labeled, const LabelList& truth) {
  std::size_t hits = 0;
  for (std::size_t q = 0; q < nbs.size(); ++q) {
    hits += vote(std::span<const Neighbor>(nbs[q].data(), static_cast<std::size_t>(k)), labeled) ==
            truth[q];
  }
  return static_cast<double>(hits) / static_cast<double>(nbs.size());
}

}  // namespace detail

/// Grid search over (lambda, k) by stratified k-fold cross validation on the
/// `train` rows of `ds`. Centering, target selection and W are refit on each
/// fold's training side only. Ties in mean accuracy go to the larger lambda,
/// then the smaller k.
inline CvResult grid_search(const Dataset& ds, const IndexList& train, const CvConfig& config) {
  require(!config.lambda_grid.empty(), "lambda grid is empty");
  require(!config.k_grid.empty(), "k grid is empty");
  for (double l : config.lambda_grid) require(l >= 0.0, "lambda grid values must be non-negative");
  for (int k : config.k_grid) require(k >= 1, "k grid values must be positive");

  CvResult result;
  result.indices = train;
  result.folds = make_folds(train, ds.labels, config.n_folds, config.seed);
  const int k_max = *std::max_element(config.k_grid.begin(), config.k_grid.end());
  const std::size_t n_lambda = config.lambda_grid.size();
  const std::size_t n_k = config.k_grid.size();
  // scores[(l * n_k + kk) * n_folds + f]
  std::vector<double> scores(n_lambda * n_k * static_cast<std::size_t>(config.n_folds));

  for (int f = 0; f < config.n_folds; ++f) {
    IndexList fit_rows, val_rows;
    for (std::size_t p = 0; p < train.size(); ++p) {
      (result.folds[p] == f ? val_rows : fit_rows).push_back(train[p]);
    }
    const std::string ctx = "fold " + std::to_string(f) + ": ";
    if (static_cast<std::size_t>(k_max) > fit_rows.size()) {
      throw InvalidArgument(ctx + "k = " + std::to_string(k_max) + " exceeds the " +
                            std::to_string(fit_rows.size()) + " fold-training objects");
    }
    const auto centering = fit_centering(select_rows(ds.features, fit_rows));
    const Matrix fit_x = centering.apply(select_rows(ds.features, fit_rows));
    const Matrix val_x = centering.apply(select_rows(ds.features, val_rows));
    const LabelList fit_y = select(ds.labels, fit_rows);
    const LabelList val_y = select(ds.labels, val_rows);

    auto record = [&](std::size_t l, const KnnModel& model) {
      const auto nbs = model.batch_neighbors(val_x, k_max);
      for (std::size_t kk = 0; kk < n_k; ++kk) {
        scores[(l * n_k + kk) * static_cast<std::size_t>(config.n_folds) +
               static_cast<std::size_t>(f)] =
            detail::prefix_accuracy(nbs, config.k_grid[kk], fit_y, val_y);
      }
    };

    if (!config.direction) {
      KnnModel model(fit_x, fit_y, k_max);
      for (std::size_t l = 0; l < n_lambda; ++l) record(l, model);
      continue;
    }
    TargetAssignment targets;
    try {
      targets = select_targets(fit_x, fit_y, config.k_targets);
    } catch (const Error& e) {
      throw InvalidArgument(ctx + e.what());
    }
    const auto J = indicator_matrix(targets, fit_rows.size());
    const Matrix X = fit_x.transpose();
    for (std::size_t l = 0; l < n_lambda; ++l) {
      const double lambda = config.lambda_grid[l];
      const auto model = *config.direction == Direction::MoveLabeled
                             ? fit_move_labeled(X, J, lambda, config.solver)
                             : fit_move_query(X, J, lambda);
      record(l, KnnModel(fit_x, fit_y, k_max, Dissimilarity::from(model)));
    }
  }

  const auto folds = static_cast<std::size_t>(config.n_folds);
  bool have_best = false;
  for (std::size_t l = 0; l < n_lambda; ++l) {
    for (std::size_t kk = 0; kk < n_k; ++kk) {
      const double* s = &scores[(l * n_k + kk) * folds];
      double mean = 0.0;
      for (std::size_t f = 0; f < folds; ++f) mean += s[f];
      mean /= static_cast<double>(folds);
      double ss = 0.0;
      for (std::size_t f = 0; f < folds; ++f) ss += (s[f] - mean) * (s[f] - mean);
      CvCell cell{config.lambda_grid[l], config.k_grid[kk], mean,
                  std::sqrt(ss / static_cast<double>(folds - 1))};
      result.table.push_back(cell);
      const bool better =
          !have_best || cell.mean_accuracy > result.best_accuracy ||
          (cell.mean_accuracy == result.best_accuracy &&
           (cell.lambda > result.best_lambda ||
            (cell.lambda == result.best_lambda && cell.k < result.best_k)));
      if (better) {
        have_best = true;
        result.best_accuracy = cell.mean_accuracy;
        result.best_lambda = cell.lambda;
        result.best_k = cell.k;
      }
    }
  }
  return result;
}

}  // namespace ridgeknn
