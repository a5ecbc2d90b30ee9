#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <tuple>
#include <type_traits>

#include "ridgeknn/knn.hpp"
#include "ridgeknn/split.hpp"

namespace ridgeknn {

/// k-occurrence distribution N_k over the labeled set.
struct NkStats {
  std::vector<std::size_t> counts;
  int k = 10;
  std::size_t n_queries = 0;
  double mean = 0.0;
  double variance = 0.0;
  /// Empty when the variance is zero.
  std::optional<double> skewness;
};

/// counts[i] = number of queries whose `k` nearest labeled points include i.
inline std::vector<std::size_t> nk_counts(const KnnModel& model, const Matrix& queries, int k) {
  require(queries.rows() >= 1, "N_k needs at least one query");
  if (k < 1 || k > model.size()) {
    throw InvalidArgument("N_k: k = " + std::to_string(k) + " must lie in [1, " +
                          std::to_string(model.size()) + "]");
  }
  std::vector<std::size_t> counts(static_cast<std::size_t>(model.size()), 0);
  for (const auto& nbs : model.batch_neighbors(queries, k)) {
    for (const auto& nb : nbs) ++counts[nb.index];
  }
  return counts;
}

/// Population mean and variance (divide by n).
template <typename T>
  requires std::is_arithmetic_v<T>
std::pair<double, double> population_moments(std::span<const T> values) {
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (auto v : values) mean += static_cast<double>(v);
  mean /= n;
  double m2 = 0.0;
  for (auto v : values) {
    const double c = static_cast<double>(v) - mean;
    m2 += c * c;
  }
  return {mean, m2 / n};
}

/// Third standardized central moment with population moments:
/// (sum_i (c_i - mean)^3 / n) / var^(3/2).
template <typename T>
  requires std::is_arithmetic_v<T>
double skewness(std::span<const T> values) {
  require(values.size() >= 2, "skewness needs at least two values");
  const auto [mean, var] = population_moments(values);
  if (!(var > 0.0)) throw ZeroVarianceError("skewness is undefined for zero variance");
  double m3 = 0.0;
  for (auto v : values) {
    const double c = static_cast<double>(v) - mean;
    m3 += c * c * c;
  }
  m3 /= static_cast<double>(values.size());
  return m3 / (var * std::sqrt(var));
}

template <typename T>
double skewness(const std::vector<T>& values) {
  return skewness(std::span<const T>(values));
}

inline NkStats nk_stats(const KnnModel& model, const Matrix& queries, int k) {
  NkStats s;
  s.counts = nk_counts(model, queries, k);
  s.k = k;
  s.n_queries = static_cast<std::size_t>(queries.rows());
  std::tie(s.mean, s.variance) = population_moments(std::span<const std::size_t>(s.counts));
  if (s.variance > 0.0 && s.counts.size() >= 2) s.skewness = skewness(s.counts);
  return s;
}

struct HubnessRow {
  std::string method;
  int k = 10;
  double skewness = 0.0;
  std::size_t max_count = 0;
  double mean_count = 0.0;
};

struct NamedModel {
  std::string name;
  const KnnModel* model;
};

/// One N_k skewness per model, with the test partition of `split` as queries.
/// Every model must be built on the train partition of the same split.
inline std::vector<HubnessRow> hubness_report(const Dataset& ds, const Split& split,
                                              const std::vector<NamedModel>& models, int k = 10) {
  const Matrix queries = select_rows(ds.features, split.test);
  std::vector<HubnessRow> rows;
  for (const auto& [name, model] : models) {
    require(model != nullptr, "hubness_report: null model '" + name + "'");
    require(model->size() == static_cast<Index>(split.train.size()),
            "hubness_report: model '" + name + "' is not built on the split's train partition");
    auto counts = nk_counts(*model, queries, k);
    HubnessRow row;
    row.method = name;
    row.k = k;
    row.skewness = skewness(counts);
    row.max_count = *std::max_element(counts.begin(), counts.end());
    row.mean_count = population_moments(std::span<const std::size_t>(counts)).first;
    rows.push_back(std::move(row));
  }
  return rows;
}

inline void write_hubness_csv(std::ostream& out, const std::vector<HubnessRow>& rows) {
  out << "method,k,skewness,max_count,mean_count\n";
  const auto old = out.precision(10);
  for (const auto& r : rows) {
    out << r.method << ',' << r.k << ',' << r.skewness << ',' << r.max_count << ',' << r.mean_count
        << '\n';
  }
  out.precision(old);
}

}  // namespace ridgeknn
