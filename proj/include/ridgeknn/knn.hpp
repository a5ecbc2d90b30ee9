#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include "ridgeknn/distance.hpp"
#include "ridgeknn/transform.hpp"

namespace ridgeknn {

/// Query-to-labeled dissimilarity f(x, z).
///
///   Euclidean           |x - z|
///   TransformedLabeled  |x - W z|    (move-labeled)
///   TransformedQuery    |W x - z|    (move-query)
///   BothSides           |L x - L z|  (Mahalanobis-style, externally supplied L)
///
/// Neighbors are always ranked by the squared value; `squared` only controls
/// what neighbors() reports.
struct Dissimilarity {
  enum class Kind { Euclidean, TransformedLabeled, TransformedQuery, BothSides };

  Kind kind = Kind::Euclidean;
  Matrix map;
  bool squared = true;

  static Dissimilarity euclidean() { return {}; }
  static Dissimilarity move_labeled(Matrix W) { return {Kind::TransformedLabeled, std::move(W)}; }
  static Dissimilarity move_query(Matrix W) { return {Kind::TransformedQuery, std::move(W)}; }
  static Dissimilarity both_sides(Matrix L) { return {Kind::BothSides, std::move(L)}; }

  static Dissimilarity from(const TransformModel& model) {
    return model.direction == Direction::MoveLabeled ? move_labeled(model.W)
                                                     : move_query(model.W);
  }

  bool maps_labeled() const { return kind == Kind::TransformedLabeled || kind == Kind::BothSides; }
  bool maps_query() const { return kind == Kind::TransformedQuery || kind == Kind::BothSides; }

  std::string name() const {
    switch (kind) {
      case Kind::Euclidean: return "euclidean";
      case Kind::TransformedLabeled: return "move-labeled";
      case Kind::TransformedQuery: return "move-query";
      case Kind::BothSides: return "both-sides";
    }
    return "unknown";
  }

  /// f(x, z) evaluated directly from the definition.
  double operator()(const Vector& x, const Vector& z) const {
    double sq = 0.0;
    switch (kind) {
      case Kind::Euclidean: sq = (x - z).squaredNorm(); break;
      case Kind::TransformedLabeled: sq = (x - map * z).squaredNorm(); break;
      case Kind::TransformedQuery: sq = (map * x - z).squaredNorm(); break;
      case Kind::BothSides: sq = (map * x - map * z).squaredNorm(); break;
    }
    return squared ? sq : std::sqrt(sq);
  }
};

struct Neighbor {
  std::size_t index;
  double value;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Majority label among `neighbors` (already sorted nearest first). A tie
/// between labels goes to the label whose nearest member ranks first.
inline Label vote(std::span<const Neighbor> neighbors, const LabelList& labels) {
  require(!neighbors.empty(), "vote over an empty neighbor list");
  std::vector<std::pair<Label, std::size_t>> tally;  // (label, count) in first-seen order
  for (const auto& nb : neighbors) {
    const Label y = labels[nb.index];
    auto it = std::find_if(tally.begin(), tally.end(), [y](const auto& t) { return t.first == y; });
    if (it == tally.end()) {
      tally.emplace_back(y, 1);
    } else {
      ++it->second;
    }
  }
  auto best = tally.begin();
  for (auto it = tally.begin(); it != tally.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

/// Exact brute-force k-NN classifier over a fixed labeled set.
///
/// For move-labeled and both-sides dissimilarities the labeled points are
/// mapped once at construction, so |x - W z|^2 is computed as |x - z'|^2 with
/// z' = W z. Queries are mapped per call when the dissimilarity requires it.
class KnnModel {
 public:
  KnnModel(const Matrix& labeled_points, LabelList labels, int k,
           Dissimilarity dissimilarity = Dissimilarity::euclidean())
      : labels_(std::move(labels)), k_(k), diss_(std::move(dissimilarity)) {
    const Index n = labeled_points.rows();
    require(n >= 1, "k-NN model needs at least one labeled point");
    require(static_cast<Index>(labels_.size()) == n, "label count does not match labeled points");
    require(k_ >= 1 && k_ <= n, "k must lie in [1, n]; got k = " + std::to_string(k_) +
                                    " with n = " + std::to_string(n));
    input_dim_ = labeled_points.cols();
    if (diss_.kind != Dissimilarity::Kind::Euclidean) {
      require(diss_.map.size() > 0, "dissimilarity map is empty");
    }
    switch (diss_.kind) {
      case Dissimilarity::Kind::Euclidean:
        reference_ = labeled_points.transpose();
        break;
      case Dissimilarity::Kind::TransformedLabeled:
        require_dims(diss_.map.cols(), labeled_points.cols(), "move-labeled map");
        require_dims(diss_.map.rows(), labeled_points.cols(), "move-labeled map");
        reference_ = map_columns(diss_.map, labeled_points.transpose());
        break;
      case Dissimilarity::Kind::TransformedQuery:
        require_dims(diss_.map.rows(), labeled_points.cols(), "move-query map");
        input_dim_ = diss_.map.cols();
        reference_ = labeled_points.transpose();
        break;
      case Dissimilarity::Kind::BothSides:
        require_dims(diss_.map.cols(), labeled_points.cols(), "both-sides map");
        reference_ = map_columns(diss_.map, labeled_points.transpose());
        break;
    }
  }

  Index size() const { return reference_.cols(); }
  Index query_dim() const { return input_dim_; }
  int k() const { return k_; }
  const LabelList& labels() const { return labels_; }
  const Dissimilarity& dissimilarity() const { return diss_; }
  /// Labeled points in the space where distances are measured, one per column.
  const Matrix& reference() const { return reference_; }

  /// The `count` (default k) nearest labeled points, nearest first, ties by
  /// lower index.
  std::vector<Neighbor> neighbors(const Vector& query, std::optional<int> count = {}) const {
    require_dims(query.size(), input_dim_, "k-NN query");
    const int c = resolve(count);
    if (diss_.maps_query()) {
      const Vector mapped = map_columns(diss_.map, query);
      return search(mapped.data(), c);
    }
    return search(query.data(), c);
  }

  /// neighbors() for every row of `queries`.
  std::vector<std::vector<Neighbor>> batch_neighbors(const Matrix& queries,
                                                     std::optional<int> count = {}) const {
    require_dims(queries.cols(), input_dim_, "k-NN query");
    const int c = resolve(count);
    const Matrix cols = diss_.maps_query() ? map_columns(diss_.map, queries.transpose())
                                           : Matrix(queries.transpose());
    std::vector<std::vector<Neighbor>> out(static_cast<std::size_t>(cols.cols()));
    for (Index q = 0; q < cols.cols(); ++q) out[static_cast<std::size_t>(q)] = search(cols.col(q).data(), c);
    return out;
  }

  Label classify(const Vector& query) const { return vote(neighbors(query), labels_); }

  LabelList predict(const Matrix& queries) const {
    LabelList out;
    out.reserve(static_cast<std::size_t>(queries.rows()));
    for (const auto& nbs : batch_neighbors(queries)) out.push_back(vote(nbs, labels_));
    return out;
  }

  /// Fraction of queries classified as their true label.
  double evaluate(const Matrix& queries, const LabelList& true_labels) const {
    require(queries.rows() >= 1, "evaluate needs at least one query");
    if (static_cast<Index>(true_labels.size()) != queries.rows()) {
      throw DimensionError("evaluate: " + std::to_string(true_labels.size()) + " labels for " +
                           std::to_string(queries.rows()) + " queries");
    }
    const auto predicted = predict(queries);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == true_labels[i];
    return static_cast<double>(hits) / static_cast<double>(predicted.size());
  }

 private:
  // One matrix-vector product per column, so a point maps to the same bits
  // whether it arrives alone or in a batch.
  static Matrix map_columns(const Matrix& map, const Matrix& cols) {
    Matrix out(map.rows(), cols.cols());
    for (Index j = 0; j < cols.cols(); ++j) out.col(j).noalias() = map * cols.col(j);
    return out;
  }

  int resolve(std::optional<int> count) const {
    const int c = count.value_or(k_);
    require(c >= 1 && c <= size(), "neighbor count must lie in [1, n]; got " + std::to_string(c));
    return c;
  }

  std::vector<Neighbor> search(const double* q, int count) const {
    const Index n = reference_.cols();
    const Index d = reference_.rows();
    std::vector<std::pair<double, std::size_t>> all(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
      all[static_cast<std::size_t>(i)] = {squared_distance(q, reference_.col(i).data(), d),
                                          static_cast<std::size_t>(i)};
    }
    std::partial_sort(all.begin(), all.begin() + count, all.end());
    std::vector<Neighbor> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int r = 0; r < count; ++r) {
      const auto& [sq, idx] = all[static_cast<std::size_t>(r)];
      out.push_back({idx, diss_.squared ? sq : std::sqrt(sq)});
    }
    return out;
  }

  Matrix reference_;
  LabelList labels_;
  int k_;
  Dissimilarity diss_;
  Index input_dim_ = 0;
};

}  // namespace ridgeknn
