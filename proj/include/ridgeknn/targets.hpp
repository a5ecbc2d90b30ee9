#pragma once

#include <Eigen/SparseCore>

#include <algorithm>
#include <utility>

#include "ridgeknn/dataset.hpp"
#include "ridgeknn/distance.hpp"

namespace ridgeknn {

/// Same-class regression targets of each training object.
///
/// Indices are positions within the training set (0..n_train-1), not rows of
/// the parent dataset. targets_of[i] is sorted by non-decreasing original
/// Euclidean distance to object i, ties by lower position.
struct TargetAssignment {
  std::vector<IndexList> targets_of;
  int k_targets = 1;

  std::size_t size() const { return targets_of.size(); }
};

/// Selects up to `k_targets` nearest same-class objects for every row of
/// `points` (n x d). Classes with fewer than k_targets + 1 members contribute
/// all their other members.
inline TargetAssignment select_targets(const Matrix& points, const LabelList& labels,
                                       int k_targets) {
  require(k_targets >= 0, "k_targets must be non-negative");
  require(static_cast<Index>(labels.size()) == points.rows(),
          "select_targets: label count does not match point count");
  const auto n = labels.size();
  TargetAssignment out;
  out.k_targets = k_targets;
  out.targets_of.resize(n);
  if (k_targets == 0) return out;

  // Column-major copy so each object is contiguous.
  const Matrix cols = points.transpose();
  const Index d = cols.rows();

  std::vector<std::pair<Label, std::size_t>> by_class(n);
  for (std::size_t i = 0; i < n; ++i) by_class[i] = {labels[i], i};
  std::sort(by_class.begin(), by_class.end());

  std::vector<std::pair<double, std::size_t>> cand;
  for (std::size_t lo = 0; lo < n;) {
    std::size_t hi = lo;
    while (hi < n && by_class[hi].first == by_class[lo].first) ++hi;
    const std::size_t members = hi - lo;
    if (members < 2) {
      throw InvalidArgument("class " + std::to_string(by_class[lo].first) +
                            " has a single training object; it cannot have a same-class target");
    }
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k_targets), members - 1);
    for (std::size_t a = lo; a < hi; ++a) {
      const std::size_t i = by_class[a].second;
      cand.clear();
      for (std::size_t b = lo; b < hi; ++b) {
        const std::size_t j = by_class[b].second;
        if (j == i) continue;
        cand.emplace_back(squared_distance(cols.col(static_cast<Index>(i)).data(),
                                           cols.col(static_cast<Index>(j)).data(), d),
                          j);
      }
      std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(take), cand.end());
      auto& t = out.targets_of[i];
      t.reserve(take);
      for (std::size_t r = 0; r < take; ++r) t.push_back(cand[r].second);
    }
    lo = hi;
  }
  return out;
}

/// Targets among the `train` rows of `ds`; result indices are positions in `train`.
inline TargetAssignment select_targets(const Dataset& ds, const IndexList& train, int k_targets) {
  return select_targets(select_rows(ds.features, train), select(ds.labels, train), k_targets);
}

using IndicatorMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// n x n 0/1 matrix J with J(i, j) = 1 iff j is a target of i.
inline IndicatorMatrix indicator_matrix(const TargetAssignment& assignment, std::size_t n) {
  if (assignment.size() != n) {
    throw DimensionError("indicator_matrix: assignment covers " +
                         std::to_string(assignment.size()) + " objects, expected " +
                         std::to_string(n));
  }
  std::vector<Eigen::Triplet<double>> entries;
  for (std::size_t i = 0; i < n; ++i) {
    for (auto j : assignment.targets_of[i]) {
      if (j >= n) {
        throw InvalidArgument("target index " + std::to_string(j) + " of object " +
                              std::to_string(i) + " is out of range");
      }
      entries.emplace_back(static_cast<Index>(i), static_cast<Index>(j), 1.0);
    }
  }
  IndicatorMatrix J(static_cast<Index>(n), static_cast<Index>(n));
  J.setFromTriplets(entries.begin(), entries.end(), [](double a, double) { return a; });
  return J;
}

}  // namespace ridgeknn
