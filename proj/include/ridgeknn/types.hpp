#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <string>
#include <vector>

#include "ridgeknn/error.hpp"

namespace ridgeknn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Index = Eigen::Index;
using IndexList = std::vector<std::size_t>;
using Label = int;
using LabelList = std::vector<Label>;

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

inline void require_dims(Index got, Index expected, const std::string& what) {
  if (got != expected) {
    throw DimensionError(what + ": expected dimension " + std::to_string(expected) +
                         ", got " + std::to_string(got));
  }
}

/// Rows of `m` selected by `rows`, in order.
inline Matrix select_rows(const Matrix& m, const IndexList& rows) {
  Matrix out(static_cast<Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= static_cast<std::size_t>(m.rows())) {
      throw InvalidArgument("row index " + std::to_string(rows[i]) + " out of range");
    }
    out.row(static_cast<Index>(i)) = m.row(static_cast<Index>(rows[i]));
  }
  return out;
}

template <typename T>
std::vector<T> select(const std::vector<T>& v, const IndexList& idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(v.at(i));
  return out;
}

}  // namespace ridgeknn
