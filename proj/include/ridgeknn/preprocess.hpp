#pragma once

#include <cmath>
#include <string>

#include "ridgeknn/dataset.hpp"

namespace ridgeknn {

/// Per-column affine map x -> (x - offset) / scale, fitted on one set of
/// points and applied to others.
struct ColumnScaling {
  Vector offset;
  Vector scale;

  Matrix apply(const Matrix& points) const {
    require_dims(points.cols(), offset.size(), "column scaling");
    return (points.rowwise() - offset.transpose()).array().rowwise() / scale.transpose().array();
  }
  Dataset apply(const Dataset& ds) const { return ds.with_features(apply(ds.features)); }
};

inline Vector column_means(const Matrix& points) {
  require(points.rows() >= 1, "column mean of an empty matrix");
  return points.colwise().mean().transpose();
}

inline ColumnScaling fit_centering(const Matrix& points) {
  return {column_means(points), Vector::Ones(points.cols())};
}

/// Sample (n - 1) standard deviations; throws naming the first constant column.
inline ColumnScaling fit_zscore(const Matrix& points) {
  require(points.rows() >= 2, "z-scoring needs at least two rows");
  Vector mean = column_means(points);
  Matrix centered = points.rowwise() - mean.transpose();
  Vector sd = (centered.colwise().squaredNorm() / static_cast<double>(points.rows() - 1))
                  .cwiseSqrt()
                  .transpose();
  for (Index j = 0; j < sd.size(); ++j) {
    if (!(sd(j) > 0.0)) {
      throw InvalidArgument("column " + std::to_string(j) +
                            " has zero standard deviation; cannot convert to z-scores");
    }
  }
  return {std::move(mean), std::move(sd)};
}

struct Centered {
  Dataset data;
  Vector mean;
};

inline Centered center(const Dataset& ds) {
  auto scaling = fit_centering(ds.features);
  return {scaling.apply(ds), std::move(scaling.offset)};
}

inline Dataset zscore(const Dataset& ds) { return fit_zscore(ds.features).apply(ds); }

}  // namespace ridgeknn
