#pragma once

#include <Eigen/SVD>

#include "ridgeknn/dataset.hpp"
#include "ridgeknn/preprocess.hpp"

namespace ridgeknn {

/// Linear projection onto the top-r principal axes.
///
/// `components` is d x r with orthonormal columns ordered by non-increasing
/// explained variance. Each column's largest-magnitude entry is positive.
struct PcaModel {
  Vector mean;
  Matrix components;
  Vector explained_variance;

  Index input_dim() const { return components.rows(); }
  Index output_dim() const { return components.cols(); }
};

/// Fits by thin SVD of the centered n x d matrix.
inline PcaModel fit_pca(const Matrix& points, Index r) {
  const Index n = points.rows();
  const Index d = points.cols();
  require(r >= 1, "PCA target dimension must be positive");
  if (r > std::min(n, d)) {
    throw InvalidArgument("PCA target dimension " + std::to_string(r) + " exceeds min(n, d) = " +
                          std::to_string(std::min(n, d)));
  }
  PcaModel model;
  model.mean = column_means(points);
  Matrix centered = points.rowwise() - model.mean.transpose();
  Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinV);
  model.components = svd.matrixV().leftCols(r);
  const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
  model.explained_variance = svd.singularValues().head(r).array().square() / denom;
  for (Index c = 0; c < r; ++c) {
    Index arg = 0;
    model.components.col(c).cwiseAbs().maxCoeff(&arg);
    if (model.components(arg, c) < 0) model.components.col(c) *= -1.0;
  }
  return model;
}

inline PcaModel fit_pca(const Dataset& ds, Index r) { return fit_pca(ds.features, r); }

inline Matrix apply_pca(const PcaModel& model, const Matrix& points) {
  require_dims(points.cols(), model.input_dim(), "apply_pca");
  return (points.rowwise() - model.mean.transpose()) * model.components;
}

inline Dataset apply_pca(const PcaModel& model, const Dataset& ds) {
  return ds.with_features(apply_pca(model, ds.features));
}

/// Maps projected coordinates back into the input space.
inline Matrix reconstruct_pca(const PcaModel& model, const Matrix& projected) {
  require_dims(projected.cols(), model.output_dim(), "reconstruct_pca");
  return (projected * model.components.transpose()).rowwise() + model.mean.transpose();
}

}  // namespace ridgeknn
