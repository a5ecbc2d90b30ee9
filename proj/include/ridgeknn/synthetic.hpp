#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "ridgeknn/dataset.hpp"

namespace ridgeknn {

/// Gaussian mixture with heteroscedastic classes and a decaying spectrum.
///
/// Coordinate j carries variance weight w_j proportional to (j + 1)^-decay,
/// normalized to mean 1. Class means are N(0, separation^2 diag(w)); class c
/// has within-class covariance spread_c^2 diag(w) with spread_c spaced
/// linearly from spread_min to spread_max. Object i belongs to class i mod
/// classes, so classes are balanced.
struct GaussianMixtureSpec {
  Index n = 3000;
  Index d = 300;
  int classes = 10;
  double separation = 0.7;
  double spread_min = 0.5;
  double spread_max = 1.5;
  double spectrum_decay = 1.0;
  std::uint64_t seed = 1;
};

inline Dataset make_gaussian_mixture(const GaussianMixtureSpec& spec) {
  require(spec.n >= 1 && spec.d >= 1 && spec.classes >= 1, "mixture needs n, d, classes >= 1");
  require(spec.n >= spec.classes, "mixture needs at least one object per class");
  require(spec.spread_min > 0.0 && spec.spread_max > 0.0, "class spreads must be positive");

  Vector weight(spec.d);
  for (Index j = 0; j < spec.d; ++j) weight(j) = std::pow(static_cast<double>(j + 1), -spec.spectrum_decay);
  weight /= weight.mean();
  const Vector scale = weight.cwiseSqrt();

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix means(spec.classes, spec.d);
  for (Index c = 0; c < means.rows(); ++c)
    for (Index j = 0; j < spec.d; ++j) means(c, j) = spec.separation * scale(j) * normal(rng);

  Dataset ds;
  ds.features.resize(spec.n, spec.d);
  ds.labels.resize(static_cast<std::size_t>(spec.n));
  for (Index i = 0; i < spec.n; ++i) {
    const int c = static_cast<int>(i % spec.classes);
    const double spread =
        spec.classes > 1 ? spec.spread_min + (spec.spread_max - spec.spread_min) * c / (spec.classes - 1)
                         : spec.spread_min;
    for (Index j = 0; j < spec.d; ++j) {
      ds.features(i, j) = means(c, j) + spread * scale(j) * normal(rng);
    }
    ds.labels[static_cast<std::size_t>(i)] = c;
  }
  ds.class_count = spec.classes;
  for (int c = 0; c < spec.classes; ++c) ds.label_names.push_back("c" + std::to_string(c));
  ds.name = "gaussian-mixture";
  return ds;
}

}  // namespace ridgeknn
