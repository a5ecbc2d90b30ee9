#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>

#include "ridgeknn/dataset.hpp"

namespace ridgeknn {

/// Stratified train/test partition of [0, n). Both index lists are sorted.
struct Split {
  IndexList train;
  IndexList test;
  std::uint64_t seed = 0;
  double train_fraction = 0.7;
};

/// Draws a stratified split with |train| = round(train_fraction * n).
///
/// Every class keeps at least one member on the train side. Per-class train
/// counts start at floor(fraction * class size); leftover slots go to the
/// classes with the largest fractional remainder, lower class id first.
inline Split split(const Dataset& ds, double train_fraction, std::uint64_t seed) {
  require(train_fraction > 0.0 && train_fraction < 1.0, "train fraction must lie in (0, 1)");
  const auto sizes = ds.class_sizes();
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    if (sizes[c] < 2) {
      throw InvalidArgument("class '" + ds.label_name(static_cast<Label>(c)) + "' has " +
                            std::to_string(sizes[c]) + " member(s); splitting needs at least 2");
    }
  }
  const auto n = static_cast<std::size_t>(ds.size());
  const auto total = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));

  const std::size_t classes = sizes.size();
  if (total < classes) {
    throw InvalidArgument("train fraction too small: " + std::to_string(total) +
                          " train objects cannot cover " + std::to_string(classes) + " classes");
  }
  std::vector<std::size_t> quota(classes);
  std::vector<double> remainder(classes);
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < classes; ++c) {
    const double exact = train_fraction * static_cast<double>(sizes[c]);
    quota[c] = std::clamp<std::size_t>(static_cast<std::size_t>(std::floor(exact)), 1, sizes[c]);
    remainder[c] = exact - static_cast<double>(quota[c]);
    assigned += quota[c];
  }
  std::vector<std::size_t> order(classes);
  std::iota(order.begin(), order.end(), 0);
  if (assigned < total) {
    std::stable_sort(order.begin(), order.end(),
                     [&](auto a, auto b) { return remainder[a] > remainder[b]; });
    for (std::size_t i = 0; assigned < total; i = (i + 1) % classes) {
      if (quota[order[i]] < sizes[order[i]]) {
        ++quota[order[i]];
        ++assigned;
      }
    }
  } else if (assigned > total) {
    std::stable_sort(order.begin(), order.end(),
                     [&](auto a, auto b) { return remainder[a] < remainder[b]; });
    for (std::size_t i = 0; assigned > total; i = (i + 1) % classes) {
      if (quota[order[i]] > 1) {
        --quota[order[i]];
        --assigned;
      }
    }
  }

  std::vector<IndexList> members(classes);
  for (std::size_t i = 0; i < n; ++i) members[static_cast<std::size_t>(ds.labels[i])].push_back(i);

  Split out;
  out.seed = seed;
  out.train_fraction = train_fraction;
  std::mt19937_64 rng(seed);
  for (std::size_t c = 0; c < classes; ++c) {
    std::shuffle(members[c].begin(), members[c].end(), rng);
    out.train.insert(out.train.end(), members[c].begin(), members[c].begin() + static_cast<std::ptrdiff_t>(quota[c]));
    out.test.insert(out.test.end(), members[c].begin() + static_cast<std::ptrdiff_t>(quota[c]), members[c].end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

}  // namespace ridgeknn
