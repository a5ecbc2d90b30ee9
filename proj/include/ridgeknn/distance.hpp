#pragma once

#include <cstddef>

namespace ridgeknn {

/// Squared Euclidean distance between two contiguous d-vectors.
///
/// Four interleaved partial sums combined in a fixed order, so the result is
/// bitwise reproducible for a given pair and identical for identical inputs.
inline double squared_distance(const double* a, const double* b, std::ptrdiff_t d) noexcept {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::ptrdiff_t j = 0;
  for (; j + 4 <= d; j += 4) {
    const double t0 = a[j] - b[j];
    const double t1 = a[j + 1] - b[j + 1];
    const double t2 = a[j + 2] - b[j + 2];
    const double t3 = a[j + 3] - b[j + 3];
    s0 += t0 * t0;
    s1 += t1 * t1;
    s2 += t2 * t2;
    s3 += t3 * t3;
  }
  for (; j < d; ++j) {
    const double t = a[j] - b[j];
    s0 += t * t;
  }
  return (s0 + s1) + (s2 + s3);
}

}  // namespace ridgeknn
