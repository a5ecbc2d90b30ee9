#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <random>

#include "ridgeknn/hubness.hpp"

namespace ridgeknn {

/// Spatial-centrality bias: expected gap between squared distances from a
/// zero-mean query to two N(0, s^2 I) samples whose squared norms differ by
/// gamma standard deviations of |z|^2. Equals gamma * s^2 * sqrt(2d).
inline double theoretical_delta(double d, double s, double gamma) {
  return gamma * s * s * std::sqrt(2.0 * d);
}

/// Standard deviation of |z|^2 for z ~ N(0, s^2 I_d).
inline double squared_norm_sd(double d, double s) { return s * s * std::sqrt(2.0 * d); }

struct CentralityExperiment {
  int d = 300;
  double s = 1.0;
  double gamma = 1.0;
  std::size_t n_queries = 100000;
  std::uint64_t seed = 1;
  /// Queries are N(shift * u, query_sd^2 I) with u the unit vector along z2 - z1.
  double query_sd = 1.0;
  double query_shift = 0.0;

  void validate() const {
    require(d >= 1, "centrality experiment needs d >= 1");
    require(s > 0.0, "centrality experiment needs s > 0");
    require(query_sd > 0.0, "query standard deviation must be positive");
    require(n_queries >= 1, "centrality experiment needs at least one query");
  }
};

struct CentralityResult {
  CentralityExperiment experiment;
  double delta_hat = 0.0;
  double delta_theory = 0.0;
  double std_error = 0.0;
};

namespace detail {

/// Independent engine per (seed, stream, block); results do not depend on how
/// blocks are scheduled.
inline std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t block) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(block),
                    static_cast<std::uint32_t>(block >> 32)};
  return std::mt19937_64(seq);
}

inline Vector gaussian_vector(std::mt19937_64& rng, Index d, double sd) {
  std::normal_distribution<double> normal(0.0, sd);
  Vector v(d);
  for (Index j = 0; j < d; ++j) v(j) = normal(rng);
  return v;
}

constexpr std::size_t kBlock = 4096;
constexpr std::uint64_t kPairStream = 1;
constexpr std::uint64_t kQueryStream = 2;

}  // namespace detail

/// Pair (z1, z2) with |z2|^2 - |z1|^2 = gamma * sd(|z|^2): z1 ~ N(0, s^2 I),
/// z2 a fresh Gaussian direction rescaled to the required norm.
inline std::pair<Vector, Vector> centrality_pair(const CentralityExperiment& exp) {
  exp.validate();
  auto rng = detail::stream_engine(exp.seed, detail::kPairStream, 0);
  Vector z1 = detail::gaussian_vector(rng, exp.d, exp.s);
  const double target = z1.squaredNorm() + exp.gamma * squared_norm_sd(exp.d, exp.s);
  if (!(target > 0.0)) {
    throw Error("cannot construct a pair with gamma = " + std::to_string(exp.gamma) + " in d = " +
                std::to_string(exp.d) + ": required squared norm is not positive");
  }
  Vector u = detail::gaussian_vector(rng, exp.d, 1.0);
  while (u.squaredNorm() == 0.0) u = detail::gaussian_vector(rng, exp.d, 1.0);
  Vector z2 = u.normalized() * std::sqrt(target);
  return {std::move(z1), std::move(z2)};
}

/// Monte-Carlo mean of g(x) over the experiment's query distribution, with
/// its standard error. `g` receives each sampled query.
template <typename F>
std::pair<double, double> query_expectation(const CentralityExperiment& exp, const Vector& mean,
                                            F&& g) {
  const std::size_t n = exp.n_queries;
  double run_mean = 0.0;
  double m2 = 0.0;
  std::size_t seen = 0;
  Vector x(exp.d);
  for (std::size_t start = 0, block = 0; start < n; start += detail::kBlock, ++block) {
    auto rng = detail::stream_engine(exp.seed, detail::kQueryStream, block);
    std::normal_distribution<double> normal(0.0, exp.query_sd);
    const std::size_t stop = std::min(n, start + detail::kBlock);
    for (std::size_t q = start; q < stop; ++q) {
      for (Index j = 0; j < exp.d; ++j) x(j) = mean(j) + normal(rng);
      const double v = g(x);
      ++seen;
      const double delta = v - run_mean;
      run_mean += delta / static_cast<double>(seen);
      m2 += delta * (v - run_mean);
    }
  }
  const double se = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
  return {run_mean, se};
}

/// Estimates E|x - z2|^2 - E|x - z1|^2 for the constructed pair.
inline CentralityResult simulate_delta(const CentralityExperiment& exp) {
  const auto [z1, z2] = centrality_pair(exp);
  Vector mean = Vector::Zero(exp.d);
  if (exp.query_shift != 0.0) {
    const Vector dir = z2 - z1;
    if (dir.norm() > 0.0) mean = exp.query_shift * dir.normalized();
  }
  const auto d = static_cast<std::ptrdiff_t>(exp.d);
  const auto [est, se] = query_expectation(exp, mean, [&](const Vector& x) {
    return squared_distance(x.data(), z2.data(), d) - squared_distance(x.data(), z1.data(), d);
  });
  CentralityResult r;
  r.experiment = exp;
  r.delta_hat = est;
  r.delta_theory = theoretical_delta(exp.d, exp.s, exp.gamma);
  r.std_error = se;
  return r;
}

/// Grid over (d, s, gamma), in that nesting order; each cell reuses `base`
/// for the remaining fields.
inline std::vector<CentralityResult> centrality_sweep(const std::vector<int>& dims,
                                                      const std::vector<double>& sds,
                                                      const std::vector<double>& gammas,
                                                      const CentralityExperiment& base) {
  std::vector<CentralityResult> out;
  for (int d : dims) {
    for (double s : sds) {
      for (double g : gammas) {
        auto exp = base;
        exp.d = d;
        exp.s = s;
        exp.gamma = g;
        out.push_back(simulate_delta(exp));
      }
    }
  }
  return out;
}

inline void write_centrality_csv(std::ostream& out, const std::vector<CentralityResult>& rows) {
  out << "d,s,gamma,n_queries,delta_hat,delta_theory,std_error\n";
  const auto old = out.precision(12);
  for (const auto& r : rows) {
    out << r.experiment.d << ',' << r.experiment.s << ',' << r.experiment.gamma << ','
        << r.experiment.n_queries << ',' << r.delta_hat << ',' << r.delta_theory << ','
        << r.std_error << '\n';
  }
  out.precision(old);
}

/// Ranks starting at 1; tied values share their average rank.
inline std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t lo = 0; lo < order.size();) {
    std::size_t hi = lo;
    while (hi < order.size() && values[order[hi]] == values[order[lo]]) ++hi;
    const double r = 0.5 * static_cast<double>(lo + hi - 1) + 1.0;
    for (std::size_t t = lo; t < hi; ++t) ranks[order[t]] = r;
    lo = hi;
  }
  return ranks;
}

inline double spearman_correlation(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size() && a.size() >= 2, "spearman needs two equal-length samples");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const Eigen::Map<const Vector> va(ra.data(), static_cast<Index>(ra.size()));
  const Eigen::Map<const Vector> vb(rb.data(), static_cast<Index>(rb.size()));
  const Vector ca = va.array() - va.mean();
  const Vector cb = vb.array() - vb.mean();
  const double denom = ca.norm() * cb.norm();
  return denom > 0.0 ? ca.dot(cb) / denom : 0.0;
}

struct HubTendency {
  double spearman = 0.0;
  std::vector<std::size_t> counts;
};

/// Rank correlation between closeness to the data mean (-|z_i|) and N_10(i)
/// for data ~ N(0, s_data^2 I_d) and queries ~ N(0, I_d).
inline HubTendency hub_tendency_demo(int d, double s_data, std::size_t n_data,
                                     std::size_t n_queries, std::uint64_t seed) {
  require(d >= 1 && s_data > 0.0, "hub tendency demo needs d >= 1 and s_data > 0");
  require(n_data >= 20, "hub tendency demo needs at least 20 data points");
  require(n_queries >= 1, "hub tendency demo needs at least one query");
  auto data_rng = detail::stream_engine(seed, 3, 0);
  auto query_rng = detail::stream_engine(seed, 4, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix data(static_cast<Index>(n_data), d);
  for (Index i = 0; i < data.rows(); ++i)
    for (Index j = 0; j < d; ++j) data(i, j) = s_data * normal(data_rng);
  Matrix queries(static_cast<Index>(n_queries), d);
  for (Index i = 0; i < queries.rows(); ++i)
    for (Index j = 0; j < d; ++j) queries(i, j) = normal(query_rng);

  KnnModel model(data, LabelList(n_data, 0), 10);
  HubTendency out;
  out.counts = nk_counts(model, queries, 10);
  std::vector<double> closeness(n_data), hubs(n_data);
  for (std::size_t i = 0; i < n_data; ++i) {
    closeness[i] = -data.row(static_cast<Index>(i)).norm();
    hubs[i] = static_cast<double>(out.counts[i]);
  }
  out.spearman = spearman_correlation(closeness, hubs);
  return out;
}

}  // namespace ridgeknn
