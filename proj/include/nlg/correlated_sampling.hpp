#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace nlg {

/// Shared i.i.d. stream of pairs (u_k uniform on the universe, t_k uniform on
/// [0, 1)). Every party reads the same stream from position 0; entries are
/// generated lazily and cached. `max_length` = 0 means unbounded.
class SharedStream {
 public:
  SharedStream(std::uint64_t seed, std::uint64_t index, std::size_t max_length = 0);
  /// Entry k as (u_k in {0..universe-1}, t_k). Throws Error(numerical)
  /// "stream exhausted; resample" at or beyond max_length.
  std::pair<int, double> at(std::size_t k, int universe);

 private:
  std::mt19937_64 rng_;
  std::size_t max_length_;
  std::vector<std::pair<double, double>> cache_;
};

struct CorrelatedSample {
  int p_sample = 0;
  int q_sample = 0;
  /// Stream positions consumed by each party.
  std::size_t p_steps = 0;
  std::size_t q_steps = 0;
};

/// Total variation distance of two distributions on the same universe.
double tv_distance(std::span<const double> p, std::span<const double> q);

/// Accept-first-index scheme: each party outputs u_k for the first k with
/// t_k < its own probability of u_k. Requires ||P - Q|| < 1.
CorrelatedSample correlated_sample(std::span<const double> p, std::span<const double> q, SharedStream& stream);

/// Exact joint law of (p_sample, q_sample) under the scheme above.
Eigen::MatrixXd correlated_sampling_joint(std::span<const double> p, std::span<const double> q);

struct CorrelatedSamplingRun {
  std::int64_t trials = 0;
  std::int64_t agreements = 0;
  double agreement_rate = 0.0;
  double tv = 0.0;
  /// Binomial standard error of the agreement rate.
  double sigma = 0.0;
  std::vector<std::int64_t> p_counts;
  std::vector<std::int64_t> q_counts;
};

/// Repeats correlated_sample; trial k reads the stream seeded from (seed, k).
CorrelatedSamplingRun run_correlated_sampling(std::span<const double> p, std::span<const double> q,
                                              std::int64_t trials, std::uint64_t seed);

}  // namespace nlg
