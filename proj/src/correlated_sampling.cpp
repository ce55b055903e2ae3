#include "nlg/correlated_sampling.hpp"

#include "nlg/error.hpp"

#include <algorithm>
#include <cmath>

namespace nlg {

SharedStream::SharedStream(std::uint64_t seed, std::uint64_t index, std::size_t max_length)
    : max_length_(max_length) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  rng_.seed(seq);
}

std::pair<int, double> SharedStream::at(std::size_t k, int universe) {
  if (max_length_ != 0 && k >= max_length_) throw Error(ErrorKind::numerical, "stream exhausted; resample");
  while (cache_.size() <= k) {
    const double u = std::generate_canonical<double, 53>(rng_);
    const double t = std::generate_canonical<double, 53>(rng_);
    cache_.emplace_back(u, t);
  }
  const auto [u, t] = cache_[k];
  return {std::min(universe - 1, static_cast<int>(u * universe)), t};
}

double tv_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ValidationError("dimension mismatch: distributions");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

namespace {

void check_distribution(std::span<const double> p) {
  if (p.empty()) throw ValidationError("empty distribution");
  double s = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw ValidationError("negative probability in distribution");
    s += v;
  }
  if (std::abs(s - 1.0) > 1e-9) throw ValidationError("distribution not normalized");
}

void check_pair(std::span<const double> p, std::span<const double> q) {
  check_distribution(p);
  check_distribution(q);
  if (tv_distance(p, q) >= 1.0 - 1e-12)
    throw ValidationError("correlated sampling requires ||P - Q|| < 1");
}

std::size_t first_accept(std::span<const double> dist, SharedStream& stream) {
  const int universe = static_cast<int>(dist.size());
  for (std::size_t k = 0;; ++k) {
    const auto [u, t] = stream.at(k, universe);
    if (t < dist[static_cast<std::size_t>(u)]) return k;
  }
}

}  // namespace

CorrelatedSample correlated_sample(std::span<const double> p, std::span<const double> q, SharedStream& stream) {
  check_pair(p, q);
  const int universe = static_cast<int>(p.size());
  CorrelatedSample out;
  out.p_steps = first_accept(p, stream);
  out.q_steps = first_accept(q, stream);
  out.p_sample = stream.at(out.p_steps, universe).first;
  out.q_sample = stream.at(out.q_steps, universe).first;
  ++out.p_steps;
  ++out.q_steps;
  return out;
}

Eigen::MatrixXd correlated_sampling_joint(std::span<const double> p, std::span<const double> q) {
  check_pair(p, q);
  const auto n = static_cast<Eigen::Index>(p.size());
  const double z = 1.0 + tv_distance(p, q);
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    const double pa = p[static_cast<std::size_t>(a)], qa = q[static_cast<std::size_t>(a)];
    j(a, a) += std::min(pa, qa) / z;
    for (Eigen::Index b = 0; b < n; ++b) {
      const double pb = p[static_cast<std::size_t>(b)], qb = q[static_cast<std::size_t>(b)];
      // The first acceptance is Alice's alone at a (Bob keeps scanning), or Bob's alone at b.
      j(a, b) += std::max(0.0, pa - qa) * qb / z + pa * std::max(0.0, qb - pb) / z;
    }
  }
  return j;
}

CorrelatedSamplingRun run_correlated_sampling(std::span<const double> p, std::span<const double> q,
                                              std::int64_t trials, std::uint64_t seed) {
  check_pair(p, q);
  if (trials < 1) throw ValidationError("trials must be >= 1");
  CorrelatedSamplingRun r;
  r.trials = trials;
  r.tv = tv_distance(p, q);
  r.p_counts.assign(p.size(), 0);
  r.q_counts.assign(q.size(), 0);
  for (std::int64_t k = 0; k < trials; ++k) {
    SharedStream stream(seed, static_cast<std::uint64_t>(k));
    const auto s = correlated_sample(p, q, stream);
    ++r.p_counts[static_cast<std::size_t>(s.p_sample)];
    ++r.q_counts[static_cast<std::size_t>(s.q_sample)];
    if (s.p_sample == s.q_sample) ++r.agreements;
  }
  r.agreement_rate = static_cast<double>(r.agreements) / static_cast<double>(trials);
  r.sigma = std::sqrt(r.agreement_rate * (1.0 - r.agreement_rate) / static_cast<double>(trials));
  return r;
}

}  // namespace nlg
