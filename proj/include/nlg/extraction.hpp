#pragma once

#include "nlg/certifier.hpp"
#include "nlg/games.hpp"
#include "nlg/repetition.hpp"
#include "nlg/strategies.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace nlg {

struct ExtractionReport {
  /// Classical behavior produced for G. Rows of skipped question pairs are zero.
  Behavior behavior;
  double win_probability = 0.0;
  /// Ex_{j not in S} P(W_j | W_S^{>= 1 - tau}).
  double target_win_probability = 0.0;
  /// Distance of the protocol's (T, j, r^A, r^B, x, y, a, b) law from
  /// Ex_{T,j} P_{R X_j Y_j A_j B_j | W} placed on r^A = r^B. Exact mode only.
  double tv_to_target = 0.0;
  /// Probability that both correlated samples agree.
  double agreement = 0.0;
  /// mu-mass of (T, j, x, y) cases skipped because a conditional was
  /// undefined or the samplers' distributions were disjoint.
  double skipped_mass = 0.0;
  std::vector<std::pair<int, int>> skipped_pairs;
  double p_ws = 0.0;
  ErrorParams params;
  std::int64_t trials = 0;
};

/// Exact output law of the extraction protocol, averaged over T, j, the
/// inputs and the shared randomness.
ExtractionReport extraction_protocol_exact(const AugmentedTable& aug, const Game& g, double tau, double beta,
                                           double ent_bits);

/// Runs the protocol `trials` times with seeded shared randomness; the
/// behavior is the empirical answer frequency per question pair.
ExtractionReport extraction_protocol_sampled(const AugmentedTable& aug, const Game& g, double tau, double beta,
                                             double ent_bits, std::int64_t trials, std::uint64_t seed);

}  // namespace nlg
