#pragma once

#include "nlg/games.hpp"
#include "nlg/joint_table.hpp"
#include "nlg/strategies.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nlg {

/// Exact binomial upper tail P[Bin(n, p) >= required_wins(threshold, n)].
double iid_threshold_win_prob(double p, int n, double threshold);

/// 1 - exp(-(nu - eta)^2 n / 3). Requires 0 <= eta <= nu; eta == nu gives 0.
double hoeffding_completeness_bound(double nu, double eta, int n);

struct ThresholdEstimate {
  std::int64_t trials = 0;
  std::int64_t passes = 0;
  double pass_rate = 0.0;
  /// Wilson score interval at 95%.
  double ci_low = 0.0;
  double ci_high = 0.0;
  double half_width() const { return 0.5 * (ci_high - ci_low); }
};

/// Wilson 95% interval for `passes` out of `trials`.
ThresholdEstimate wilson_estimate(std::int64_t passes, std::int64_t trials);

/// Plays the threshold game `trials` times with i.i.d. rounds drawn from
/// mu and `single_round`. Trial k uses a generator seeded from (seed, k).
ThresholdEstimate monte_carlo_threshold(const Behavior& single_round, const ThresholdGameSpec& spec,
                                        std::int64_t trials, std::uint64_t seed);
ThresholdEstimate monte_carlo_threshold(const QuantumStrategy& s, const ThresholdGameSpec& spec,
                                        std::int64_t trials, std::uint64_t seed);

/// Vector alphabets of n rounds are encoded round-major: round 0 is the most
/// significant digit, so x-vector (x_0, ..., x_{n-1}) has index
/// sum_i x_i * |X|^(n-1-i).
int encode_vector(std::span<const int> digits, int base);
std::vector<int> decode_vector(int index, int base, int rounds);

/// n-fold product of a single-round behavior, on vector alphabets.
Behavior iid_lift(const Behavior& single_round, int n);

/// Exact P_{XYAB} = mu^n(x, y) P(a, b | x, y) for an n-round behavior on vector
/// alphabets. Schema: X0..X{n-1}, Y0.., A0.., B0...
JointTable enumerate_joint(const Behavior& n_round, const Game& g, int n);
/// Shorthand for enumerate_joint(iid_lift(single_round, n), g, n).
JointTable enumerate_iid(const Behavior& single_round, const Game& g, int n);

std::string round_variable(char kind, int round);

/// Joint table extended with dependency-breaking variables. O{i} takes
/// value x_i when round i's coin selects Alice and |X| + y_i when it selects
/// Bob; each coin is uniform. The full variable Omega is (O0..O{n-1},
/// X_S, Y_S).
struct AugmentedTable {
  JointTable table;
  int rounds = 0;
  int num_x = 0;
  int num_y = 0;
  /// Sorted distinct round indices.
  std::vector<int> s;

  /// Schema indices of O0..O{n-1} followed by X_i, Y_i for i in S.
  std::vector<int> omega_variables() const;
};

/// Prepends O0..O{n-1}; S may repeat indices (duplicates collapse).
AugmentedTable augment_dependency_breaking(const JointTable& table, int rounds, int num_x, int num_y,
                                          std::vector<int> s);

/// max over omega with positive probability of || P_{XY|omega} - P_{X|omega} P_{Y|omega} ||.
double dependency_breaking_defect(const AugmentedTable& t);

struct WinEventSpec {
  enum class Kind { round, global_threshold, subset_threshold };
  Kind kind = Kind::global_threshold;
  int round = 0;
  /// Required fraction of won rounds (1 - gamma or 1 - tau).
  double threshold = 0.0;
  /// Rounds counted by a subset event; a multiset, counted with multiplicity.
  std::vector<int> subset;

  static WinEventSpec round_win(int j);
  static WinEventSpec global(double threshold);
  static WinEventSpec on_subset(std::vector<int> s, double threshold);

  /// Evaluates the event on per-round win indicators.
  bool holds(std::span<const char> round_wins) const;
};

/// Per-round win indicators of a full assignment of a table that contains
/// X{i}, Y{i}, A{i}, B{i} for every round.
class RoundWinEvaluator {
 public:
  RoundWinEvaluator(const JointTable& t, const Game& g, int rounds);
  void operator()(std::span<const int> assignment, std::span<char> wins) const;
  int rounds() const { return rounds_; }

 private:
  const Game* g_;
  int rounds_;
  std::vector<int> x_, y_, a_, b_;
};

int count_rounds(const JointTable& t);

std::pair<JointTable, double> condition_on_event(const JointTable& t, const WinEventSpec& event, const Game& g);
double event_probability(const JointTable& t, const WinEventSpec& event, const Game& g);

struct Prop32Result {
  /// The chosen multiset, sorted.
  std::vector<int> s;
  /// Ex_{j not in S} P(W_j | W_S^{>= 1 - tau}).
  double conditional_win = 0.0;
  double p_ws = 0.0;
  /// P(W^{>= 1 - gamma}).
  double p_global = 0.0;
  int candidates_evaluated = 0;
  int null_candidates = 0;
};

/// Statistics of one candidate multiset; conditional_win is NaN when the event is null.
Prop32Result prop32_evaluate(const JointTable& t, const Game& g, double gamma, double tau, std::vector<int> s);

/// Draws `samples` multisets of t independent uniform rounds and keeps the one
/// with the largest conditional average round-win probability (ties keep the
/// earliest draw).
Prop32Result prop32_search(const JointTable& t, const Game& g, double gamma, double tau, int subset_size,
                           int samples, std::uint64_t seed);

}  // namespace nlg
