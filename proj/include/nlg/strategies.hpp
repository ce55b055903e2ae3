#pragma once

#include "nlg/games.hpp"
#include "nlg/quantum.hpp"

#include <cstdint>
#include <vector>

namespace nlg {

/// One POVM per question; element [q][outcome]. Elements are stored as the
/// POVM effects themselves (not their square roots).
using MeasurementFamily = std::vector<std::vector<ComplexMatrix>>;

/// Shared state plus local POVM families.
class QuantumStrategy {
 public:
  static QuantumStrategy make(int dim_a, int dim_b, DensityMatrix state, MeasurementFamily a_measurements,
                              MeasurementFamily b_measurements);

  int dim_a() const { return dim_a_; }
  int dim_b() const { return dim_b_; }
  const DensityMatrix& state() const { return state_; }
  const MeasurementFamily& a_measurements() const { return a_; }
  const MeasurementFamily& b_measurements() const { return b_; }
  int num_x() const { return static_cast<int>(a_.size()); }
  int num_y() const { return static_cast<int>(b_.size()); }
  int num_a() const { return static_cast<int>(a_.front().size()); }
  int num_b() const { return static_cast<int>(b_.front().size()); }
  bool is_pure() const { return state_.is_pure(); }

  QuantumStrategy with_state(DensityMatrix state) const;

 private:
  QuantumStrategy(int dim_a, int dim_b, DensityMatrix state, MeasurementFamily a, MeasurementFamily b)
      : dim_a_(dim_a), dim_b_(dim_b), state_(std::move(state)), a_(std::move(a)), b_(std::move(b)) {}
  int dim_a_;
  int dim_b_;
  DensityMatrix state_;
  MeasurementFamily a_;
  MeasurementFamily b_;
};

/// Conditional distribution P(a, b | x, y), flat index ((x*ny + y)*na + a)*nb + b.
class Behavior {
 public:
  Behavior() = default;
  Behavior(int nx, int ny, int na, int nb);
  Behavior(int nx, int ny, int na, int nb, std::vector<double> table);

  int num_x() const { return nx_; }
  int num_y() const { return ny_; }
  int num_a() const { return na_; }
  int num_b() const { return nb_; }

  double operator()(int x, int y, int a, int b) const { return p_[index(x, y, a, b)]; }
  double& operator()(int x, int y, int a, int b) { return p_[index(x, y, a, b)]; }
  const std::vector<double>& table() const { return p_; }

  double alice_marginal(int x, int y, int a) const;
  double bob_marginal(int x, int y, int b) const;
  /// Largest deviation of sum_{a,b} P(a,b|x,y) from one.
  double normalization_defect() const;
  /// Largest dependence of one party's marginal on the other's question.
  double signaling_defect() const;
  double min_entry() const;

  /// P(a|x) P(b|y), using y = 0 (resp. x = 0) for the marginals.
  Behavior product_of_marginals() const;

 private:
  std::size_t index(int x, int y, int a, int b) const {
    return static_cast<std::size_t>(((x * ny_ + y) * na_ + a) * nb_ + b);
  }
  int nx_ = 0, ny_ = 0, na_ = 0, nb_ = 0;
  std::vector<double> p_;
};

/// Checks entries >= -1e-12, per-question normalization within 1e-9 and
/// no-signaling within 1e-8.
void validate_behavior(const Behavior& p);

/// P(a,b|x,y) = Tr((A_x(a) (x) B_y(b)) rho).
Behavior behavior_of(const QuantumStrategy& s);
/// Same, checking that the strategy's alphabets match `g`, or `g`'s n-fold
/// vector alphabets when `rounds` > 1.
Behavior behavior_of(const QuantumStrategy& s, const Game& g, int rounds = 1);

/// Deterministic behavior of a = f(x), b = h(y).
Behavior deterministic_behavior(const Game& g, std::span<const int> f, std::span<const int> h);

double win_probability(const Behavior& p, const Game& g);

enum class NoiseKind { depolarizing, epr_fidelity_mix };

struct NoiseChannel {
  NoiseKind kind = NoiseKind::depolarizing;
  double nu = 0.0;
};

/// state <- (1 - nu) rho + nu Id / dim on the full bipartite space.
QuantumStrategy apply_noise(const QuantumStrategy& s, const NoiseChannel& channel);

/// Noise level at which the mixture with the maximally mixed state lowers a
/// strategy's win probability from `ideal` to `target` on a game whose
/// uniformly-random-answer value is `random_value`.
double noise_for_win_probability(double ideal, double target, double random_value);

/// EPR pair; Alice measures at angles 0, pi/4 and Bob at pi/8, -pi/8 in the Z-X plane.
QuantumStrategy canonical_chsh_strategy();

/// Product state |0>|0> in the given local dimensions with a = f(x), b = h(y).
QuantumStrategy deterministic_strategy(const Game& g, std::span<const int> f, std::span<const int> h, int dim = 2);

struct SeesawOptions {
  int dim = 2;
  int restarts = 10;
  std::uint64_t seed = 0;
  int max_iterations = 500;
  double tolerance = 1e-10;
};

struct SeesawResult {
  QuantumStrategy strategy;
  double value = 0.0;
  int best_restart = 0;
  /// Value after each full iteration of the best restart.
  std::vector<double> history;
};

/// Alternating optimization over pure states and projective measurements;
/// returns the best strategy found over all restarts.
SeesawResult seesaw_optimize(const Game& g, const SeesawOptions& options);
/// Single seesaw run started from `initial`, which must be a pure-state strategy.
SeesawResult seesaw_refine(const Game& g, const QuantumStrategy& initial, const SeesawOptions& options);

}  // namespace nlg
