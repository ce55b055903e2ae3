#pragma once

#include "nlg/games.hpp"
#include "nlg/strategies.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace nlg {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitValidation = 2, kExitGate = 3, kExitBudget = 4 };

/// Enumeration budget for classical_value: NLG_TABLE_BUDGET if set, else 1e8.
double enumeration_budget();

struct SweepRow {
  int n = 0;
  double threshold = 0.0;
  std::int64_t trials = 0;
  std::int64_t passes = 0;
  double pass_rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double exact_tail = 0.0;
  /// 1 - exp(-(p - threshold)^2 n / 3) for per-round win p >= threshold, else 0.
  double hoeffding_bound = 0.0;
};

/// One Monte Carlo estimate per n, with the exact i.i.d. tail and the
/// completeness bound for the behavior's per-round win probability.
std::vector<SweepRow> sweep_threshold(const Game& g, const Behavior& single_round, std::span<const int> ns,
                                      double threshold, std::int64_t trials, std::uint64_t seed);
/// Header: n,threshold,trials,passes,pass_rate,ci_low,ci_high,exact_tail,hoeffding_bound.
std::string sweep_csv(std::span<const SweepRow> rows);

/// Runs the command line `args` (without the program name).
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace nlg
