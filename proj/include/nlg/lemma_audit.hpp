#pragma once

#include "nlg/certifier.hpp"
#include "nlg/games.hpp"
#include "nlg/repetition.hpp"

#include <string>
#include <utility>
#include <vector>

namespace nlg {

/// Schema indices of R_{Tj} = (Omega_{-j}, X_T, A_{S u T}, B_S), where
/// Omega_{-j} is O_i for i != j together with X_S, Y_S.
std::vector<int> bundle_variables(const AugmentedTable& aug, std::span<const int> t, int j);

/// Rounds outside S, in increasing order.
std::vector<int> free_rounds(const AugmentedTable& aug);

/// Law of the random set T: size uniform on 0..min(floor(beta m), m - 1),
/// then a uniform subset of that size of the rounds outside S.
std::vector<std::pair<std::vector<int>, double>> t_distribution(const AugmentedTable& aug, double beta);

struct LemmaCheck {
  /// input_distribution, correlated_sampleability_x, correlated_sampleability_y,
  /// bob_answer_independence or alice_answer_independence.
  std::string lemma;
  /// "fixed_t" (the given T) or "averaged_t" (T drawn from t_distribution).
  std::string convention;
  double lhs = 0.0;
  /// Same quantity from an independent group-by over the full table.
  double lhs_check = 0.0;
  double bound = 0.0;
  bool satisfied = false;
  /// bound >= 1, so the inequality holds trivially.
  bool vacuous = false;
};

struct LemmaAuditReport {
  std::vector<int> s;
  std::vector<int> t;
  double tau = 0.0;
  double beta = 0.0;
  double ent_bits = 0.0;
  double p_ws = 0.0;
  ErrorParams params;
  std::vector<LemmaCheck> checks;
  double max_path_discrepancy = 0.0;

  bool all_satisfied() const;
};

/// Conditions `aug` on W_S^{>= 1 - tau} and evaluates the four lemma
/// inequalities with bounds sqrt(delta), sqrt(delta'), sqrt(2 delta'') and
/// sqrt(2 delta'). Requires T outside S, |T| <= beta m and |T| < m.
LemmaAuditReport lemma_audit(const AugmentedTable& aug, const Game& g, double tau, double beta, std::vector<int> t,
                             double ent_bits);

}  // namespace nlg
