#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nlg {

struct CertInput {
  /// Classical-quantum gap qval - cval, in (0, 1].
  double delta = 0.0;
  /// Noise threshold, in [0, delta).
  double nu = 0.0;
  /// |A x B| >= 2.
  std::int64_t answer_pairs = 4;
  std::int64_t n = 1;
  /// Observed threshold-game win probability, in (0, 1].
  double kappa = 1.0;
};

struct ConstantPair {
  double c1 = 0.0;
  double c2 = 0.0;
};

/// c1' = (delta-nu)^3 / (2000 C), c2' = (delta-nu)^5 / (10 * 90^2 * C), C = log2|A x B|.
ConstantPair constants_pure(double delta, double nu, std::int64_t answer_pairs);
/// c1 = (delta-nu)^3 / (1000 C), c2 = (delta-nu)^5 / (10 * 180^2 * C).
ConstantPair constants_mixed(double delta, double nu, std::int64_t answer_pairs);

struct CertReport {
  CertInput input;
  double c1 = 0.0, c2 = 0.0, c1_prime = 0.0, c2_prime = 0.0;
  /// n > 1/c1.
  bool n_gate = false;
  /// kappa >= exp(-c1 n); the binding gate.
  bool kappa_gate = false;
  /// kappa >= 2^(-alpha^3 n / (1000 C)) with alpha = delta - nu; reported only.
  bool kappa_gate_log2 = false;
  /// kappa >= (16/alpha) 2^(-alpha^3 n / 384); reported only.
  bool kappa_gate_subset = false;
  /// c2 kappa^2 n, present iff n_gate and kappa_gate pass.
  std::optional<double> ef_lower_bound_bits;
  /// c2 / 4.
  double ec_lower_bound_bits = 0.0;
  /// Pure-state bound as stated: E(psi) >= c2' kappa n.
  double pure_theorem_statement_form = 0.0;
  /// Pure-state bound from the derivation: E(psi) > kappa alpha^5 n / (10 * 90^2 * C).
  double pure_proof_chain_form = 0.0;
  /// Machine-readable reasons for failed gates ("n below 1/c1", "kappa below exp(-c1 n)").
  std::vector<std::string> reasons;

  bool passed() const { return n_gate && kappa_gate; }
};

/// Throws ValidationError for invalid input; gate failures are reported, not thrown.
CertReport certify_eof(const CertInput& input);

struct Prop32Ledger {
  double epsilon = 0.0, gamma = 0.0, alpha = 0.0, tau = 0.0;
  /// alpha / 4.
  double delta_cap = 0.0;
  double t = 0.0;
  double s_size_bound = 0.0;
  /// kappa >= (16/alpha) 2^(-alpha^3 n / 384).
  bool prop_gate = false;
  double delta_prop = 0.0;
  double t_over_n = 0.0;
  /// t/n <= alpha/4 (only asserted when prop_gate passes).
  bool t_over_n_ok = false;
  /// tau < delta_prop < epsilon.
  bool delta_prop_in_range = false;
  /// 1 - epsilon + alpha: the guaranteed Ex_j P(W_j | W_S).
  double conclusion_threshold = 0.0;
  std::int64_t n = 0;
  double kappa = 0.0;
};

/// Requires 0 < gamma < epsilon < 1, n >= 1, kappa in (0, 1].
Prop32Ledger prop32_ledger(double epsilon, double gamma, std::int64_t n, double kappa);

struct ErrorParams {
  double c = 0.0;
  double beta = 0.0;
  double m = 0.0;
  double delta = 0.0, delta_prime = 0.0, delta_dblprime = 0.0;
  /// sqrt(delta) + 8 sqrt(delta') + sqrt(2 delta'').
  double accrued = 0.0;
};

/// beta = alpha^2 / (1000 C).
ErrorParams error_params(double alpha, std::int64_t answer_pairs, std::int64_t n, std::int64_t s_size, double p_ws,
                         double ent_bits);
/// Same with beta supplied directly.
ErrorParams error_params_with_beta(double beta, std::int64_t answer_pairs, std::int64_t n, std::int64_t s_size,
                                   double p_ws, double ent_bits);

}  // namespace nlg
