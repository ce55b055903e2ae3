#include "nlg/certifier.hpp"

#include "nlg/error.hpp"

#include <cmath>

namespace nlg {

namespace {

double log2_pairs(std::int64_t answer_pairs) {
  if (answer_pairs < 2) throw ValidationError("answer_pairs must be >= 2");
  return std::log2(static_cast<double>(answer_pairs));
}

double margin(double delta, double nu) {
  if (!(delta > 0.0 && delta <= 1.0)) throw ValidationError("delta must lie in (0, 1]");
  if (!(nu >= 0.0)) throw ValidationError("nu must be >= 0");
  if (nu >= delta) throw ValidationError("no quantum advantage margin");
  return delta - nu;
}

}  // namespace

ConstantPair constants_pure(double delta, double nu, std::int64_t answer_pairs) {
  const double g = margin(delta, nu), c = log2_pairs(answer_pairs);
  return {std::pow(g, 3) / (2000.0 * c), std::pow(g, 5) / (10.0 * 90.0 * 90.0 * c)};
}

ConstantPair constants_mixed(double delta, double nu, std::int64_t answer_pairs) {
  const double g = margin(delta, nu), c = log2_pairs(answer_pairs);
  return {std::pow(g, 3) / (1000.0 * c), std::pow(g, 5) / (10.0 * 180.0 * 180.0 * c)};
}

CertReport certify_eof(const CertInput& in) {
  if (!(in.kappa > 0.0 && in.kappa <= 1.0)) throw ValidationError("kappa must lie in (0, 1]");
  if (in.n < 1) throw ValidationError("n must be >= 1");
  CertReport r;
  r.input = in;
  const auto mixed = constants_mixed(in.delta, in.nu, in.answer_pairs);
  const auto pure = constants_pure(in.delta, in.nu, in.answer_pairs);
  r.c1 = mixed.c1;
  r.c2 = mixed.c2;
  r.c1_prime = pure.c1;
  r.c2_prime = pure.c2;

  const double n = static_cast<double>(in.n);
  const double alpha = in.delta - in.nu, c = log2_pairs(in.answer_pairs);
  r.n_gate = n > 1.0 / r.c1;
  r.kappa_gate = in.kappa >= std::exp(-r.c1 * n);
  r.kappa_gate_log2 = in.kappa >= std::exp2(-std::pow(alpha, 3) * n / (1000.0 * c));
  r.kappa_gate_subset = in.kappa >= (16.0 / alpha) * std::exp2(-std::pow(alpha, 3) * n / 384.0);
  if (!r.n_gate) r.reasons.emplace_back("n below 1/c1");
  if (!r.kappa_gate) r.reasons.emplace_back("kappa below exp(-c1 n)");
  if (r.passed()) r.ef_lower_bound_bits = r.c2 * in.kappa * in.kappa * n;
  r.ec_lower_bound_bits = r.c2 / 4.0;
  r.pure_theorem_statement_form = r.c2_prime * in.kappa * n;
  r.pure_proof_chain_form = in.kappa * std::pow(alpha, 5) * n / (10.0 * 90.0 * 90.0 * c);
  return r;
}

Prop32Ledger prop32_ledger(double epsilon, double gamma, std::int64_t n, double kappa) {
  if (!(gamma > 0.0 && gamma < epsilon && epsilon < 1.0)) throw ValidationError("require 0 < gamma < epsilon < 1");
  if (n < 1) throw ValidationError("n must be >= 1");
  if (!(kappa > 0.0 && kappa <= 1.0)) throw ValidationError("kappa must lie in (0, 1]");
  Prop32Ledger l;
  l.epsilon = epsilon;
  l.gamma = gamma;
  l.n = n;
  l.kappa = kappa;
  l.alpha = epsilon - gamma;
  l.tau = epsilon - 0.75 * l.alpha;
  l.delta_cap = l.alpha / 4.0;
  l.t = (6.0 / (l.delta_cap * l.delta_cap)) * (std::log(2.0 / kappa) + std::log(8.0 / l.alpha));
  l.s_size_bound = (96.0 / (l.alpha * l.alpha)) * std::log(16.0 / (l.alpha * kappa));
  const double nd = static_cast<double>(n);
  l.prop_gate = kappa >= (16.0 / l.alpha) * std::exp2(-std::pow(l.alpha, 3) * nd / 384.0);
  l.t_over_n = l.t / nd;
  l.delta_prop = epsilon - l.alpha / 4.0 - l.t_over_n;
  l.t_over_n_ok = l.t_over_n <= l.alpha / 4.0;
  l.delta_prop_in_range = l.delta_prop > l.tau && l.delta_prop < epsilon;
  l.conclusion_threshold = 1.0 - epsilon + l.alpha;
  return l;
}

ErrorParams error_params_with_beta(double beta, std::int64_t answer_pairs, std::int64_t n, std::int64_t s_size,
                                   double p_ws, double ent_bits) {
  if (!(p_ws > 0.0 && p_ws <= 1.0)) throw ValidationError("p_ws must lie in (0, 1]");
  if (s_size < 0) throw ValidationError("s_size must be >= 0");
  if (!(ent_bits >= 0.0)) throw ValidationError("ent_bits must be >= 0");
  if (!(beta > 0.0)) throw ValidationError("beta must be > 0");
  if (beta >= 1.0) throw ValidationError("beta >= 1");
  ErrorParams e;
  e.c = log2_pairs(answer_pairs);
  e.beta = beta;
  e.m = static_cast<double>(n - s_size);
  if (e.m <= 0.0) throw ValidationError("m = n - |S| must be > 0");
  const double log_inv = -std::log2(p_ws);
  const double denom = (1.0 - beta) * e.m;
  e.delta = log_inv / denom;
  e.delta_prime = (log_inv + (2.0 * static_cast<double>(s_size) + beta * e.m) * e.c) / denom;
  e.delta_dblprime = ent_bits / (beta * e.m * p_ws);
  e.accrued = std::sqrt(e.delta) + 8.0 * std::sqrt(e.delta_prime) + std::sqrt(2.0 * e.delta_dblprime);
  return e;
}

ErrorParams error_params(double alpha, std::int64_t answer_pairs, std::int64_t n, std::int64_t s_size, double p_ws,
                         double ent_bits) {
  if (!(alpha > 0.0)) throw ValidationError("alpha must be > 0");
  const double c = log2_pairs(answer_pairs);
  return error_params_with_beta(alpha * alpha / (1000.0 * c), answer_pairs, n, s_size, p_ws, ent_bits);
}

}  // namespace nlg
