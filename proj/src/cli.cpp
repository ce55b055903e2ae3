#include "nlg/cli.hpp"

#include "nlg/certifier.hpp"
#include "nlg/correlated_sampling.hpp"
#include "nlg/error.hpp"
#include "nlg/extraction.hpp"
#include "nlg/io.hpp"
#include "nlg/lemma_audit.hpp"
#include "nlg/quantum.hpp"
#include "nlg/repetition.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

namespace nlg {

double enumeration_budget() {
  if (const char* env = std::getenv("NLG_TABLE_BUDGET")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && v > 0) return v;
  }
  return kDefaultEnumerationBudget;
}

std::vector<SweepRow> sweep_threshold(const Game& g, const Behavior& single_round, std::span<const int> ns,
                                      double threshold, std::int64_t trials, std::uint64_t seed) {
  if (ns.empty()) throw ValidationError("sweep needs at least one n");
  const double p = win_probability(single_round, g);
  std::vector<SweepRow> rows;
  for (int n : ns) {
    const auto spec = make_threshold_spec(g, n, threshold);
    const auto est = monte_carlo_threshold(single_round, spec, trials, seed);
    SweepRow r;
    r.n = n;
    r.threshold = threshold;
    r.trials = est.trials;
    r.passes = est.passes;
    r.pass_rate = est.pass_rate;
    r.ci_low = est.ci_low;
    r.ci_high = est.ci_high;
    r.exact_tail = iid_threshold_win_prob(std::clamp(p, 0.0, 1.0), n, threshold);
    // With qval - eta = p and qval - nu = threshold, nu - eta = p - threshold.
    r.hoeffding_bound = p >= threshold ? hoeffding_completeness_bound(p - threshold, 0.0, n) : 0.0;
    rows.push_back(r);
  }
  return rows;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::ostringstream os;
  os << "n,threshold,trials,passes,pass_rate,ci_low,ci_high,exact_tail,hoeffding_bound\n";
  os << std::setprecision(17);
  for (const auto& r : rows)
    os << r.n << ',' << r.threshold << ',' << r.trials << ',' << r.passes << ',' << r.pass_rate << ',' << r.ci_low
       << ',' << r.ci_high << ',' << r.exact_tail << ',' << r.hoeffding_bound << '\n';
  return os.str();
}

namespace {

/// A gate failure: the report is still emitted, with exit code 3.
struct GateFailure {
  Json report;
};

struct Common {
  std::string out_path;
  bool timing = false;
};

double entanglement_bits(const QuantumStrategy& s) {
  if (!s.is_pure()) throw ValidationError("--ent-bits is required for mixed-state strategies");
  return von_neumann_entropy(partial_trace(s.state(), s.dim_a(), s.dim_b(), Subsystem::a));
}

/// n-round behavior from a strategy on vector alphabets, or the i.i.d. lift of
/// a single-round strategy. Returns the behavior, whether it was lifted, and E(psi).
struct LoadedStrategy {
  Behavior behavior;
  bool iid = false;
  std::optional<double> ent_bits;
};

LoadedStrategy load_n_round(const QuantumStrategy& s, const Game& g, int n) {
  LoadedStrategy out;
  const bool single = s.num_x() == g.num_x() && s.num_y() == g.num_y() && s.num_a() == g.num_a() &&
                      s.num_b() == g.num_b();
  if (n > 1 && single) {
    out.behavior = iid_lift(behavior_of(s, g), n);
    out.iid = true;
  } else {
    out.behavior = behavior_of(s, g, n);
  }
  if (s.is_pure()) out.ent_bits = entanglement_bits(s) * (out.iid ? n : 1);
  return out;
}

Json envelope(const std::string& command, std::optional<std::uint64_t> seed, Json inputs, Json results) {
  Json j;
  j["command"] = command;
  j["version"] = kVersion;
  j["seed"] = seed ? Json(*seed) : Json(nullptr);
  j["inputs"] = std::move(inputs);
  j["results"] = std::move(results);
  return j;
}

void emit(const std::string& text, const Common& c, std::ostream& out) {
  if (c.out_path.empty()) out << text;
  else write_file_atomic(c.out_path, text);
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Non-local game certification toolkit", "nlg"};
  app.require_subcommand(1);
  // Subcommands inherit this, so global flags may follow them.
  app.fallthrough();
  Common common;
  app.add_option("--out", common.out_path, "Write the report (or CSV) to this path atomically");
  app.add_flag("--timing", common.timing, "Include wall time in the report");

  std::string game_path, strategy_path, p_path, q_path;
  std::uint64_t seed = 0;
  int dim = 2, restarts = 10, n = 1, n_min = 0, n_max = 0, n_step = 1;
  double threshold = 1.0, delta = 0.0, nu = 0.0, kappa = 1.0, epsilon = 0.0, gamma = 0.0, alpha = 0.0, tau = 0.0,
         beta = 0.0, p_ws = 1.0, ent_bits = 0.0;
  std::int64_t trials = 0, answer_pairs = 4, big_n = 1, s_size = 0;
  std::vector<int> s_rounds, t_rounds;
  bool exact = false;

  auto* value = app.add_subcommand("value", "Classical value or seesaw lower bound on the quantum value");
  value->require_subcommand(1);
  auto* value_classical = value->add_subcommand("classical", "Exact classical value");
  value_classical->add_option("--game", game_path)->required();
  auto* value_seesaw = value->add_subcommand("quantum-seesaw", "Seesaw lower bound on the quantum value");
  value_seesaw->add_option("--game", game_path)->required();
  value_seesaw->add_option("--dim", dim, "Local dimension")->capture_default_str();
  value_seesaw->add_option("--restarts", restarts)->capture_default_str();
  value_seesaw->add_option("--seed", seed)->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "Threshold-game simulation");
  simulate->require_subcommand(1);
  auto* sim_threshold = simulate->add_subcommand("threshold", "Pass rate of one threshold game");
  sim_threshold->add_option("--game", game_path)->required();
  sim_threshold->add_option("--strategy", strategy_path)->required();
  sim_threshold->add_option("--n", n)->required();
  sim_threshold->add_option("--threshold", threshold)->required();
  auto* trials_opt = sim_threshold->add_option("--trials", trials);
  auto* exact_opt = sim_threshold->add_flag("--exact", exact, "Exact binomial tail instead of sampling");
  trials_opt->excludes(exact_opt);
  sim_threshold->add_option("--seed", seed)->capture_default_str();
  auto* sim_sweep = simulate->add_subcommand("sweep", "CSV of pass rates over a range of n");
  sim_sweep->add_option("--game", game_path)->required();
  sim_sweep->add_option("--strategy", strategy_path)->required();
  sim_sweep->add_option("--n-min", n_min)->required();
  sim_sweep->add_option("--n-max", n_max)->required();
  sim_sweep->add_option("--n-step", n_step)->capture_default_str();
  sim_sweep->add_option("--threshold", threshold)->required();
  sim_sweep->add_option("--trials", trials)->required();
  sim_sweep->add_option("--seed", seed)->capture_default_str();

  auto* certify = app.add_subcommand("certify", "Entanglement lower bounds from an observed win rate");
  certify->add_option("--delta", delta)->required();
  certify->add_option("--nu", nu)->required();
  certify->add_option("--answer-pairs", answer_pairs)->required();
  certify->add_option("--n", big_n)->required();
  certify->add_option("--kappa", kappa)->required();

  auto* ledger = app.add_subcommand("ledger", "Proof-parameter ledgers");
  ledger->require_subcommand(1);
  auto* ledger_prop = ledger->add_subcommand("prop32", "Subset-selection parameters");
  ledger_prop->add_option("--epsilon", epsilon)->required();
  ledger_prop->add_option("--gamma", gamma)->required();
  ledger_prop->add_option("--n", big_n)->required();
  ledger_prop->add_option("--kappa", kappa)->required();
  auto* ledger_errors = ledger->add_subcommand("errors", "Error parameters delta, delta', delta''");
  ledger_errors->add_option("--alpha", alpha)->required();
  ledger_errors->add_option("--answer-pairs", answer_pairs)->required();
  ledger_errors->add_option("--n", big_n)->required();
  ledger_errors->add_option("--s-size", s_size)->required();
  ledger_errors->add_option("--p-ws", p_ws)->required();
  ledger_errors->add_option("--ent-bits", ent_bits)->required();
  auto* beta_override = ledger_errors->add_option("--beta", beta, "Use this beta instead of alpha^2/(1000 C)");

  auto* audit = app.add_subcommand("audit", "Exact audits on small instances");
  audit->require_subcommand(1);
  std::optional<double> ent_override;
  auto add_audit_flags = [&](CLI::App* sub) {
    sub->add_option("--game", game_path)->required();
    sub->add_option("--strategy", strategy_path, "n-round strategy, or single-round strategy lifted i.i.d.")
        ->required();
    sub->add_option("--n", n)->required();
    sub->add_option("--s", s_rounds, "Comma-separated 0-based rounds in S")->delimiter(',');
    sub->add_option("--tau", tau)->required();
    sub->add_option("--beta", beta)->required();
    sub->add_option("--seed", seed)->capture_default_str();
    sub->add_option("--ent-bits", ent_override, "E(psi); defaults to the pure state's entanglement entropy");
  };
  auto* audit_lemmas = audit->add_subcommand("lemmas", "Lemma inequalities and the independence defect");
  add_audit_flags(audit_lemmas);
  audit_lemmas->add_option("--t", t_rounds, "Comma-separated 0-based rounds in T")->delimiter(',');
  auto* audit_protocol = audit->add_subcommand("protocol", "Classical extraction protocol");
  add_audit_flags(audit_protocol);
  audit_protocol->add_option("--trials", trials, "Sample the protocol instead of computing it exactly");

  auto* sample = app.add_subcommand("sample", "Sampling primitives");
  sample->require_subcommand(1);
  auto* sample_corr = sample->add_subcommand("correlated", "Correlated sampling of two close distributions");
  sample_corr->add_option("--p", p_path)->required();
  sample_corr->add_option("--q", q_path)->required();
  sample_corr->add_option("--trials", trials)->required();
  sample_corr->add_option("--seed", seed)->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  const auto start = std::chrono::steady_clock::now();
  auto finish = [&](Json report) {
    if (common.timing)
      report["timing"] = {
          {"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
    return report.dump(2) + "\n";
  };

  try {
    std::string text;
    if (value_classical->parsed()) {
      const Game g = game_from_json(read_json_file(game_path));
      const double budget = enumeration_budget();
      const double v = classical_value(g, budget);
      text = finish(envelope("value classical", std::nullopt, {{"game", game_path}, {"enumeration_budget", budget}},
                             {{"value", v}}));
    } else if (value_seesaw->parsed()) {
      const Game g = game_from_json(read_json_file(game_path));
      SeesawOptions o;
      o.dim = dim;
      o.restarts = restarts;
      o.seed = seed;
      const auto r = seesaw_optimize(g, o);
      text = finish(envelope("value quantum-seesaw", seed,
                             {{"game", game_path},
                              {"dim", o.dim},
                              {"restarts", o.restarts},
                              {"max_iterations", o.max_iterations},
                              {"tolerance", o.tolerance}},
                             {{"value", r.value},
                              {"best_restart", r.best_restart},
                              {"iterations", r.history.size()},
                              {"strategy", strategy_to_json(r.strategy)}}));
    } else if (sim_threshold->parsed()) {
      if (!exact && trials < 1) throw ValidationError("give --trials T (T >= 1) or --exact");
      const Game g = game_from_json(read_json_file(game_path));
      const auto s = strategy_from_json(read_json_file(strategy_path));
      const Behavior p = behavior_of(s, g);
      const double per_round = win_probability(p, g);
      const auto spec = make_threshold_spec(g, n, threshold);
      Json results{{"per_round_win", per_round},
                   {"required_wins", required_wins(threshold, n)},
                   {"exact_tail", iid_threshold_win_prob(std::clamp(per_round, 0.0, 1.0), n, threshold)},
                   {"hoeffding_bound",
                    per_round >= threshold ? hoeffding_completeness_bound(per_round - threshold, 0.0, n) : 0.0}};
      if (!exact) results["monte_carlo"] = to_json(monte_carlo_threshold(p, spec, trials, seed));
      Json inputs{{"game", game_path}, {"strategy", strategy_path}, {"n", n}, {"threshold", threshold}};
      inputs["mode"] = exact ? "exact" : "monte_carlo";
      if (!exact) inputs["trials"] = trials;
      text = finish(envelope("simulate threshold", exact ? std::nullopt : std::optional<std::uint64_t>(seed),
                             std::move(inputs), std::move(results)));
    } else if (sim_sweep->parsed()) {
      if (n_min < 1 || n_max < n_min || n_step < 1) throw ValidationError("need 1 <= n-min <= n-max and n-step >= 1");
      const Game g = game_from_json(read_json_file(game_path));
      const auto s = strategy_from_json(read_json_file(strategy_path));
      std::vector<int> ns;
      for (int k = n_min; k <= n_max; k += n_step) ns.push_back(k);
      text = sweep_csv(sweep_threshold(g, behavior_of(s, g), ns, threshold, trials, seed));
    } else if (certify->parsed()) {
      const auto r = certify_eof({delta, nu, answer_pairs, big_n, kappa});
      text = finish(envelope("certify", std::nullopt,
                             {{"delta", delta}, {"nu", nu}, {"answer_pairs", answer_pairs}, {"n", big_n}, {"kappa", kappa}},
                             to_json(r)));
      if (!r.passed()) throw GateFailure{Json::parse(text)};
    } else if (ledger_prop->parsed()) {
      const auto l = prop32_ledger(epsilon, gamma, big_n, kappa);
      text = finish(envelope("ledger prop32", std::nullopt,
                             {{"epsilon", epsilon}, {"gamma", gamma}, {"n", big_n}, {"kappa", kappa}}, to_json(l)));
    } else if (ledger_errors->parsed()) {
      const auto e = beta_override->count() ? error_params_with_beta(beta, answer_pairs, big_n, s_size, p_ws, ent_bits)
                                            : error_params(alpha, answer_pairs, big_n, s_size, p_ws, ent_bits);
      Json inputs{{"alpha", alpha}, {"answer_pairs", answer_pairs}, {"n", big_n},
                  {"s_size", s_size}, {"p_ws", p_ws},               {"ent_bits", ent_bits}};
      inputs["beta_source"] = beta_override->count() ? "flag" : "alpha^2/(1000 C)";
      text = finish(envelope("ledger errors", std::nullopt, std::move(inputs), to_json(e)));
    } else if (audit_lemmas->parsed() || audit_protocol->parsed()) {
      const Game g = game_from_json(read_json_file(game_path));
      const auto s = strategy_from_json(read_json_file(strategy_path));
      const auto loaded = load_n_round(s, g, n);
      const double ent = ent_override ? *ent_override
                                      : loaded.ent_bits ? *loaded.ent_bits
                                                        : throw ValidationError("--ent-bits is required for mixed-state strategies");
      const JointTable table = enumerate_joint(loaded.behavior, g, n);
      const auto aug = augment_dependency_breaking(table, n, g.num_x(), g.num_y(), s_rounds);
      Json inputs{{"game", game_path}, {"strategy", strategy_path}, {"n", n},       {"s", aug.s},
                  {"tau", tau},        {"beta", beta},              {"ent_bits", ent}, {"iid_lift", loaded.iid},
                  {"table_budget", table_budget()}};
      if (audit_lemmas->parsed()) {
        inputs["t"] = t_rounds;
        auto report = to_json(lemma_audit(aug, g, tau, beta, t_rounds, ent));
        report["dependency_breaking_defect"] = dependency_breaking_defect(aug);
        text = finish(envelope("audit lemmas", seed, std::move(inputs), std::move(report)));
      } else {
        inputs["mode"] = trials > 0 ? "sampled" : "exact";
        if (trials > 0) inputs["trials"] = trials;
        const auto r = trials > 0 ? extraction_protocol_sampled(aug, g, tau, beta, ent, trials, seed)
                                  : extraction_protocol_exact(aug, g, tau, beta, ent);
        auto report = to_json(r);
        report["classical_value"] = classical_value(g, enumeration_budget());
        text = finish(envelope("audit protocol", trials > 0 ? std::optional<std::uint64_t>(seed) : std::nullopt,
                               std::move(inputs), std::move(report)));
      }
    } else if (sample_corr->parsed()) {
      const auto p = distribution_from_json(read_json_file(p_path));
      const auto q = distribution_from_json(read_json_file(q_path));
      const auto r = run_correlated_sampling(p, q, trials, seed);
      const double bound = 1.0 - 2.0 * r.tv;
      text = finish(envelope("sample correlated", seed, {{"p", p_path}, {"q", q_path}, {"trials", trials}},
                             {{"tv", r.tv},
                              {"agreements", r.agreements},
                              {"agreement_rate", r.agreement_rate},
                              {"sigma", r.sigma},
                              {"exact_agreement", correlated_sampling_joint(p, q).trace()},
                              {"agreement_bound", bound},
                              {"bound_met", r.agreement_rate >= bound - 4.0 * r.sigma},
                              {"p_counts", r.p_counts},
                              {"q_counts", r.q_counts}}));
    }
    emit(text, common, out);
    return kExitOk;
  } catch (const GateFailure& g) {
    emit(g.report.dump(2) + "\n", common, out);
    const auto& reasons = g.report["results"]["reasons"];
    for (const auto& r : reasons) err << "gate failure: " << r.get<std::string>() << '\n';
    return kExitGate;
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << '\n';
    return kExitBudget;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace nlg
