#include "nlg/io.hpp"

#include "nlg/error.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace nlg {

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + tmp.string());
    out << content;
    if (!out) throw ValidationError("cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw ValidationError("cannot rename onto " + path.string() + ": " + ec.message());
  }
}

namespace {

// nlohmann throws type_error / out_of_range on schema mistakes; surface them as
// validation failures.
template <typename F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed ") + what + ": " + e.what());
  }
}

std::vector<Label> labels_from_json(const Json& j, const char* name) {
  if (!j.is_array()) throw ValidationError(std::string(name) + " must be an array");
  std::vector<Label> out;
  for (const auto& v : j) {
    if (v.is_number_integer()) out.emplace_back(v.get<std::int64_t>());
    else if (v.is_string()) out.emplace_back(v.get<std::string>());
    else throw ValidationError(std::string(name) + " entries must be integers or strings");
  }
  return out;
}

Json labels_to_json(const std::vector<Label>& labels) {
  Json out = Json::array();
  for (const auto& l : labels) std::visit([&](const auto& v) { out.push_back(v); }, l);
  return out;
}

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ValidationError("complex entries must be [re, im] pairs");
}

MeasurementFamily family_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ValidationError("measurement family must be a non-empty array");
  MeasurementFamily out;
  for (const auto& povm : j) {
    if (!povm.is_array() || povm.empty()) throw ValidationError("each POVM must be a non-empty array");
    std::vector<ComplexMatrix> elems;
    for (const auto& e : povm) elems.push_back(complex_matrix_from_json(e));
    out.push_back(std::move(elems));
  }
  return out;
}

Json family_to_json(const MeasurementFamily& f) {
  Json out = Json::array();
  for (const auto& povm : f) {
    Json p = Json::array();
    for (const auto& e : povm) p.push_back(complex_matrix_to_json(e));
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

Game game_from_json(const Json& j) {
  return guarded("game", [&] {
    if (!j.is_object()) throw ValidationError("game must be a JSON object");
    RawGame raw;
    raw.x_alphabet = labels_from_json(j.at("x_alphabet"), "x_alphabet");
    raw.y_alphabet = labels_from_json(j.at("y_alphabet"), "y_alphabet");
    raw.a_alphabet = labels_from_json(j.at("a_alphabet"), "a_alphabet");
    raw.b_alphabet = labels_from_json(j.at("b_alphabet"), "b_alphabet");
    raw.mu = j.at("mu").get<std::vector<std::vector<double>>>();
    raw.predicate = j.at("predicate").get<std::vector<std::vector<std::vector<std::vector<int>>>>>();
    return validate_game(raw);
  });
}

Json game_to_json(const Game& g) {
  const RawGame raw = g.to_raw();
  Json j;
  j["x_alphabet"] = labels_to_json(raw.x_alphabet);
  j["y_alphabet"] = labels_to_json(raw.y_alphabet);
  j["a_alphabet"] = labels_to_json(raw.a_alphabet);
  j["b_alphabet"] = labels_to_json(raw.b_alphabet);
  j["mu"] = raw.mu;
  j["predicate"] = raw.predicate;
  return j;
}

ComplexMatrix complex_matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty())
    throw ValidationError("matrix must be a non-empty nested array");
  const auto rows = static_cast<Eigen::Index>(j.size()), cols = static_cast<Eigen::Index>(j[0].size());
  ComplexMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ValidationError("dimension mismatch: ragged matrix rows");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

Json complex_matrix_to_json(const ComplexMatrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
    out.push_back(std::move(row));
  }
  return out;
}

QuantumStrategy strategy_from_json(const Json& j) {
  return guarded("strategy", [&] {
    if (!j.is_object()) throw ValidationError("strategy must be a JSON object");
    const int da = j.at("dim_a").get<int>(), db = j.at("dim_b").get<int>();
    return QuantumStrategy::make(da, db, DensityMatrix::from_matrix(complex_matrix_from_json(j.at("state"))),
                                 family_from_json(j.at("a_measurements")), family_from_json(j.at("b_measurements")));
  });
}

Json strategy_to_json(const QuantumStrategy& s) {
  Json j;
  j["dim_a"] = s.dim_a();
  j["dim_b"] = s.dim_b();
  j["state"] = complex_matrix_to_json(s.state().matrix());
  j["a_measurements"] = family_to_json(s.a_measurements());
  j["b_measurements"] = family_to_json(s.b_measurements());
  return j;
}

Json behavior_to_json(const Behavior& p) {
  Json j;
  j["num_x"] = p.num_x();
  j["num_y"] = p.num_y();
  j["num_a"] = p.num_a();
  j["num_b"] = p.num_b();
  j["index"] = "((x*num_y + y)*num_a + a)*num_b + b";
  j["table"] = p.table();
  return j;
}

std::vector<double> distribution_from_json(const Json& j) {
  return guarded("distribution", [&] {
    const Json& arr = j.is_object() ? j.at("p") : j;
    if (!arr.is_array()) throw ValidationError("distribution must be an array or {\"p\": [...]}");
    return arr.get<std::vector<double>>();
  });
}

Json to_json(const CertReport& r) {
  Json j;
  j["delta"] = r.input.delta;
  j["nu"] = r.input.nu;
  j["answer_pairs"] = r.input.answer_pairs;
  j["n"] = r.input.n;
  j["kappa"] = r.input.kappa;
  j["c1"] = r.c1;
  j["c2"] = r.c2;
  j["c1_prime"] = r.c1_prime;
  j["c2_prime"] = r.c2_prime;
  j["gates"] = {{"n_gate", r.n_gate}, {"kappa_gate", r.kappa_gate}};
  j["reported_gates"] = {{"kappa_gate_log2", r.kappa_gate_log2}, {"kappa_gate_subset", r.kappa_gate_subset}};
  j["ef_lower_bound_bits"] = r.ef_lower_bound_bits ? Json(*r.ef_lower_bound_bits) : Json(nullptr);
  j["ec_lower_bound_bits"] = r.ec_lower_bound_bits;
  j["pure_state_bounds"] = {{"theorem_statement_form", r.pure_theorem_statement_form},
                            {"proof_chain_form", r.pure_proof_chain_form}};
  j["passed"] = r.passed();
  j["reasons"] = r.reasons;
  return j;
}

Json to_json(const Prop32Ledger& l) {
  Json j;
  j["epsilon"] = l.epsilon;
  j["gamma"] = l.gamma;
  j["n"] = l.n;
  j["kappa"] = l.kappa;
  j["alpha"] = l.alpha;
  j["tau"] = l.tau;
  j["delta_cap"] = l.delta_cap;
  j["t"] = l.t;
  j["s_size_bound"] = l.s_size_bound;
  j["prop_gate"] = l.prop_gate;
  j["delta_prop"] = l.delta_prop;
  j["t_over_n"] = l.t_over_n;
  j["t_over_n_ok"] = l.t_over_n_ok;
  j["delta_prop_in_range"] = l.delta_prop_in_range;
  j["conclusion_threshold"] = l.conclusion_threshold;
  return j;
}

Json to_json(const ErrorParams& e) {
  Json j;
  j["C"] = e.c;
  j["beta"] = e.beta;
  j["m"] = e.m;
  j["delta"] = e.delta;
  j["delta_prime"] = e.delta_prime;
  j["delta_dblprime"] = e.delta_dblprime;
  j["accrued"] = e.accrued;
  return j;
}

Json to_json(const LemmaAuditReport& r) {
  Json j;
  j["s"] = r.s;
  j["t"] = r.t;
  j["tau"] = r.tau;
  j["beta"] = r.beta;
  j["ent_bits"] = r.ent_bits;
  j["p_ws"] = r.p_ws;
  j["error_params"] = to_json(r.params);
  Json checks = Json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"lemma", c.lemma},
                      {"convention", c.convention},
                      {"lhs", c.lhs},
                      {"lhs_check", c.lhs_check},
                      {"bound", c.bound},
                      {"satisfied", c.satisfied},
                      {"vacuous", c.vacuous}});
  j["checks"] = std::move(checks);
  j["max_path_discrepancy"] = r.max_path_discrepancy;
  j["all_satisfied"] = r.all_satisfied();
  return j;
}

Json to_json(const ExtractionReport& r) {
  Json j;
  j["win_probability"] = r.win_probability;
  j["target_win_probability"] = r.target_win_probability;
  if (r.trials == 0) j["tv_to_target"] = r.tv_to_target;
  j["accrued_bound"] = r.params.accrued;
  j["agreement"] = r.agreement;
  j["skipped_mass"] = r.skipped_mass;
  Json skipped = Json::array();
  for (const auto& [x, y] : r.skipped_pairs) skipped.push_back({x, y});
  j["skipped_pairs"] = std::move(skipped);
  j["p_ws"] = r.p_ws;
  j["error_params"] = to_json(r.params);
  j["trials"] = r.trials;
  j["behavior"] = behavior_to_json(r.behavior);
  return j;
}

Json to_json(const ThresholdEstimate& e) {
  return {{"trials", e.trials}, {"passes", e.passes},   {"pass_rate", e.pass_rate},
          {"ci_low", e.ci_low}, {"ci_high", e.ci_high}, {"ci_half_width", e.half_width()}};
}

Json to_json(const Prop32Result& r) {
  return {{"s", r.s},
          {"conditional_win", r.conditional_win},
          {"p_ws", r.p_ws},
          {"p_global", r.p_global},
          {"candidates_evaluated", r.candidates_evaluated},
          {"null_candidates", r.null_candidates}};
}

}  // namespace nlg
