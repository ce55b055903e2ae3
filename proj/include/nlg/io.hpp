#pragma once

#include "nlg/certifier.hpp"
#include "nlg/correlated_sampling.hpp"
#include "nlg/extraction.hpp"
#include "nlg/games.hpp"
#include "nlg/lemma_audit.hpp"
#include "nlg/repetition.hpp"
#include "nlg/strategies.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace nlg {

using Json = nlohmann::ordered_json;

/// Parses a file as JSON; ValidationError on a missing file or malformed text.
Json read_json_file(const std::filesystem::path& path);
/// Writes `content` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

Game game_from_json(const Json& j);
Json game_to_json(const Game& g);

/// Complex entries as [re, im] pairs (a bare number is read as real).
ComplexMatrix complex_matrix_from_json(const Json& j);
Json complex_matrix_to_json(const ComplexMatrix& m);

/// {"dim_a", "dim_b", "state", "a_measurements": [x][a], "b_measurements": [y][b]}.
QuantumStrategy strategy_from_json(const Json& j);
Json strategy_to_json(const QuantumStrategy& s);

/// Flat table in index order ((x*ny + y)*na + a)*nb + b.
Json behavior_to_json(const Behavior& p);

/// A probability vector given as an array or as {"p": [...]}.
std::vector<double> distribution_from_json(const Json& j);

Json to_json(const CertReport& r);
Json to_json(const Prop32Ledger& l);
Json to_json(const ErrorParams& e);
Json to_json(const LemmaAuditReport& r);
Json to_json(const ExtractionReport& r);
Json to_json(const ThresholdEstimate& e);
Json to_json(const Prop32Result& r);

}  // namespace nlg
