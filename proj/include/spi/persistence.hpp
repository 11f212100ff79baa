#pragma once

// JSON documents for rule sets, interview sessions, hierarchy models and fixtures.
// Serialization is canonical: sorted keys, two-space indent, trailing newline.

#include <filesystem>
#include <string>
#include <variant>

#include "json.hpp"
#include "spi/learner.hpp"
#include "spi/monotone.hpp"
#include "spi/rule_core.hpp"

namespace spi {

inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::json;

using StoredModel = std::variant<RuleSet, ElicitationState, HierarchySpec>;

/// Reads and parses a JSON file; ParseError carries the parser's location.
Json read_json_file(const std::filesystem::path& path);
Json parse_json(const std::string& text);
void write_text_file(const std::filesystem::path& path, const std::string& text);

std::string canonical(const Json& document);

Json literal_to_json(const Literal& literal, const AttributeSignature& signature);
Literal literal_from_json(const Json& j, const AttributeSignature& signature);

Json signature_to_json(const AttributeSignature& signature);
AttributeSignature signature_from_json(const Json& j);

Json ruleset_to_json(const RuleSet& rules);
RuleSet ruleset_from_json(const Json& j);

/// {schema_version, kind, n, chain_order, answers, provenance}
Json session_to_json(const ElicitationState& state);
/// Replays the answers; rejects documents whose provenance disagrees with the replay.
ElicitationState session_from_json(const Json& j);

/// {"n": 5, "terms": [[1, 2], [3]]} with 1-based variables; "text" is informational.
Json dnf_to_json(const Dnf& dnf, std::string_view prefix = "x");
Dnf dnf_from_json(const Json& j);

Json hierarchy_to_json(const HierarchySpec& hierarchy);
HierarchySpec hierarchy_from_json(const Json& j);

/// {"n": 5, "chains": [["01100", "11100"], ...]}; a bare array of chains is also accepted.
Json chain_plan_to_json(const ChainPlan& plan);
ChainPlan chain_plan_from_json(const Json& j);

/// {"n": 5, "values": {"01100": 1, ...}}; must cover the whole cube.
Json truth_table_to_json(const TruthTable& table);
TruthTable truth_table_from_json(const Json& j);

Json model_to_json(const StoredModel& model);
/// Dispatches on "kind"; VersionError for other schema versions.
StoredModel model_from_json(const Json& j);

void save_model(const StoredModel& model, const std::filesystem::path& path);
StoredModel load_model(const std::filesystem::path& path);

}  // namespace spi
