#pragma once

// JSON encoding of the domain types and the dataset JSONL format.
// Every dataset line carries "schema": "judge-bench/1".

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "judgebench/domain.hpp"

namespace judgebench {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kSchemaVersion = "judge-bench/1";

Json to_json(const GeoPoint& p);
Json to_json(const RatingExpression& r);
Json to_json(const OpeningHours& h);
Json to_json(const UserBlock& u);
Json to_json(const SystemBlock& s);
Json to_json(const Label& l);
Json to_json(const Verdict& v);

// Decoders throw SchemaViolation(field, reason) on a missing or invalid field
// and validate the decoded value against the type invariants.
GeoPoint geo_point_from_json(const Json& j);
OpeningHours opening_hours_from_json(const Json& j);
UserBlock user_block_from_json(const Json& j);
SystemBlock system_block_from_json(const Json& j);
Label label_from_json(const Json& j);

/// Single-line JSON object.
std::string serialize_pair(const LabeledPair& pair);

/// Throws MalformedJson or SchemaViolation.
LabeledPair deserialize_pair(std::string_view text);

void write_dataset(const std::filesystem::path& path, const std::vector<LabeledPair>& pairs);
/// Throws MalformedJson/SchemaViolation prefixed with the line number, or
/// SchemaViolation("pair_id", ...) on duplicates.
std::vector<LabeledPair> read_dataset(const std::filesystem::path& path);

}  // namespace judgebench
