#pragma once

// JSON mapping for the domain types. Field names follow the on-disk schemas
// documented in the README.

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "sarceval/datamodel.hpp"

namespace sarceval {

void to_json(nlohmann::json& j, const Sample& s);
void from_json(const nlohmann::json& j, Sample& s);

void to_json(nlohmann::json& j, const BoundingBox& b);
void from_json(const nlohmann::json& j, BoundingBox& b);

void to_json(nlohmann::json& j, const Detection& d);
void from_json(const nlohmann::json& j, Detection& d);

void to_json(nlohmann::json& j, const ConceptEdge& e);
void from_json(const nlohmann::json& j, ConceptEdge& e);

void to_json(nlohmann::json& j, const EnrichedContext& c);
void from_json(const nlohmann::json& j, EnrichedContext& c);

void to_json(nlohmann::json& j, const Prediction& p);
void from_json(const nlohmann::json& j, Prediction& p);

/// report.json layout. The timestamp is deliberately left out.
void to_json(nlohmann::json& j, const RunReport& r);
void from_json(const nlohmann::json& j, RunReport& r);

std::string read_file(const std::filesystem::path& path);
/// Writes through a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace sarceval
