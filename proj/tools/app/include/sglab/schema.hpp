#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace sglab {

/// Validates `doc` against the subset of JSON Schema used by the configuration schema
/// (type, enum, minimum, maximum, exclusiveMinimum, required, properties,
/// additionalProperties, items, minItems, maxItems). Returns "path: problem" messages.
std::vector<std::string> validate(const nlohmann::json& schema, const nlohmann::json& doc);

}  // namespace sglab
