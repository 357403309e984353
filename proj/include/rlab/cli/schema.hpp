#pragma once

#include <string>
#include <vector>

#include "rlab/cli/report.hpp"

namespace rlab::cli {

struct ExperimentKind {
    std::string name;
    std::string doc;
};

// The six experiment kinds, in a fixed order.
const std::vector<ExperimentKind>& experiment_kinds();
bool is_kind(const std::string& name);

// Schema document for one kind (a JSON Schema subset: type, enum, minimum,
// exclusiveMinimum, maximum, exclusiveMaximum, minItems, maxItems, items,
// properties, required, additionalProperties, default, description). Every
// default value of the configuration lives here. Unknown kind -> ValidationError.
json schema_for(const std::string& kind);

// Checks `value` against `schema` and throws ValidationError naming the first
// offending path. Works on any document in the subset above, so an emitted and
// re-parsed schema validates exactly like the built-in one.
void validate(const json& value, const json& schema, const std::string& path = "config");

// Fills defaults from the schema, recursing into objects.
json apply_defaults(const json& value, const json& schema);

}  // namespace rlab::cli
