#pragma once

#include <optional>
#include <string>

#include "rlab/cli/report.hpp"
#include "rlab/dyadic/cones.hpp"
#include "rlab/dynamics/maps.hpp"

namespace rlab::cli {

// Parses a TOML file, or JSON when the path ends in ".json". Syntax errors are
// ValidationErrors.
json load_config_file(const std::string& path);
json parse_config_text(const std::string& text, bool is_json);

struct ResolvedConfig {
    std::string kind;
    json config;             // validated, defaults filled, "output" removed
    std::string hash;        // config_hash(config)
    std::string output_dir;
};

// Validates against schema_for(kind), fills defaults, applies the seed override.
ResolvedConfig resolve_config(const json& raw, std::optional<long long> seed_override = std::nullopt);

dynamics::MapModel build_map(const json& section);
dynamics::Weight build_weight(const json& section);
dyadic::ConeSystem build_cones(const json& section);

}  // namespace rlab::cli
