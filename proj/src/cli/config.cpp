#include "rlab/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include "toml.hpp"

#include "rlab/cli/schema.hpp"
#include "rlab/common/errors.hpp"

namespace rlab::cli {

namespace {

json from_toml(const toml::node& n) {
    if (auto t = n.as_table()) {
        json o = json::object();
        for (const auto& [k, v] : *t) o[std::string(k.str())] = from_toml(v);
        return o;
    }
    if (auto a = n.as_array()) {
        json o = json::array();
        for (const auto& v : *a) o.push_back(from_toml(v));
        return o;
    }
    if (auto v = n.as_integer()) return json(v->get());
    if (auto v = n.as_floating_point()) return json(v->get());
    if (auto v = n.as_boolean()) return json(v->get());
    if (auto v = n.as_string()) return json(v->get());
    throw ValidationError("unsupported TOML value (dates and times are not configuration values)");
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

json parse_config_text(const std::string& text, bool is_json) {
    if (is_json) {
        try {
            return json::parse(text);
        } catch (const json::parse_error& e) {
            throw ValidationError(std::string("config is not valid JSON: ") + e.what());
        }
    }
    try {
        return from_toml(toml::parse(text));
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << "config is not valid TOML: " << e.description() << " at line " << e.source().begin.line;
        throw ValidationError(msg.str());
    }
}

json load_config_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    require(static_cast<bool>(f), "cannot read config file " + path);
    std::ostringstream text;
    text << f.rdbuf();
    return parse_config_text(text.str(), ends_with(path, ".json"));
}

ResolvedConfig resolve_config(const json& raw, std::optional<long long> seed_override) {
    require(raw.is_object(), "config must be a table/object");
    require(raw.contains("kind") && raw["kind"].is_string(), "config needs a string 'kind'");
    const std::string kind = raw["kind"].get<std::string>();
    require(is_kind(kind), "unknown experiment kind '" + kind + "'");
    json c = raw;
    if (seed_override) c["seed"] = *seed_override;
    const json schema = schema_for(kind);
    validate(c, schema);
    c = apply_defaults(c, schema);
    ResolvedConfig r;
    r.kind = kind;
    r.output_dir = c["output"].get<std::string>();
    c.erase("output");
    // Domain rules that the schema cannot express (expansion, hyperbolicity, cone
    // disjointness, weight/map compatibility) fail here, before any work starts.
    if (c.contains("map")) {
        const auto map = build_map(c["map"]);
        const auto g = build_weight(c["weight"]);
        if (map.dim() == 1) (void)g(map, 0.25);
        else (void)g(map, dynamics::Vec2(0.25, 0.25));
    }
    if (c.contains("cones")) (void)build_cones(c["cones"]);
    r.config = c;
    r.hash = config_hash(c);
    return r;
}

dynamics::MapModel build_map(const json& s) {
    const std::string type = s.at("type").get<std::string>();
    if (type == "expanding_circle") return dynamics::MapModel::expanding_circle(s["degree"].get<int>(), s["eps"].get<double>());
    const auto& m = s["matrix"];
    dynamics::Mat2i a;
    a << m[0].get<long long>(), m[1].get<long long>(), m[2].get<long long>(), m[3].get<long long>();
    if (type == "linear_toral") return dynamics::MapModel::linear_toral(a);
    return dynamics::MapModel::perturbed_toral(a, s["delta"].get<double>());
}

dynamics::Weight build_weight(const json& s) {
    const std::string type = s.at("type").get<std::string>();
    if (type == "constant")
        return dynamics::Weight::constant({s["value"].get<double>(), s["value_imag"].get<double>()});
    if (type == "inverse_derivative") return dynamics::Weight::inverse_derivative();
    if (type == "inverse_unstable_jacobian") return dynamics::Weight::inverse_unstable_jacobian();
    std::vector<dynamics::TrigTerm> terms;
    for (const auto& t : s["terms"]) {
        const double k1 = t[2].get<double>(), k2 = t[3].get<double>();
        require(k1 == std::round(k1) && k2 == std::round(k2), "trig weight frequencies must be integers");
        terms.push_back({{t[0].get<double>(), t[1].get<double>()}, static_cast<int>(k1), static_cast<int>(k2)});
    }
    require(!terms.empty(), "trig weight needs at least one term");
    return dynamics::Weight::trig(std::move(terms));
}

dyadic::ConeSystem build_cones(const json& s) {
    constexpr double kDeg = std::numbers::pi / 180.0;
    dyadic::ConeSystem c;
    c.plus = {s["plus_center_deg"].get<double>() * kDeg, s["plus_half_width_deg"].get<double>() * kDeg};
    c.minus = {s["minus_center_deg"].get<double>() * kDeg, s["minus_half_width_deg"].get<double>() * kDeg};
    c.tilde_fraction = s["tilde_fraction"].get<double>();
    c.check_fraction = s["check_fraction"].get<double>();
    c.validate();
    return c;
}

}  // namespace rlab::cli
