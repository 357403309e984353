#include "rlab/cli/schema.hpp"

#include <cmath>
#include <numbers>

#include "rlab/common/errors.hpp"

namespace rlab::cli {

namespace {

json num(double def, std::string doc) { return {{"type", "number"}, {"default", def}, {"description", std::move(doc)}}; }
json integer(long long def, std::string doc) {
    return {{"type", "integer"}, {"default", def}, {"description", std::move(doc)}};
}
json with(json s, const char* key, json v) {
    s[key] = std::move(v);
    return s;
}

json object(json props, std::string doc, std::vector<std::string> required = {}) {
    json s = {{"type", "object"},
              {"additionalProperties", false},
              {"properties", std::move(props)},
              {"description", std::move(doc)}};
    if (!required.empty()) s["required"] = required;
    return s;
}

const double kRadToDeg = 180.0 / std::numbers::pi;

json map_section() {
    return object(
        {{"type", {{"type", "string"},
                   {"enum", {"expanding_circle", "linear_toral", "perturbed_toral"}},
                   {"description", "map family"}}},
         {"degree", with(integer(2, "k of T(x) = k x + eps sin(2 pi x)"), "minimum", 2)},
         {"eps", num(0.0, "eps of the expanding circle map; k - 2 pi |eps| > 1 is required")},
         {"matrix", {{"type", "array"},
                     {"items", {{"type", "integer"}}},
                     {"minItems", 4},
                     {"maxItems", 4},
                     {"default", {2, 1, 1, 1}},
                     {"description", "toral matrix, row major [a11, a12, a21, a22]"}}},
         {"delta", num(0.0, "perturbation delta of the perturbed toral map")}},
        "dynamical system", {"type"});
}

json weight_section() {
    return object(
        {{"type", {{"type", "string"},
                   {"enum", {"constant", "inverse_derivative", "inverse_unstable_jacobian", "trig"}},
                   {"default", "constant"},
                   {"description", "weight g"}}},
         {"value", num(1.0, "real part of a constant weight")},
         {"value_imag", num(0.0, "imaginary part of a constant weight")},
         {"terms", {{"type", "array"},
                    {"items", {{"type", "array"}, {"items", {{"type", "number"}}}, {"minItems", 4}, {"maxItems", 4}}},
                    {"default", json::array()},
                    {"description", "trig weight terms [re, im, k1, k2] for amp exp(2 pi i k.x)"}}}},
        "weight function");
}

json cones_section() {
    const double plus = std::atan(-(1.0 + std::sqrt(5.0)) / 2.0) * kRadToDeg;
    const double minus = std::atan((std::sqrt(5.0) - 1.0) / 2.0) * kRadToDeg;
    return object({{"plus_center_deg", num(plus, "axis of the plus cone (degrees, mod 180)")},
                   {"plus_half_width_deg", with(num(20.0, "half width of the plus cone"), "exclusiveMinimum", 0)},
                   {"minus_center_deg", num(minus, "axis of the minus cone (degrees, mod 180)")},
                   {"minus_half_width_deg", with(num(25.0, "half width of the minus cone"), "exclusiveMinimum", 0)},
                   {"tilde_fraction", with(with(num(0.5, "shrink factor for widened multipliers"), "exclusiveMinimum", 0),
                                           "exclusiveMaximum", 1)},
                   {"check_fraction", with(with(num(0.8, "shrink factor for post-localisation"), "exclusiveMinimum", 0),
                                           "exclusiveMaximum", 1)}},
                  "cone pair for anisotropic spaces; defaults are adapted to [[2,1],[1,1]]");
}

json resonance_section() {
    return object({{"n_f", with(integer(32, "retained Fourier modes per axis"), "minimum", 1)},
                   {"refinement", with(integer(2, "finer truncation is refinement * n_f"), "minimum", 2)},
                   {"stability_tol", with(num(1e-6, "max distance to the finer spectrum"), "exclusiveMinimum", 0)},
                   {"margin", with(num(0.05, "accept |lambda| > filter + margin"), "minimum", 0)},
                   {"quadrature_factor", with(integer(8, "quadrature nodes per mode (expanding maps)"), "minimum", 8)},
                   {"radius_m", with(integer(10, "orbit length for the spectral radius estimate"), "minimum", 1)},
                   {"radius_points", with(integer(64, "base points per axis for that estimate"), "minimum", 1)}},
                  "truncation and filtering of the operator matrix");
}

json determinant_section() {
    return object({{"max_m", with(with(integer(14, "number of trace sums"), "minimum", 2), "maximum", 40)}},
                  "periodic-orbit series");
}

json common(const std::string& kind) {
    return {{"kind", {{"type", "string"}, {"enum", {kind}}, {"description", "experiment kind"}}},
            {"seed", with(integer(1, "random seed"), "minimum", 0)},
            {"output", {{"type", "string"}, {"default", "out"}, {"description", "output directory (not hashed)"}}}};
}

json pq(double p, double q) {
    return {{"p", num(p, "regularity exponent p")}, {"q", with(num(q, "exponent q (toral maps)"), "maximum", 0)}};
}

json merge(json a, const json& b) {
    for (auto it = b.begin(); it != b.end(); ++it) a[it.key()] = it.value();
    return a;
}

json build(const std::string& kind) {
    json props = common(kind);
    std::vector<std::string> required{"kind"};
    if (kind == "norms") {
        props["norms"] = object(
            {{"grid_n", with(integer(256, "grid points of the corpus functions"), "minimum", 64)},
             {"ps", {{"type", "array"},
                     {"items", {{"type", "number"}, {"exclusiveMinimum", 0}, {"exclusiveMaximum", 1}}},
                     {"minItems", 1},
                     {"default", {0.3, 0.5, 0.7}},
                     {"description", "Hoelder exponents"}}},
             {"ratio_bound", with(num(10.0, "C of the interval [1/C, C]"), "minimum", 1)},
             {"orthogonality_gap", with(integer(5, "|m - n| at which psi_m psi_n must vanish"), "minimum", 1)}},
            "norm machinery");
    } else if (kind == "kernel-check") {
        props["branch"] = object(
            {{"type", {{"type", "string"}, {"enum", {"scaling", "perturbed_scaling"}}, {"default", "perturbed_scaling"},
                       {"description", "1D local branch y -> c y (+ a sin(2 pi y))"}}},
             {"c", with(with(num(0.5, "contraction factor"), "exclusiveMinimum", 0), "exclusiveMaximum", 1)},
             {"a", num(0.01, "a of perturbed_scaling")}},
            "smooth local branch");
        props["amplitude"] = object(
            {{"type", {{"type", "string"}, {"enum", {"bump", "power_bump"}}, {"default", "bump"},
                       {"description", "gamma(w) = exp(1 - 1/(1 - 4 w^2)), optionally times |w|^a"}}},
             {"a", with(num(3.0, "power of power_bump"), "exclusiveMinimum", 0)}},
            "amplitude gamma");
        props["kernel"] = object(
            {{"max_index", with(with(integer(9, "largest n and l"), "minimum", 1), "maximum", 9)},
             {"grid_points", with(integer(9, "x and y sample points"), "minimum", 1)},
             {"grid_lo", num(-1.0, "left end of the x, y sample line")},
             {"grid_hi", num(1.0, "right end of the x, y sample line")},
             {"envelope", {{"type", "string"}, {"enum", {"expanding", "appendix"}}, {"default", "expanding"},
                           {"description", "envelope profile"}}},
             {"r_test", with(integer(3, "smoothness parameter r of the envelope"), "minimum", 2)},
             {"factor", with(integer(16, "w-nodes per unit = factor 2^max(n,l,3)"), "minimum", 16)},
             {"max_factor", with(integer(64, "Richardson budget"), "minimum", 32)},
             {"rel_tol", with(num(1e-6, "Richardson tolerance relative to max |V|"), "exclusiveMinimum", 0)},
             {"box", with(num(8.0, "side of the periodic box"), "minimum", 2)},
             {"spread_limit", with(num(50.0, "allowed max/min spread of the fitted constants"), "minimum", 1)}},
            "kernel sweep");
    } else {
        props["map"] = map_section();
        props["weight"] = weight_section();
        required.push_back("map");
        if (kind == "bounds") {
            props = merge(props, pq(1.0, -1.0));
            props["bounds"] = object(
                {{"ms", {{"type", "array"}, {"items", {{"type", "integer"}, {"minimum", 1}}}, {"minItems", 4},
                         {"default", {1, 2, 3, 4, 5, 6, 7, 8}}, {"description", "orbit lengths m"}}},
                 {"ts", {{"type", "array"}, {"items", {{"type", "number"}, {"exclusiveMinimum", 0}}},
                         {"default", {2.0, 4.0}}, {"description", "finite t values"}}},
                 {"include_infinity", {{"type", "boolean"}, {"default", true}, {"description", "also t = infinity"}}},
                 {"quad_points", with(integer(256, "quadrature points per axis"), "minimum", 4)},
                 {"sup_points", with(integer(64, "sup grid points per axis"), "minimum", 4)},
                 {"monte_carlo", {{"type", "boolean"}, {"default", false}, {"description", "Monte Carlo rho"}}},
                 {"samples", with(integer(65536, "Monte Carlo samples"), "minimum", 16)},
                 {"monotonicity_tol", with(num(1e-6, "tolerance of rho <= R"), "minimum", 0)}},
                "rho and R estimates");
        } else {
            props = merge(props, pq(2.0, -1.0));
            props["cones"] = cones_section();
            props["resonance"] = resonance_section();
            if (kind != "resonances") props["determinant"] = determinant_section();
            if (kind == "zero-eigen-compare")
                props["matching"] = object({{"tol", with(num(1e-5, "pairing tolerance"), "exclusiveMinimum", 0)}},
                                           "zero/eigenvalue matching");
        }
    }
    json s = object(props, "configuration of a " + kind + " experiment", required);
    s["$schema"] = "https://json-schema.org/draft/2020-12/schema";
    s["title"] = kind;
    return s;
}

std::string type_of(const json& v) {
    if (v.is_boolean()) return "boolean";
    if (v.is_number_integer()) return "integer";
    if (v.is_number()) return "number";
    if (v.is_string()) return "string";
    if (v.is_array()) return "array";
    if (v.is_object()) return "object";
    return "null";
}

}  // namespace

const std::vector<ExperimentKind>& experiment_kinds() {
    static const std::vector<ExperimentKind> kinds{
        {"norms", "dyadic partition invariants and dyadic/classical Hoelder norm ratios over a fixed corpus"},
        {"resonances", "filtered eigenvalues of the truncated transfer operator"},
        {"determinant", "trace sums, determinant coefficients and zeros, next to the accepted resonances"},
        {"bounds", "rho^{p,q}(m)^{1/m} and R^{p,q,t} estimates with monotonicity checks"},
        {"kernel-check", "kernel decay sweep over non-linked (n, l) with fitted envelope constants"},
        {"zero-eigen-compare", "pairing of reciprocal determinant zeros with accepted resonances"},
    };
    return kinds;
}

bool is_kind(const std::string& name) {
    for (const auto& k : experiment_kinds())
        if (k.name == name) return true;
    return false;
}

json schema_for(const std::string& kind) {
    require(is_kind(kind), "unknown experiment kind '" + kind + "'");
    return build(kind);
}

void validate(const json& v, const json& s, const std::string& path) {
    const std::string want = s.value("type", "");
    const std::string got = type_of(v);
    if (!want.empty()) {
        const bool ok = want == got || (want == "number" && got == "integer");
        require(ok, path + ": expected " + want + ", got " + got);
    }
    if (s.contains("enum")) {
        bool found = false;
        for (const auto& e : s["enum"]) found = found || e == v;
        require(found, path + ": value " + v.dump() + " is not one of " + s["enum"].dump());
    }
    if (v.is_number()) {
        const double x = v.get<double>();
        require(std::isfinite(x), path + ": value must be finite");
        if (s.contains("minimum")) require(x >= s["minimum"].get<double>(), path + ": must be >= " + s["minimum"].dump());
        if (s.contains("maximum")) require(x <= s["maximum"].get<double>(), path + ": must be <= " + s["maximum"].dump());
        if (s.contains("exclusiveMinimum"))
            require(x > s["exclusiveMinimum"].get<double>(), path + ": must be > " + s["exclusiveMinimum"].dump());
        if (s.contains("exclusiveMaximum"))
            require(x < s["exclusiveMaximum"].get<double>(), path + ": must be < " + s["exclusiveMaximum"].dump());
    }
    if (v.is_array()) {
        if (s.contains("minItems"))
            require(v.size() >= s["minItems"].get<std::size_t>(), path + ": needs at least " + s["minItems"].dump() + " items");
        if (s.contains("maxItems"))
            require(v.size() <= s["maxItems"].get<std::size_t>(), path + ": allows at most " + s["maxItems"].dump() + " items");
        if (s.contains("items"))
            for (std::size_t i = 0; i < v.size(); ++i) validate(v[i], s["items"], path + "[" + std::to_string(i) + "]");
    }
    if (v.is_object()) {
        const json props = s.value("properties", json::object());
        if (s.contains("required"))
            for (const auto& r : s["required"])
                require(v.contains(r.get<std::string>()), path + ": missing required key '" + r.get<std::string>() + "'");
        for (auto it = v.begin(); it != v.end(); ++it) {
            if (props.contains(it.key())) {
                validate(it.value(), props[it.key()], path + "." + it.key());
            } else {
                require(s.value("additionalProperties", true) != false, path + ": unknown key '" + it.key() + "'");
            }
        }
    }
}

json apply_defaults(const json& v, const json& s) {
    // Integers written where a number is expected are stored as floating point, so
    // "eps = 0" and "eps = 0.0" resolve (and hash) identically.
    if (v.is_number_integer() && s.value("type", "") == "number") return json(v.get<double>());
    if (v.is_array() && s.contains("items")) {
        json out = json::array();
        for (const auto& e : v) out.push_back(apply_defaults(e, s["items"]));
        return out;
    }
    if (!v.is_object() || !s.contains("properties")) return v;
    json out = v;
    for (auto it = s["properties"].begin(); it != s["properties"].end(); ++it) {
        const json& ps = it.value();
        if (!out.contains(it.key())) {
            if (ps.contains("default")) out[it.key()] = ps["default"];
            else if (ps.value("type", "") == "object") out[it.key()] = json::object();
            else continue;
        }
        out[it.key()] = apply_defaults(out[it.key()], ps);
    }
    return out;
}

}  // namespace rlab::cli
