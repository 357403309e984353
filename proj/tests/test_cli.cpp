#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "rlab/cli/config.hpp"
#include "rlab/cli/experiments.hpp"
#include "rlab/cli/schema.hpp"
#include "rlab/common/errors.hpp"
#include "rlab/common/parallel.hpp"

using namespace rlab::cli;
namespace fs = std::filesystem;

namespace {

const std::string kSource = RLAB_SOURCE_DIR;

std::string config_path(const std::string& name) { return kSource + "/configs/" + name; }

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

struct Call {
    int code;
    std::string out, err;
};

Call call(std::vector<std::string> args) {
    args.insert(args.begin(), "rlab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("rlab_test_cli_" + name);
    fs::remove_all(p);
    return p;
}

// Same structure and strings; numbers within 1e-9 relative (1e-12 absolute).
void compare_json(const json& a, const json& b, const std::string& path) {
    INFO("at " << path);
    if (a.is_number() && b.is_number()) {
        const double x = a.get<double>(), y = b.get<double>();
        CHECK(std::abs(x - y) <= 1e-12 + 1e-9 * std::max(std::abs(x), std::abs(y)));
        return;
    }
    REQUIRE(a.type() == b.type());
    if (a.is_object()) {
        REQUIRE(a.size() == b.size());
        for (auto it = a.begin(); it != a.end(); ++it) {
            REQUIRE(b.contains(it.key()));
            compare_json(it.value(), b[it.key()], path + "." + it.key());
        }
    } else if (a.is_array()) {
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) compare_json(a[i], b[i], path + "[" + std::to_string(i) + "]");
    } else {
        CHECK(a == b);
    }
}

std::vector<std::complex<double>> complex_list(const json& arr, const char* key) {
    std::vector<std::complex<double>> out;
    for (const auto& e : arr) out.emplace_back(e[key][0].get<double>(), e[key][1].get<double>());
    return out;
}

}  // namespace

TEST_CASE("floating-point fields use 17 significant digits and keys are sorted") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1.0) == "1.0");
    CHECK(format_double(1.0 / 3.0) == "0.33333333333333331");
    CHECK(format_double(-2.5e-300) == "-2.5e-300");
    CHECK(dump_json(json{{"b", 1}, {"a", 0.5}}) == "{\n  \"a\": 0.5,\n  \"b\": 1\n}\n");
    CHECK(dump_json(json(std::numeric_limits<double>::infinity())) == "\"inf\"\n");
}

TEST_CASE("config hash ignores the output directory and integer/float spelling") {
    auto a = resolve_config(parse_config_text("kind = \"norms\"\noutput = \"x\"\n[norms]\nratio_bound = 10", false));
    auto b = resolve_config(parse_config_text("{\"kind\": \"norms\", \"output\": \"y\", \"norms\": {\"ratio_bound\": 10.0}}", true));
    CHECK(a.hash == b.hash);
    CHECK(a.output_dir == "x");
    CHECK_FALSE(a.config.contains("output"));
    auto c = resolve_config(parse_config_text("kind = \"norms\"\nseed = 7", false));
    CHECK(c.hash != a.hash);
    CHECK(resolve_config(parse_config_text("kind = \"norms\"", false), 7).hash == c.hash);
}

TEST_CASE("list_experiments gives six kinds") {
    auto r = call({"list"});
    CHECK(r.code == 0);
    CHECK(experiment_kinds().size() == 6);
    int lines = 0;
    for (char ch : r.out) lines += ch == '\n';
    CHECK(lines == 6);
    CHECK(call({"list"}).out == r.out);
}

TEST_CASE("emitted schemas round-trip against the validator") {
    const std::vector<std::pair<std::string, std::string>> bundled{
        {"doubling_halfweight.toml", "determinant"},      {"doubling_unitweight.toml", "determinant"},
        {"cat_unitweight.toml", "determinant"},           {"perturbed_doubling_compare.toml", "zero-eigen-compare"},
        {"cat_bounds.toml", "bounds"},                    {"kernel_decay.toml", "kernel-check"},
        {"norm_corpus.json", "norms"}};
    for (const auto& [file, kind] : bundled) {
        auto r = call({"schema", kind});
        REQUIRE(r.code == 0);
        const json reparsed = json::parse(r.out);
        CHECK(reparsed == schema_for(kind));
        const json raw = load_config_file(config_path(file));
        CHECK_NOTHROW(validate(raw, reparsed));
        json filled = apply_defaults(raw, reparsed);
        filled.erase("output");
        CHECK(filled == resolve_config(raw).config);
    }
    // Every kind's defaults validate against its own schema.
    for (const auto& k : experiment_kinds()) {
        const json s = schema_for(k.name);
        json minimal = {{"kind", k.name}};
        if (s["required"].size() > 1) minimal["map"] = {{"type", "expanding_circle"}};
        if (k.name == "bounds") minimal["map"] = {{"type", "linear_toral"}};
        CHECK_NOTHROW(validate(apply_defaults(minimal, s), s));
    }
}

TEST_CASE("schema and validation errors exit with status 2") {
    CHECK(call({"schema", "bogus"}).code == 2);
    CHECK(call({"run"}).code == 2);
    CHECK(call({}).code == 2);
    CHECK(call({"run", "--config", "does_not_exist.toml"}).code == 2);

    const auto dir = scratch("errors");
    fs::create_directories(dir);
    auto write = [&](const std::string& name, const std::string& text) {
        const auto p = (dir / name).string();
        std::ofstream(p) << text;
        return p;
    };
    auto r = call({"run", "--config",
                   write("expand.toml", "kind = \"determinant\"\n[map]\ntype = \"expanding_circle\"\neps = 0.2\n")});
    CHECK(r.code == 2);
    CHECK(r.err.find("expansion condition") != std::string::npos);
    CHECK(call({"run", "--config", write("kind.toml", "kind = \"bogus\"\n")}).code == 2);
    CHECK(call({"run", "--config", write("key.toml", "kind = \"norms\"\n[norms]\ngrid = 3\n")}).code == 2);
    CHECK(call({"run", "--config", write("type.toml", "kind = \"norms\"\nseed = \"one\"\n")}).code == 2);
    CHECK(call({"run", "--config", write("syntax.toml", "kind = \"norms\"\n[norms\n")}).code == 2);
    CHECK(call({"run", "--config", write("syntax.json", "{\"kind\": ")}).code == 2);
    CHECK(call({"run", "--config",
                write("cat.toml", "kind = \"resonances\"\n[map]\ntype = \"linear_toral\"\nmatrix = [1, 1, 0, 1]\n")})
              .code == 2);
    CHECK(call({"run", "--config",
                write("cones.toml", "kind = \"resonances\"\n[map]\ntype = \"linear_toral\"\n"
                                    "[cones]\nplus_center_deg = 0.0\nminus_center_deg = 30.0\n")})
              .code == 2);
    fs::remove_all(dir);
}

TEST_CASE("numerical failure exits with status 3 and leaves diagnostics") {
    const auto dir = scratch("numerical");
    fs::create_directories(dir);
    const auto cfg = (dir / "k.toml").string();
    // |w|^{1/2} makes the w-rule converge slowly; a doubling budget of one step runs out.
    std::ofstream(cfg) << "kind = \"kernel-check\"\n[amplitude]\ntype = \"power_bump\"\na = 0.5\n"
                          "[kernel]\nmax_index = 5\nmax_factor = 32\n";
    auto r = call({"run", "--config", cfg, "--out", (dir / "out").string()});
    CHECK(r.code == 3);
    CHECK(r.err.find("budget") != std::string::npos);
    const json d = json::parse(slurp((dir / "out" / "diagnostics.json").string()));
    CHECK(d["status"] == 3);
    CHECK(d["config_hash"].get<std::string>().rfind("fnv1a64:", 0) == 0);
    fs::remove_all(dir);
}

TEST_CASE("golden summaries of the three closed-form benchmarks") {
    for (std::string name : {"doubling_halfweight", "doubling_unitweight", "cat_unitweight"}) {
        const auto dir = scratch(name);
        auto r = call({"run", "--config", name + ".toml", "--out", dir.string()});
        REQUIRE(r.code == 0);
        const json got = json::parse(slurp((dir / "summary.json").string()));
        const json want = json::parse(slurp(kSource + "/tests/golden/" + name + ".summary.json"));
        compare_json(got, want, name);

        // The closed forms themselves.
        const auto zeros = complex_list(got["results"]["determinant"]["zeros"], "z");
        const auto res = complex_list(got["results"]["resonance"]["accepted"], "value");
        REQUIRE(zeros.size() == 1);
        REQUIRE(res.size() == 1);
        const double lead = name == "doubling_unitweight" ? 2.0 : 1.0;
        CHECK(std::abs(zeros[0] - 1.0 / lead) < 1e-10);
        CHECK(std::abs(res[0] - lead) < 1e-10);

        // Every report file carries the config hash.
        const std::string hash = got["config_hash"];
        int files = 0;
        for (const auto& e : fs::directory_iterator(dir)) {
            CHECK_MESSAGE(slurp(e.path().string()).find(hash) != std::string::npos, e.path().string());
            ++files;
        }
        CHECK(files == 1 + 2 * 4 + 1);  // summary, {traces,zeros,resonances,spectrum}.{csv,dat}, run_info
        fs::remove_all(dir);
    }
}

TEST_CASE("summaries are byte-identical across thread counts") {
    const int saved = rlab::thread_count();
    for (const std::string text :
         {"kind = \"zero-eigen-compare\"\np = 8.0\n[map]\ntype = \"expanding_circle\"\neps = 0.02\n"
          "[weight]\ntype = \"inverse_derivative\"\n[resonance]\nn_f = 48\n[determinant]\nmax_m = 10\n",
          "kind = \"kernel-check\"\n[kernel]\nmax_index = 6\ngrid_points = 5\n",
          "kind = \"bounds\"\nseed = 3\n[map]\ntype = \"perturbed_toral\"\ndelta = 0.01\n"
          "[bounds]\nms = [1, 2, 3, 4]\nmonte_carlo = true\nsamples = 4096\nsup_points = 16\n",
          "kind = \"norms\"\n"}) {
        const auto cfg = resolve_config(parse_config_text(text, false));
        std::vector<std::string> outs;
        for (int t : {1, 2, 3}) {
            rlab::set_thread_count(t);
            outs.push_back(summary_text(cfg, run_experiment(cfg)));
        }
        CHECK(outs[0] == outs[1]);
        CHECK(outs[0] == outs[2]);
    }
    rlab::set_thread_count(saved);
}

TEST_CASE("bundled configs resolve and the seed flag overrides the config") {
    const auto dir = scratch("seed");
    auto a = call({"run", "--config", "norm_corpus.json", "--out", (dir / "a").string()});
    auto b = call({"run", "--config", "norm_corpus.json", "--out", (dir / "b").string(), "--seed", "5"});
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    const json ja = json::parse(slurp((dir / "a" / "summary.json").string()));
    const json jb = json::parse(slurp((dir / "b" / "summary.json").string()));
    CHECK(ja["config"]["seed"] == 2024);
    CHECK(jb["config"]["seed"] == 5);
    CHECK(ja["config_hash"] != jb["config_hash"]);
    CHECK(ja["results"]["partition_of_unity_max_error"] == 0.0);
    CHECK(ja["results"]["ratio_within_bound"] == true);
    fs::remove_all(dir);
}
