#include "rlab/cli/experiments.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>

#include "CLI11.hpp"
#include "rlab/cli/schema.hpp"
#include "rlab/common/errors.hpp"
#include "rlab/common/parallel.hpp"
#include "rlab/determinants/bounds.hpp"
#include "rlab/determinants/matching.hpp"
#include "rlab/dyadic/corpus.hpp"
#include "rlab/dyadic/decomposition.hpp"
#include "rlab/kernels/kernel.hpp"
#include "rlab/transfer/resonances.hpp"

#ifndef RLAB_CONFIG_DIR
#define RLAB_CONFIG_DIR ""
#endif

namespace rlab::cli {

namespace {

using dynamics::cplx;

std::string f(double v) { return format_double(v); }
std::string i(long long v) { return std::to_string(v); }

transfer::ResonanceConfig resonance_config(const json& c, const dynamics::MapModel& map) {
    const json& s = c["resonance"];
    transfer::ResonanceConfig r;
    r.n_f = s["n_f"].get<int>();
    r.refinement = s["refinement"].get<int>();
    r.stability_tol = s["stability_tol"].get<double>();
    r.margin = s["margin"].get<double>();
    r.quadrature_factor = s["quadrature_factor"].get<int>();
    r.radius_m = s["radius_m"].get<int>();
    r.radius_points = s["radius_points"].get<int>();
    r.p = c["p"].get<double>();
    r.q = c["q"].get<double>();
    if (map.dim() == 2) r.cones = build_cones(c["cones"]);
    return r;
}

json resonance_json(const transfer::ResonanceReport& rep, ExperimentResult& out) {
    json acc = json::array();
    CsvTable t{{"re", "im", "abs", "multiplicity", "stability", "residual"}, {}};
    for (const auto& r : rep.accepted) {
        acc.push_back({{"value", to_json(r.value)},
                       {"multiplicity", r.multiplicity},
                       {"stability", r.stability},
                       {"residual", r.residual}});
        t.add({f(r.value.real()), f(r.value.imag()), f(std::abs(r.value)), i(r.multiplicity), f(r.stability),
               f(r.residual)});
    }
    out.tables["resonances"] = t;
    CsvTable sp{{"index", "re", "im", "abs"}, {}};
    for (std::size_t k = 0; k < rep.coarse_spectrum.size(); ++k) {
        const cplx z = rep.coarse_spectrum[k];
        sp.add({i(static_cast<long long>(k)), f(z.real()), f(z.imag()), f(std::abs(z))});
    }
    out.tables["spectrum"] = sp;
    return {{"accepted", acc},
            {"filter", rep.filter},
            {"margin", rep.margin},
            {"radius_factor", rep.radius_factor},
            {"rate_factor", rep.rate_factor},
            {"n_coarse", rep.n_coarse},
            {"n_fine", rep.n_fine}};
}

json series_json(const determinants::DeterminantSeries& s, const determinants::ZeroReport& z, ExperimentResult& out) {
    json traces = json::array(), coeffs = json::array(), zeros = json::array();
    for (auto t : s.traces) traces.push_back(to_json(t));
    for (auto a : s.coeffs) coeffs.push_back(to_json(a));
    CsvTable tt{{"m", "trace_re", "trace_im", "coeff_re", "coeff_im", "coeff_abs"}, {}};
    for (std::size_t m = 0; m < s.coeffs.size(); ++m) {
        const cplx t = m == 0 ? cplx(0.0) : s.traces[m - 1], a = s.coeffs[m];
        tt.add({i(static_cast<long long>(m)), f(t.real()), f(t.imag()), f(a.real()), f(a.imag()), f(std::abs(a))});
    }
    out.tables["traces"] = tt;
    CsvTable zt{{"z_re", "z_im", "reciprocal_re", "reciprocal_im", "order", "agreement"}, {}};
    for (const auto& d : z.zeros) {
        const cplx r = 1.0 / d.z;
        zeros.push_back({{"z", to_json(d.z)}, {"reciprocal", to_json(r)}, {"order", d.order}, {"agreement", d.agreement}});
        zt.add({f(d.z.real()), f(d.z.imag()), f(r.real()), f(r.imag()), i(d.order), f(d.agreement)});
    }
    out.tables["zeros"] = zt;
    return {{"traces", traces},
            {"coefficients", coeffs},
            {"reliability_radius", s.reliability_radius},
            {"decay_rate", s.decay_rate},
            {"exact", s.exact},
            {"diagnostic", s.diagnostic},
            {"zeros", zeros},
            {"zero_diagnostic", z.diagnostic}};
}

ExperimentResult run_norms(const json& c) {
    ExperimentResult out;
    const json& s = c["norms"];
    const int n = s["grid_n"].get<int>();
    const int top = dyadic::n_max_for(n);
    const int gap = s["orthogonality_gap"].get<int>();
    const double bound = s["ratio_bound"].get<double>();

    // Invariants on the lattice frequencies of the grid.
    double pou = 0.0;
    long long support = 0, ortho = 0;
    for (int k = 0; k <= n / 2; ++k) {
        const double r = k;
        double sum = 0.0;
        for (int m = 0; m <= top; ++m) {
            const double v = dyadic::psi_n(m, r);
            sum += v;
            if (m >= 1 && (r < std::ldexp(1.0, m - 1) || r > std::ldexp(1.0, m + 1)) && v != 0.0) ++support;
            for (int l = m + gap; l <= top; ++l)
                if (v * dyadic::psi_n(l, r) != 0.0) ++ortho;
        }
        if (r <= std::ldexp(1.0, top)) pou = std::max(pou, std::abs(sum - 1.0));
    }

    std::vector<double> ps;
    for (const auto& p : s["ps"]) ps.push_back(p.get<double>());
    const auto corpus = dyadic::norm_corpus(n, c["seed"].get<std::uint64_t>());
    const auto ratios = dyadic::norm_ratios(corpus, ps);
    CsvTable t{{"function", "p", "classical", "star", "ratio"}, {}};
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& r : ratios) {
        t.add({r.name, f(r.p), f(r.classical), f(r.star), f(r.ratio)});
        lo = std::min(lo, r.ratio);
        hi = std::max(hi, r.ratio);
    }
    out.tables["norm_ratios"] = t;
    out.results = {{"n_max", top},
                   {"partition_of_unity_max_error", pou},
                   {"support_violations", support},
                   {"orthogonality_violations", ortho},
                   {"corpus_size", corpus.size()},
                   {"ratio_min", lo},
                   {"ratio_max", hi},
                   {"ratio_within_bound", lo >= 1.0 / bound && hi <= bound}};
    return out;
}

ExperimentResult run_resonances(const json& c) {
    ExperimentResult out;
    const auto map = build_map(c["map"]);
    const auto g = build_weight(c["weight"]);
    const auto rep = transfer::resonances(map, g, resonance_config(c, map));
    out.results = {{"map", map.describe()}, {"weight", g.describe()}, {"resonance", resonance_json(rep, out)}};
    return out;
}

ExperimentResult run_determinant(const json& c, bool compare) {
    ExperimentResult out;
    const auto map = build_map(c["map"]);
    const auto g = build_weight(c["weight"]);
    const auto series = determinants::determinant_series(map, g, c["determinant"]["max_m"].get<int>());
    const auto zeros = determinants::determinant_zeros(series);
    const auto rep = transfer::resonances(map, g, resonance_config(c, map));
    out.results = {{"map", map.describe()},
                   {"weight", g.describe()},
                   {"determinant", series_json(series, zeros, out)},
                   {"resonance", resonance_json(rep, out)}};
    if (!compare) return out;

    const double radius = std::min(series.reliability_radius, 1.0 / (rep.filter + rep.margin));
    const auto table = determinants::compare_zeros_eigenvalues(rep, zeros, radius, c["matching"]["tol"].get<double>());
    json pairs = json::array(), uz = json::array(), ur = json::array();
    CsvTable t{{"zero_reciprocal_re", "zero_reciprocal_im", "resonance_re", "resonance_im", "distance"}, {}};
    for (const auto& p : table.pairs) {
        pairs.push_back({{"zero_reciprocal", to_json(p.zero_reciprocal)},
                         {"resonance", to_json(p.resonance)},
                         {"distance", p.distance}});
        t.add({f(p.zero_reciprocal.real()), f(p.zero_reciprocal.imag()), f(p.resonance.real()), f(p.resonance.imag()),
               f(p.distance)});
    }
    for (auto z : table.unmatched_zeros) uz.push_back(to_json(z));
    for (auto z : table.unmatched_resonances) ur.push_back(to_json(z));
    out.tables["matching"] = t;
    out.results["matching"] = {{"radius", table.radius},
                               {"tolerance", table.tolerance},
                               {"pairs", pairs},
                               {"unmatched_zeros", uz},
                               {"unmatched_resonances", ur},
                               {"max_distance", table.max_distance},
                               {"perfect", table.perfect()}};
    return out;
}

ExperimentResult run_bounds(const json& c) {
    ExperimentResult out;
    const auto map = build_map(c["map"]);
    const auto g = build_weight(c["weight"]);
    const json& s = c["bounds"];
    std::vector<int> ms;
    std::vector<double> ts;
    for (const auto& m : s["ms"]) ms.push_back(m.get<int>());
    for (const auto& t : s["ts"]) ts.push_back(t.get<double>());
    if (s["include_infinity"].get<bool>()) ts.push_back(determinants::kInfiniteT);
    determinants::QuadratureConfig quad;
    quad.points = s["quad_points"].get<int>();
    quad.monte_carlo = s["monte_carlo"].get<bool>();
    quad.samples = s["samples"].get<int>();
    quad.seed = c["seed"].get<std::uint64_t>();
    const double p = c["p"].get<double>(), q = c["q"].get<double>();
    const auto b = determinants::bound_estimate(map, g, p, q, ms, ts, quad, s["sup_points"].get<int>());
    const double tol = s["monotonicity_tol"].get<double>();

    CsvTable rt{{"m", "rho_root"}, {}};
    json roots = json::array();
    for (std::size_t k = 0; k < b.ms.size(); ++k) {
        rt.add({i(b.ms[k]), f(b.rho_roots[k])});
        roots.push_back({{"m", b.ms[k]}, {"rho_root", b.rho_roots[k]}});
    }
    CsvTable Rt{{"t", "R", "cauchy", "rho_le_R"}, {}};
    json rs = json::array();
    bool monotone = true;
    for (std::size_t k = 0; k < b.ts.size(); ++k) {
        const bool ok = b.rho.value <= b.R[k].value + tol;
        monotone = monotone && ok;
        const json t = std::isinf(b.ts[k]) ? json("inf") : json(b.ts[k]);
        rs.push_back({{"t", t}, {"value", b.R[k].value}, {"cauchy", b.R[k].cauchy}, {"rho_le_R", ok}});
        Rt.add({std::isinf(b.ts[k]) ? std::string("inf") : f(b.ts[k]), f(b.R[k].value), f(b.R[k].cauchy),
                ok ? "1" : "0"});
    }
    out.tables["rho"] = rt;
    out.tables["R"] = Rt;
    out.results = {{"map", map.describe()},
                   {"weight", g.describe()},
                   {"rho_roots", roots},
                   {"rho", {{"value", b.rho.value}, {"cauchy", b.rho.cauchy}}},
                   {"R", rs},
                   {"monotone", monotone}};
    return out;
}

ExperimentResult run_kernel_check(const json& c) {
    ExperimentResult out;
    const json& b = c["branch"];
    const json& a = c["amplitude"];
    const json& k = c["kernel"];
    const double cc = b["c"].get<double>();
    const auto branch = b["type"] == "scaling" ? dynamics::LocalBranch::scaling(cc)
                                               : dynamics::LocalBranch::perturbed_scaling(cc, b["a"].get<double>());
    const auto gamma = a["type"] == "bump" ? kernels::bump_amplitude() : kernels::power_bump_amplitude(a["a"].get<double>());
    const int max_index = k["max_index"].get<int>();
    const auto rel = transfer::make_linkage(branch, std::nullopt, max_index);
    const auto xs = kernels::line_points(k["grid_lo"].get<double>(), k["grid_hi"].get<double>(), k["grid_points"].get<int>());
    kernels::EnvelopeProfile profile;
    profile.choice = k["envelope"] == "expanding" ? kernels::EnvelopeChoice::expanding : kernels::EnvelopeChoice::appendix;
    profile.r = k["r_test"].get<int>();
    kernels::KernelQuadrature quad;
    quad.factor = k["factor"].get<int>();
    quad.max_factor = k["max_factor"].get<int>();
    quad.rel_tol = k["rel_tol"].get<double>();
    quad.box = k["box"].get<double>();
    const auto bc = kernels::kernel_bound_check(branch, gamma, rel, max_index, profile, xs, xs, quad);

    CsvTable t{{"n", "ell", "sigma", "tau", "sup_abs_V", "envelope_const", "slope_window"}, {}};
    json pairs = json::array();
    for (const auto& p : bc.pairs) {
        const bool window = std::max(p.n, p.ell) >= bc.slope_from;
        t.add({i(p.n), i(p.ell), "", "", f(p.sup_abs_v), f(p.constant), window ? "1" : "0"});
        pairs.push_back({{"n", p.n}, {"ell", p.ell}, {"sup_abs_V", p.sup_abs_v}, {"constant", p.constant},
                         {"argmax_x", p.argmax_x[0]}, {"argmax_y", p.argmax_y[0]}});
    }
    out.tables["kernel_pairs"] = t;
    const double target = -(profile.r - 1) * std::log(2.0) + 0.1;
    const double limit = k["spread_limit"].get<double>();
    out.results = {{"branch", branch.label},
                   {"t_plus", rel.t_plus},
                   {"n_threshold", rel.n_threshold},
                   {"pairs", pairs},
                   {"c_max", bc.c_max},
                   {"c_min", bc.c_min},
                   {"spread", bc.spread},
                   {"slope", bc.slope},
                   {"slope_from", bc.slope_from},
                   {"slope_points", bc.slope_points},
                   {"slope_target", target},
                   {"spread_ok", std::isfinite(bc.spread) && bc.spread < limit},
                   {"slope_ok", bc.slope <= target},
                   {"note", bc.note}};
    return out;
}

std::string find_config(const std::string& path) {
    namespace fs = std::filesystem;
    if (fs::exists(path)) return path;
    const fs::path bundled = fs::path(RLAB_CONFIG_DIR) / path;
    if (!std::string(RLAB_CONFIG_DIR).empty() && fs::exists(bundled)) return bundled.string();
    throw ValidationError("config file not found: " + path);
}

}  // namespace

ExperimentResult run_experiment(const ResolvedConfig& cfg) {
    const json& c = cfg.config;
    if (cfg.kind == "norms") return run_norms(c);
    if (cfg.kind == "resonances") return run_resonances(c);
    if (cfg.kind == "determinant") return run_determinant(c, false);
    if (cfg.kind == "zero-eigen-compare") return run_determinant(c, true);
    if (cfg.kind == "bounds") return run_bounds(c);
    if (cfg.kind == "kernel-check") return run_kernel_check(c);
    throw ValidationError("unknown experiment kind '" + cfg.kind + "'");
}

std::string summary_text(const ResolvedConfig& cfg, const ExperimentResult& r) {
    json s = {{"format", "rlab-summary/1"},
              {"kind", cfg.kind},
              {"config", cfg.config},
              {"config_hash", cfg.hash},
              {"results", r.results}};
    return dump_json(s);
}

void write_reports(const ResolvedConfig& cfg, const ExperimentResult& r, double wall_seconds) {
    const std::filesystem::path dir(cfg.output_dir);
    write_text((dir / "summary.json").string(), summary_text(cfg, r));
    for (const auto& [stem, table] : r.tables) {
        write_csv((dir / (stem + ".csv")).string(), table, cfg.hash);
        write_plot_table((dir / (stem + ".dat")).string(), table, cfg.hash);
    }
    json info = {{"config_hash", cfg.hash},
                 {"threads", thread_count()},
                 {"wall_seconds", wall_seconds},
                 {"files", json::array()}};
    info["files"].push_back("summary.json");
    for (const auto& [stem, table] : r.tables) {
        info["files"].push_back(stem + ".csv");
        info["files"].push_back(stem + ".dat");
    }
    write_text((dir / "run_info.json").string(), dump_json(info));
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Transfer operator, determinant and kernel experiments", "rlab"};
    app.require_subcommand(1);
    std::string config_path, out_dir, kind;
    long long seed = -1;
    int threads = 0;
    auto* run = app.add_subcommand("run", "run the experiment described by a config file");
    run->add_option("--config", config_path, "TOML or JSON config (bundled names are also found)")->required();
    run->add_option("--out", out_dir, "output directory (overrides the config)");
    run->add_option("--seed", seed, "random seed (overrides the config)")->check(CLI::NonNegativeNumber);
    run->add_option("--threads", threads, "worker threads (overrides RLAB_THREADS)")->check(CLI::PositiveNumber);
    auto* list = app.add_subcommand("list", "list experiment kinds");
    auto* schema = app.add_subcommand("schema", "print the config schema of a kind");
    schema->add_option("kind", kind, "experiment kind")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    std::string stage = "config";
    std::optional<ResolvedConfig> resolved;
    try {
        if (list->parsed()) {
            for (const auto& k : experiment_kinds()) out << k.name << "\t" << k.doc << "\n";
            return 0;
        }
        if (schema->parsed()) {
            out << dump_json(schema_for(kind));
            return 0;
        }
        if (threads > 0) set_thread_count(threads);
        auto cfg = resolve_config(load_config_file(find_config(config_path)),
                                  seed >= 0 ? std::optional<long long>(seed) : std::nullopt);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        resolved = cfg;
        stage = "run";
        const auto t0 = std::chrono::steady_clock::now();
        const auto result = run_experiment(cfg);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        write_reports(cfg, result, wall);
        out << cfg.kind << " " << cfg.hash << " -> " << cfg.output_dir << "\n";
        return 0;
    } catch (const ValidationError& e) {
        err << "rlab: invalid input (" << stage << "): " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        err << "rlab: numerical failure: " << e.what() << "\n";
        if (resolved) {
            json d = {{"status", 3}, {"error", e.what()}, {"kind", resolved->kind}, {"config_hash", resolved->hash}};
            try {
                write_text((std::filesystem::path(resolved->output_dir) / "diagnostics.json").string(), dump_json(d));
            } catch (const std::exception&) {
            }
        }
        return 3;
    }
}

}  // namespace rlab::cli
