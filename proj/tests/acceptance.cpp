// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "rlab/cli/config.hpp"
#include "rlab/cli/experiments.hpp"
#include "rlab/common/errors.hpp"
#include "rlab/common/parallel.hpp"
#include "rlab/determinants/bounds.hpp"
#include "rlab/determinants/matching.hpp"
#include "rlab/dyadic/corpus.hpp"
#include "rlab/dyadic/decomposition.hpp"
#include "rlab/kernels/ibp.hpp"
#include "rlab/kernels/kernel.hpp"
#include "rlab/transfer/resonances.hpp"
#include "rlab/transfer/splitting.hpp"

using namespace rlab;
using dynamics::cplx;
using dynamics::MapModel;
using dynamics::Vec2;
using dynamics::Weight;

namespace {

const double kLam = (3.0 + std::sqrt(5.0)) / 2.0;
const double kDeg = std::numbers::pi / 180.0;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

MapModel doubling(double eps = 0.0) { return MapModel::expanding_circle(2, eps); }
MapModel cat() { return MapModel::linear_toral(MapModel::cat_matrix()); }

dyadic::ConeSystem cat_cones() {
    dyadic::ConeSystem c;
    c.plus = {std::atan(-(1.0 + std::sqrt(5.0)) / 2.0), 20 * kDeg};
    c.minus = {std::atan((std::sqrt(5.0) - 1.0) / 2.0), 25 * kDeg};
    return c;
}

double max_rel_trace_error(const MapModel& map, const Weight& g, int count, double expect_base) {
    double worst = 0.0;
    for (int m = 1; m <= count; ++m) {
        const double want = std::pow(expect_base, m);
        worst = std::max(worst, std::abs(determinants::trace_sum(map, g, m) - want) / want);
    }
    return worst;
}

// a_1 against `a1` and max |a_m| over 2 <= m <= 14.
std::pair<double, double> linear_determinant(const determinants::DeterminantSeries& s, double a1) {
    double tail = 0.0;
    for (std::size_t m = 2; m < s.coeffs.size(); ++m) tail = std::max(tail, std::abs(s.coeffs[m]));
    return {std::abs(s.coeffs[1] - a1), tail};
}

void criterion1(Outcome& o) {
    const auto g = Weight::constant(0.5);
    const double err = max_rel_trace_error(doubling(), g, 14, 1.0);
    const auto [a1, tail] = linear_determinant(determinants::determinant_series(doubling(), g, 14), -1.0);
    o.detail << "max rel |t_m - 1| = " << err << ", |a_1 + 1| = " << a1 << ", max |a_m| (m >= 2) = " << tail;
    o.check(err < 1e-12, "trace error");
    o.check(a1 < 1e-10 && tail < 1e-10, "d(z) = 1 - z");
}

void criterion2(Outcome& o) {
    const auto g = Weight::constant(1.0);
    const double err = max_rel_trace_error(doubling(), g, 14, 2.0);
    const auto s = determinants::determinant_series(doubling(), g, 14);
    const auto [a1, tail] = linear_determinant(s, -2.0);
    const auto zeros = determinants::determinant_zeros(s);
    const auto m = transfer::assemble_expanding(doubling(), g, 32);
    const cplx lead = transfer::eigenvalues(m).front();
    double dist = 1.0;
    if (zeros.zeros.size() == 1) dist = std::abs(1.0 / zeros.zeros[0].z - lead);
    o.detail << "max rel |t_m - 2^m| / 2^m = " << err << ", |a_1 + 2| = " << a1 << ", max |a_m| = " << tail
             << ", |1/z - lambda_1| = " << dist;
    o.check(err < 1e-12, "trace error");
    o.check(a1 < 1e-10 && tail < 1e-10, "d(z) = 1 - 2z");
    o.check(zeros.zeros.size() == 1 && dist < 1e-8, "reciprocal zero vs leading eigenvalue");
}

long long det_am_minus_i(int m) {
    long long a = 1, b = 0, c = 0, d = 1;  // A^m
    for (int i = 0; i < m; ++i) {
        const long long na = 2 * a + c, nb = 2 * b + d, nc = a + c, nd = b + d;
        a = na, b = nb, c = nc, d = nd;
    }
    return std::llabs((a - 1) * (d - 1) - b * c);
}

void criterion3(Outcome& o) {
    const auto g = Weight::constant(1.0);
    bool traces = true, counts = true;
    for (int m = 1; m <= 12; ++m) {
        traces = traces && determinants::trace_sum(cat(), g, m) == cplx(1.0);
        const long long expect = det_am_minus_i(m);
        counts = counts && determinants::periodic_count(cat(), m) == expect &&
                 static_cast<long long>(determinants::periodic_points(cat(), m).points.size()) == expect;
    }
    const auto [a1, tail] = linear_determinant(determinants::determinant_series(cat(), g, 12), -1.0);
    transfer::ResonanceConfig cfg;
    cfg.n_f = 6;
    cfg.p = 1.0;
    cfg.q = -1.0;
    cfg.cones = cat_cones();
    const auto rep = transfer::resonances(cat(), g, cfg);
    const bool only_one = rep.accepted.size() == 1 && std::abs(rep.accepted[0].value - 1.0) < 1e-10;
    o.detail << "t_m == 1 exactly: " << traces << ", counts = |det(A^m - I)|: " << counts << ", |a_1 + 1| = " << a1
             << ", max |a_m| = " << tail << ", filter = " << rep.filter << ", accepted = " << rep.accepted.size();
    o.check(traces, "exact traces");
    o.check(counts, "periodic point counts");
    o.check(a1 < 1e-10 && tail < 1e-10, "d(z) = 1 - z");
    o.check(std::abs(rep.filter - 1.0 / kLam) < 1e-6, "filter lambda^{-1}");
    o.check(only_one, "accepted set {1}");
}

void criterion4(Outcome& o) {
    const auto map = doubling(0.02);
    const auto g = Weight::inverse_derivative();
    const auto series = determinants::determinant_series(map, g, 12);
    for (int nf : {128, 256}) {
        transfer::ResonanceConfig cfg;
        cfg.n_f = nf;
        cfg.p = 8.0;
        const auto rep = transfer::resonances(map, g, cfg);
        const double radius = std::min(series.reliability_radius, 1.0 / (rep.filter + rep.margin));
        const auto t = determinants::compare_zeros_eigenvalues(rep, series, radius, 1e-5);
        o.detail << "N_f = " << nf << ": " << t.pairs.size() << " pairs, max distance " << t.max_distance
                 << ", unmatched " << t.unmatched_zeros.size() << "/" << t.unmatched_resonances.size() << "; ";
        o.check(t.perfect() && !t.pairs.empty() && t.max_distance < 1e-5, "bijection at N_f = " + std::to_string(nf));
    }
}

void criterion5(Outcome& o) {
    const auto g = Weight::constant(1.0);
    double worst = 0.0;
    for (int m = 1; m <= 8; ++m) {
        const double root = std::pow(determinants::rho_pqm(cat(), g, 1, -1, m).value, 1.0 / m);
        worst = std::max(worst, std::abs(root - 1.0 / kLam));
    }
    const std::vector<int> ms{1, 2, 3, 4, 5, 6, 7, 8};
    const auto b = determinants::bound_estimate(cat(), g, 1, -1, ms, {2.0, 4.0, determinants::kInfiniteT});
    const double r_inf = std::abs(b.R.back().value - 1.0 / kLam);
    bool monotone = true;
    for (const auto& r : b.R) monotone = monotone && b.rho.value <= r.value + 1e-6;
    const auto pert = determinants::bound_estimate(MapModel::perturbed_toral(MapModel::cat_matrix(), 0.01), g, 1, -1,
                                                   ms, {});
    o.detail << "max |rho^{1/m} - 1/lambda| = " << worst << ", |R^inf - 1/lambda| = " << r_inf
             << ", rho <= R(t): " << monotone << ", perturbed Cauchy = " << pert.rho.cauchy;
    o.check(worst < 1e-10, "rho roots");
    o.check(r_inf < 1e-10, "R^{p,q,inf}");
    o.check(monotone, "monotonicity");
    o.check(pert.rho.cauchy < 1e-2, "Cauchy diagnostic");
}

void criterion6(Outcome& o) {
    const auto samples = transfer::localized_samples(2048, 8.0, 12, 2024);
    const auto gamma = Weight::custom([](const Vec2& x) { return cplx(std::exp(-x[0] * x[0] / 0.5)); }, "gaussian");
    for (double p : {0.5, 1.5}) {
        const auto r = transfer::measure_L0_bound({0.5, 1.0 / 3.0, 0.25}, gamma, p, samples);
        o.detail << "p = " << p << ": slope " << r.slope << "; ";
        o.check(!r.degenerate && std::abs(r.slope - p) <= 0.15, "slope for p = " + std::to_string(p));
    }
}

void criterion7(Outcome& o) {
    const auto branch = dynamics::LocalBranch::perturbed_scaling(0.5, 0.01);
    const auto rel = transfer::make_linkage(branch, std::nullopt, 9);
    const auto xs = kernels::line_points(-1.0, 1.0, 9);
    kernels::EnvelopeProfile profile;  // expanding, r = 3
    const auto b = kernels::kernel_bound_check(branch, kernels::bump_amplitude(), rel, 9, profile, xs, xs);
    const double target = -(profile.r - 1) * std::log(2.0) + 0.1;
    o.detail << b.pairs.size() << " non-linked pairs, spread " << b.spread << " (limit 50), slope " << b.slope
             << " (target <= " << target << ")";
    o.check(std::isfinite(b.spread) && b.spread < 50.0, "constant spread");
    o.check(b.slope <= target, "log-slope");
}

cplx root_amplitude(double w) {
    const double t = std::abs(w);
    return std::sqrt(t) * (t <= 1.0 ? 1.0 : dyadic::chi(1.0 + (t - 1.0) / 3.0));
}

kernels::Oscillatory1D root_problem() {
    return {[](double w) { return w + w * w / 32.0; }, [](double w) { return 1.0 + w / 16.0; }, root_amplitude, -4.0, 4.0};
}

void criterion8(Outcome& o) {
    double worst = 0.0;
    for (double lambda : {4.0, 16.0, 64.0})
        for (double c : {0.5, 1.0, 2.0})
            worst = std::max(worst, kernels::regularized_ibp(root_problem(), {lambda, c / lambda}).residual);
    std::vector<double> es, err, der;
    for (double e : {0.25, 1.0 / 16.0, 1.0 / 64.0}) {
        const auto r = kernels::regularized_ibp(root_problem(), {16.0, e, 0.5});
        es.push_back(e);
        err.push_back(r.mollify_error);
        der.push_back(r.mollified_derivative);
    }
    const double s_err = kernels::loglog_slope(es, err), s_der = kernels::loglog_slope(es, der);
    o.detail << "max residual " << worst << ", slopes " << s_err << " (want 0.5) and " << s_der << " (want -0.5)";
    o.check(worst < 1e-7, "residual");
    o.check(std::abs(s_err - 0.5) <= 0.1 && std::abs(s_der + 0.5) <= 0.1, "mollification exponents");
}

void criterion9(Outcome& o) {
    // Partition of unity, support and almost orthogonality on every lattice frequency of a 256 grid (1D)
    // and a 128^2 grid with cones (2D).
    double pou = 0.0;
    long long bad = 0;
    const int n1 = 256, top1 = dyadic::n_max_for(n1);
    for (int k = -n1 / 2; k < n1 / 2; ++k) {
        double s = 0.0;
        for (int m = 0; m <= top1; ++m) {
            const double v = dyadic::psi_n(m, std::abs(k));
            s += v;
            if (m >= 1 && (std::abs(k) < std::ldexp(1.0, m - 1) || std::abs(k) > std::ldexp(1.0, m + 1)) && v != 0.0) ++bad;
            for (int l = m + 5; l <= top1; ++l)
                if (v * dyadic::psi_n(l, std::abs(k)) != 0.0) ++bad;
        }
        if (std::abs(k) <= std::ldexp(1.0, top1)) pou = std::max(pou, std::abs(s - 1.0));
    }
    const auto cones = cat_cones();
    const int n2 = 128, top2 = dyadic::n_max_for(n2);
    for (int a = -n2 / 2; a < n2 / 2; ++a)
        for (int b = -n2 / 2; b < n2 / 2; ++b) {
            if (std::hypot(a, b) > std::ldexp(1.0, top2)) continue;
            double s = 0.0;
            for (int m = 0; m <= top2; ++m)
                for (auto sg : {dyadic::Sign::plus, dyadic::Sign::minus})
                    s += dyadic::psi_n_sigma(m, sg, {double(a), double(b)}, cones);
            pou = std::max(pou, std::abs(s - 1.0));
        }
    const auto ratios = dyadic::norm_ratios(dyadic::norm_corpus(256, 2024), {0.3, 0.5, 0.7});
    double lo = 1e300, hi = 0.0;
    for (const auto& r : ratios) {
        lo = std::min(lo, r.ratio);
        hi = std::max(hi, r.ratio);
    }
    o.detail << "partition of unity max error " << pou << ", support/orthogonality violations " << bad
             << ", norm ratio range [" << lo << ", " << hi << "] over " << ratios.size() / 3 << " functions";
    o.check(pou < 1e-12 && bad == 0, "grid invariants");
    o.check(ratios.size() == 60 && lo >= 0.1 && hi <= 10.0, "norm ratios");
}

void criterion10(Outcome& o) {
    const int saved = thread_count();
    for (const char* name : {"doubling_halfweight.toml", "doubling_unitweight.toml", "cat_unitweight.toml",
                             "perturbed_doubling_compare.toml", "cat_bounds.toml", "kernel_decay.toml",
                             "norm_corpus.json"}) {
        const auto cfg = cli::resolve_config(cli::load_config_file(std::string(RLAB_SOURCE_DIR) + "/configs/" + name));
        std::string first;
        bool same = true;
        for (int t : {1, 2, 4}) {
            set_thread_count(t);
            const std::string s = cli::summary_text(cfg, cli::run_experiment(cfg));
            if (first.empty()) first = s;
            same = same && s == first;
        }
        o.detail << name << (same ? " identical; " : " DIFFERS; ");
        o.check(same, name);
    }
    set_thread_count(saved);
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* title;
        double limit;  // seconds, 0 = none
        std::function<void(Outcome&)> run;
    };
    const Criterion all[] = {
        {1, "doubling map, g = 1/2: traces and d(z) = 1 - z", 10, criterion1},
        {2, "doubling map, g = 1: d(z) = 1 - 2z and the leading eigenvalue", 0, criterion2},
        {3, "cat map, g = 1: exact traces, counts, d(z), accepted {1}", 30, criterion3},
        {4, "perturbed doubling: zero/eigenvalue bijection at N_f 128 and 256", 60, criterion4},
        {5, "cat map bound quantities and perturbed Cauchy diagnostic", 0, criterion5},
        {6, "essential-radius exponent law", 120, criterion6},
        {7, "kernel decay: constant spread and log-slope", 300, criterion7},
        {8, "regularised IBP identity and mollification exponents", 0, criterion8},
        {9, "norm machinery invariants and norm equivalence", 0, criterion9},
        {10, "thread-count invariance of summaries", 0, criterion10},
    };
    int failures = 0;
    for (const auto& c : all) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.limit > 0 && secs >= c.limit) o.check(false, "time limit " + std::to_string(c.limit) + " s");
        failures += !o.pass;
        std::printf("criterion %2d %s (%.1f s) %s: %s\n", c.id, o.pass ? "PASS" : "FAIL", secs, c.title,
                    o.detail.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%d of 10 criteria passed\n", 10 - failures);
    return failures == 0 ? 0 : 1;
}
