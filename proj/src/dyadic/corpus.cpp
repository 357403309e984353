#include "rlab/dyadic/corpus.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "rlab/common/errors.hpp"
#include "rlab/common/parallel.hpp"
#include "rlab/dyadic/decomposition.hpp"

namespace rlab::dyadic {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

GridFunction band_limit(const GridFunction& u, double kmax) {
    return apply_multiplier(u, [kmax](const Freq& f) { return cplx(chi(std::abs(f[0]) / kmax + 1.0)); });
}

}  // namespace

std::vector<CorpusEntry> norm_corpus(int n, std::uint64_t seed) {
    const int top = n_max_for(n);
    require(top >= 4, "norm corpus needs n_max >= 4 (N >= 64)");
    const double kmax = std::ldexp(1.0, top - 1);
    std::vector<CorpusEntry> out;
    auto add = [&](std::string name, const std::function<cplx(double, double)>& f) {
        out.push_back({std::move(name), band_limit(GridFunction::from_function(1, n, f), kmax)});
    };

    for (int k : {1, 3, 7, 12, 20}) {
        if (k >= kmax) k = static_cast<int>(kmax) - 1;
        add("mode_" + std::to_string(k), [k](double x, double) { return std::polar(1.0, kTwoPi * k * x); });
    }
    add("beat_5_6", [](double x, double) { return cplx(std::cos(kTwoPi * 5 * x) + std::cos(kTwoPi * 6 * x)); });
    add("beat_2_15", [](double x, double) { return cplx(std::cos(kTwoPi * 2 * x) + 0.3 * std::sin(kTwoPi * 15 * x)); });
    for (double w : {0.2, 0.1, 0.05, 0.03}) {
        add("gauss_" + std::to_string(w).substr(0, 4), [w](double x, double) {
            const double d = x - 0.5;
            return cplx(std::exp(-d * d / (2.0 * w * w)));
        });
    }
    add("lacunary_0.5", [kmax](double x, double) {
        cplx s = 0.0;
        for (int j = 0; (1 << j) < kmax; ++j) s += std::exp2(-0.5 * j) * std::cos(kTwoPi * (1 << j) * x);
        return s;
    });
    add("lacunary_1.0", [kmax](double x, double) {
        cplx s = 0.0;
        for (int j = 0; (1 << j) < kmax; ++j) s += std::exp2(-1.0 * j) * std::sin(kTwoPi * (1 << j) * x);
        return s;
    });
    add("tent_smoothed", [](double x, double) { return cplx(std::max(0.0, 0.25 - std::abs(x - 0.5))); });
    add("sqrt_cusp", [](double x, double) { return cplx(std::sqrt(std::abs(std::sin(std::numbers::pi * x)))); });

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    const int slots = n;
    for (int r = 0; out.size() < 20; ++r) {
        // Random coefficients with power decay |k|^{-decay}.
        const double decay = 0.5 + 0.5 * (r % 3);
        std::vector<cplx> spec(slots, cplx{});
        for (int k = -static_cast<int>(kmax); k <= static_cast<int>(kmax); ++k) {
            const double amp = std::pow(std::max(1, std::abs(k)), -decay);
            spec[(k + slots) % slots] = amp * cplx(g(rng), g(rng));
        }
        out.push_back({"random_" + std::to_string(r), band_limit(GridFunction::from_spectrum(1, n, spec), kmax)});
    }
    return out;
}

std::vector<NormRatio> norm_ratios(const std::vector<CorpusEntry>& corpus, const std::vector<double>& ps) {
    std::vector<NormRatio> out(corpus.size() * ps.size());
    parallel_for(out.size(), [&](std::size_t i) {
        const auto& e = corpus[i / ps.size()];
        const double p = ps[i % ps.size()];
        NormRatio r{e.name, p, classical_holder_norm(e.u, p), holder_norm_star(e.u, p).value, 0.0};
        r.ratio = r.star > 0.0 ? r.classical / r.star : 0.0;
        out[i] = r;
    });
    return out;
}

}  // namespace rlab::dyadic
