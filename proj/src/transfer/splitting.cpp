#include "rlab/transfer/splitting.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "rlab/common/errors.hpp"
#include "rlab/common/parallel.hpp"

namespace rlab::transfer {

namespace {

using dyadic::Freq;
using dynamics::Vec2;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Largest |k| (per axis) carrying a coefficient above 1e-14 of the largest one;
// the discarded tail is FFT rounding.
int band_of(const GridFunction& u, const std::vector<cplx>& spec) {
    double peak = 0.0;
    for (const auto& c : spec) peak = std::max(peak, std::abs(c));
    if (peak == 0.0) return 0;
    const int n = u.size();
    int band = 0;
    for (std::size_t idx = 0; idx < spec.size(); ++idx) {
        if (std::abs(spec[idx]) <= 1e-14 * peak) continue;
        int j1 = u.dim() == 1 ? static_cast<int>(idx) : static_cast<int>(idx / n);
        int j2 = u.dim() == 1 ? 0 : static_cast<int>(idx % n);
        band = std::max(band, std::abs(GridFunction::signed_index(j1, n)));
        if (u.dim() == 2) band = std::max(band, std::abs(GridFunction::signed_index(j2, n)));
    }
    return std::min(band, n / 2);
}

// Plain product; std::complex operator* carries inf/nan recovery that
// dominates these inner loops.
inline cplx mul(const cplx& a, const cplx& b) {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

// omega^k for k = -band..band, re-anchored every 32 steps.
void power_table(double y, double period, int band, std::vector<cplx>& out) {
    out.resize(2 * band + 1);
    const cplx step = std::polar(1.0, kTwoPi * y / period);
    for (int k = -band; k <= band; ++k) {
        if ((k + band) % 32 == 0) out[k + band] = std::polar(1.0, kTwoPi * k * y / period);
        else out[k + band] = mul(out[k + band - 1], step);
    }
}

// Symmetric index set: the Nyquist slot is shared evenly between +-N/2.
cplx coefficient_of(const std::vector<cplx>& spec, int n, int dim, int k1, int k2) {
    auto slot = [n](int k) { return ((k % n) + n) % n; };
    double f = 1.0;
    if (2 * std::abs(k1) == n) f *= 0.5;
    if (dim == 2 && 2 * std::abs(k2) == n) f *= 0.5;
    std::size_t idx = dim == 1 ? slot(k1) : static_cast<std::size_t>(slot(k1)) * n + slot(k2);
    return f * spec[idx];
}

double representative(double x, double period) { return x < 0.5 * period ? x : x - period; }

// u o T on the grid, from the Fourier series of u.
GridFunction compose(const LocalBranch& t, const GridFunction& u) {
    require(t.dim == u.dim(), "branch and function dimensions differ");
    const int n = u.size();
    const double per = u.period();
    GridFunction out(u.dim(), n, per);

    if (t.integer_linear && u.dim() == 2 && per == 1.0) {
        // Exact lattice action: e_k o A = e_{A^tr k}.
        auto spec = u.spectrum();
        std::vector<cplx> img(spec.size());
        const auto& a = *t.integer_linear;
        for (int j1 = 0; j1 < n; ++j1)
            for (int j2 = 0; j2 < n; ++j2) {
                cplx c = spec[static_cast<std::size_t>(j1) * n + j2];
                if (c == cplx{}) continue;
                long long k1 = GridFunction::signed_index(j1, n), k2 = GridFunction::signed_index(j2, n);
                long long m1 = a(0, 0) * k1 + a(1, 0) * k2, m2 = a(0, 1) * k1 + a(1, 1) * k2;
                if (std::abs(c) > 1e-14 && (m1 < -n / 2 || m1 >= n / 2 || m2 < -n / 2 || m2 >= n / 2))
                    throw ValidationError("composed spectrum leaves the grid; refine or lower the band");
                if (m1 < -n / 2 || m1 >= n / 2 || m2 < -n / 2 || m2 >= n / 2) continue;
                auto s1 = static_cast<int>((m1 + n) % n), s2 = static_cast<int>((m2 + n) % n);
                img[static_cast<std::size_t>(s1) * n + s2] += c;
            }
        return GridFunction::from_spectrum(2, n, std::move(img), per);
    }

    auto spec = u.spectrum();
    const int band = band_of(u, spec);
    if (u.dim() == 1) {
        std::vector<cplx> coef(2 * band + 1);
        for (int k = -band; k <= band; ++k) coef[k + band] = coefficient_of(spec, n, 1, k, 0);
        parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
            double x = representative(per * static_cast<double>(i) / n, per);
            double y = t.eval(Vec2(x, 0.0))[0];
            thread_local std::vector<cplx> pw;
            power_table(y, per, band, pw);
            cplx s{};
            for (int k = 0; k <= 2 * band; ++k) s += mul(coef[k], pw[k]);
            out.at(static_cast<int>(i)) = s;
        });
        return out;
    }
    const int w = 2 * band + 1;
    std::vector<cplx> coef(static_cast<std::size_t>(w) * w);
    for (int k1 = -band; k1 <= band; ++k1)
        for (int k2 = -band; k2 <= band; ++k2)
            coef[static_cast<std::size_t>(k1 + band) * w + (k2 + band)] = coefficient_of(spec, n, 2, k1, k2);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
        thread_local std::vector<cplx> p1, p2;
        for (int j = 0; j < n; ++j) {
            Vec2 x(representative(per * static_cast<double>(i) / n, per), representative(per * j / n, per));
            Vec2 y = t.eval(x);
            power_table(y[0], per, band, p1);
            power_table(y[1], per, band, p2);
            cplx s{};
            for (int a = 0; a < w; ++a) {
                cplx row{};
                for (int b = 0; b < w; ++b) row += mul(coef[static_cast<std::size_t>(a) * w + b], p2[b]);
                s += mul(row, p1[a]);
            }
            out.at(static_cast<int>(i), j) = s;
        }
    });
    return out;
}

void multiply_weight(GridFunction& f, const Weight& gamma) {
    const int n = f.size();
    const double per = f.period();
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
        double x0 = representative(per * static_cast<double>(i) / n, per);
        if (f.dim() == 1) {
            f.at(static_cast<int>(i)) *= gamma.local(Vec2(x0, 0.0), 1);
            return;
        }
        for (int j = 0; j < n; ++j) f.at(static_cast<int>(i), j) *= gamma.local(Vec2(x0, representative(per * j / n, per)), 2);
    });
}

// Piece index: one per dyadic level (isotropic) or per (level, sign).
struct Piece {
    int level;
    std::optional<dyadic::Sign> sign;
};

}  // namespace

GridFunction apply_local(const LocalBranch& t, const Weight& gamma, const GridFunction& u) {
    if (gamma.is_zero()) return GridFunction(u.dim(), u.size(), u.period());
    GridFunction f = compose(t, u);
    multiply_weight(f, gamma);
    return f;
}

SplitResult split_L0_L1(const LocalBranch& t, const Weight& gamma, const GridFunction& u,
                        const LinkageRelation& rel, const std::optional<dyadic::ConeSystem>& cones,
                        bool keep_blocks) {
    const bool aniso = rel.kind == RuleKind::hyperbolic;
    require(!aniso || (cones && u.dim() == 2), "hyperbolic linkage needs a cone system and d = 2");
    if (cones) cones->validate();

    SplitResult res;
    const int d = u.dim(), n = u.size();
    const double per = u.period();
    res.direct = apply_local(t, gamma, u);
    res.l0 = GridFunction(d, n, per);
    res.l1 = GridFunction(d, n, per);

    auto dec = dyadic::dyadic_blocks(u, aniso ? cones : std::nullopt);
    res.n_max = dec.n_max;
    if (dec.truncation_warning) res.truncation_warning = true;

    std::vector<Piece> pieces;
    for (int lev = 0; lev <= dec.n_max; ++lev) {
        if (aniso) {
            pieces.push_back({lev, dyadic::Sign::plus});
            pieces.push_back({lev, dyadic::Sign::minus});
        } else {
            pieces.push_back({lev, std::nullopt});
        }
    }
    auto block_of = [&](const Piece& pc) -> const GridFunction& {
        return aniso ? dec.sigma_blocks[pc.level][*pc.sign == dyadic::Sign::plus ? 0 : 1] : dec.blocks[pc.level];
    };

    // Spectra of L u_{l,tau} (linked use) and L psi~_{l,tau}(D) u_{l,tau} (non-linked use).
    std::vector<std::vector<cplx>> lin(pieces.size()), tld(pieces.size());
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const auto& pc = pieces[i];
        const GridFunction& ub = block_of(pc);
        lin[i] = apply_local(t, gamma, ub).spectrum();
        dyadic::Symbol widen = [&](const Freq& xi) -> cplx {
            return aniso ? dyadic::psi_tilde_sigma(pc.level, *pc.sign, xi, *cones)
                         : dyadic::psi_tilde(pc.level, xi, d);
        };
        tld[i] = apply_local(t, gamma, dyadic::apply_multiplier(ub, widen)).spectrum();
    }

    if (keep_blocks) {
        res.l0_blocks.assign(dec.n_max + 1, {GridFunction(d, n, per), GridFunction(d, n, per)});
        res.l1_blocks = res.l0_blocks;
    }
    const std::size_t len = res.direct.count();
    for (const auto& out : pieces) {
        std::vector<cplx> s0(len), s1(len);
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            const auto& src = pieces[i];
            bool linked = rel.linked(src.level, out.level, src.sign, out.sign);
            auto& acc = linked ? s0 : s1;
            const auto& sp = linked ? lin[i] : tld[i];
            for (std::size_t k = 0; k < len; ++k) acc[k] += sp[k];
        }
        dyadic::Symbol post = [&](const Freq& xi) -> cplx {
            return aniso ? dyadic::psi_check_sigma(out.level, *out.sign, xi, *cones) : dyadic::psi_n(out.level, xi, d);
        };
        GridFunction b0 = dyadic::apply_multiplier_spectrum(res.direct, s0, post);
        GridFunction b1 = dyadic::apply_multiplier_spectrum(res.direct, s1, post);
        res.l0 += b0;
        res.l1 += b1;
        if (keep_blocks) {
            int slot = out.sign && *out.sign == dyadic::Sign::minus ? 1 : 0;
            res.l0_blocks[out.level][slot] = std::move(b0);
            res.l1_blocks[out.level][slot] = std::move(b1);
        }
    }

    res.identity_error = (res.l0 + res.l1 - res.direct).sup_norm();
    res.high_band_mass = dyadic::high_band_mass(res.direct);
    if (res.high_band_mass > dyadic::kTruncationMassLimit) res.truncation_warning = true;
    return res;
}

std::vector<GridFunction> localized_samples(int n, double period, int count, std::uint64_t seed, double envelope) {
    require(count >= 1 && envelope > 0.0, "bad sample parameters");
    const int top = dyadic::n_max_for(n, period) - 1;
    require(top >= 1, "grid too coarse for sample functions");
    const double cut = std::ldexp(1.0, top);
    const int kmax = static_cast<int>(cut * period);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<GridFunction> out;
    for (int i = 0; i < count; ++i) {
        std::vector<cplx> spec(n);
        for (int k = -kmax; k <= kmax; ++k) spec[(k + n) % n] = {g(rng), g(rng)};
        auto w = GridFunction::from_spectrum(1, n, std::move(spec), period);
        for (int j = 0; j < n; ++j) {
            double x = representative(period * j / n, period);
            w.at(j) *= std::exp(-x * x / (2 * envelope * envelope));
        }
        out.push_back(dyadic::apply_multiplier(w, [cut](const Freq& xi) { return cplx(dyadic::chi(std::abs(xi[0]) / cut)); }));
    }
    return out;
}

L0BoundResult measure_L0_bound(const std::vector<double>& factors, const Weight& gamma, double p,
                               const std::vector<GridFunction>& samples) {
    require(factors.size() >= 3, "need at least three contraction factors");
    require(samples.size() >= 10, "need at least ten sample functions");
    for (double c : factors) require(c > 0.0 && c < 1.0, "contraction factors must lie in (0, 1)");

    const auto& s0 = samples.front();
    double gamma_sup = 0.0;
    for (int i = 0; i < s0.size(); ++i) {
        double x = representative(s0.period() * i / s0.size(), s0.period());
        gamma_sup = std::max(gamma_sup, std::abs(gamma.local(Vec2(x, 0.0), 1)));
    }

    L0BoundResult res;
    for (double c : factors) {
        auto branch = LocalBranch::scaling(c);
        dynamics::SampleGrid one;
        one.points = 1;
        auto rel = LinkageRelation::expanding(dynamics::weakest_contraction(branch, std::nullopt, one));
        double worst = 0.0;
        if (gamma_sup > 0.0) {
            for (const auto& u : samples) {
                auto split = split_L0_L1(branch, gamma, u, rel, std::nullopt);
                double num = dyadic::holder_norm_star(split.l0, p).value;
                double den = gamma_sup * dyadic::holder_norm_star(u, p).value;
                require(den > 0.0, "sample function has zero norm");
                worst = std::max(worst, num / den);
            }
        }
        res.factors.push_back(rel.t_plus);
        res.ratios.push_back(worst);
    }

    for (double r : res.ratios)
        if (!(r > 0.0)) res.degenerate = true;
    if (res.degenerate) {
        res.slope = std::numeric_limits<double>::quiet_NaN();
        res.constant = 0.0;
        return res;
    }
    double mx = 0, my = 0;
    const auto m = static_cast<double>(res.factors.size());
    for (std::size_t i = 0; i < res.factors.size(); ++i) {
        mx += std::log(res.factors[i]) / m;
        my += std::log(res.ratios[i]) / m;
    }
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < res.factors.size(); ++i) {
        double dx = std::log(res.factors[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(res.ratios[i]) - my);
    }
    if (sxx <= 0.0) throw NumericalError("contraction factors are not distinct; slope undefined");
    res.slope = sxy / sxx;
    res.constant = std::exp(my - res.slope * mx);
    return res;
}

}  // namespace rlab::transfer
