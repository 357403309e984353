#include "rlab/dyadic/decomposition.hpp"

#include <cmath>

#include "rlab/common/errors.hpp"
#include "rlab/common/parallel.hpp"

namespace rlab::dyadic {

int n_max_for(int n, double period) {
    double top = std::floor(std::log2(n / (2.0 * period)) + 1e-12);
    return static_cast<int>(top) - 1;
}

namespace {

// Average of the symbol over the Nyquist aliases of slot (j1, j2).
cplx symbol_at(const GridFunction& g, const Symbol& a, int j1, int j2) {
    const int n = g.size();
    const double P = g.period();
    const bool ny1 = j1 == n / 2;
    const bool ny2 = g.dim() == 2 && j2 == n / 2;
    Freq f = g.frequency(j1, j2);
    if (!ny1 && !ny2) return a(f);
    cplx s{};
    int cnt = 0;
    for (int s1 : {-1, 1}) {
        if (!ny1 && s1 == 1) continue;
        for (int s2 : {-1, 1}) {
            if (!ny2 && s2 == 1) continue;
            Freq v = f;
            if (ny1) v[0] = s1 * (n / 2) / P;
            if (ny2) v[1] = s2 * (n / 2) / P;
            s += a(v);
            ++cnt;
        }
    }
    return s / static_cast<double>(cnt);
}

}  // namespace

GridFunction apply_multiplier_spectrum(const GridFunction& shape, const std::vector<cplx>& spec,
                                       const Symbol& a) {
    const int n = shape.size();
    std::vector<cplx> out(spec.size());
    if (shape.dim() == 1) {
        for (int j = 0; j < n; ++j) out[j] = symbol_at(shape, a, j, 0) * spec[j];
    } else {
        parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
            for (int j = 0; j < n; ++j) {
                std::size_t idx = i * n + j;
                out[idx] = symbol_at(shape, a, static_cast<int>(i), j) * spec[idx];
            }
        });
    }
    return GridFunction::from_spectrum(shape.dim(), n, std::move(out), shape.period());
}

GridFunction apply_multiplier(const GridFunction& u, const Symbol& a) {
    return apply_multiplier_spectrum(u, u.spectrum(), a);
}

namespace {

double high_band_mass_spec(const GridFunction& u, const std::vector<cplx>& spec) {
    const double cut = std::ldexp(1.0, n_max_for(u.size(), u.period()));
    const int n = u.size();
    double total = 0.0, high = 0.0;
    for (std::size_t idx = 0; idx < spec.size(); ++idx) {
        int j1 = u.dim() == 1 ? static_cast<int>(idx) : static_cast<int>(idx / n);
        int j2 = u.dim() == 1 ? 0 : static_cast<int>(idx % n);
        double e = std::norm(spec[idx]);
        total += e;
        if (norm(u.frequency(j1, j2), u.dim()) > cut) high += e;
    }
    return total == 0.0 ? 0.0 : high / total;
}

}  // namespace

double high_band_mass(const GridFunction& u) { return high_band_mass_spec(u, u.spectrum()); }

GridFunction DyadicDecomposition::reconstruct() const {
    const auto& src = blocks.empty() ? sigma_blocks.front()[0] : blocks.front();
    GridFunction sum(src.dim(), src.size(), src.period());
    for (const auto& b : blocks) sum += b;
    for (const auto& pair : sigma_blocks) {
        sum += pair[0];
        sum += pair[1];
    }
    return sum;
}

DyadicDecomposition dyadic_blocks(const GridFunction& u, const std::optional<ConeSystem>& cones) {
    DyadicDecomposition out;
    out.n_max = n_max_for(u.size(), u.period());
    require(out.n_max >= 1, "grid too coarse for a dyadic decomposition");
    const auto spec = u.spectrum();
    out.high_band_mass = high_band_mass_spec(u, spec);
    out.truncation_warning = out.high_band_mass > kTruncationMassLimit;
    const int dim = u.dim();
    if (!cones) {
        for (int n = 0; n <= out.n_max; ++n)
            out.blocks.push_back(apply_multiplier_spectrum(
                u, spec, [n, dim](const Freq& xi) { return cplx(psi_n(n, xi, dim)); }));
        return out;
    }
    require(dim == 2, "anisotropic blocks need a two-dimensional grid");
    cones->validate();
    const ConeSystem cs = *cones;
    for (int n = 0; n <= out.n_max; ++n) {
        out.sigma_blocks.push_back(
            {apply_multiplier_spectrum(
                 u, spec, [n, &cs](const Freq& xi) { return cplx(psi_n_sigma(n, Sign::plus, xi, cs)); }),
             apply_multiplier_spectrum(u, spec, [n, &cs](const Freq& xi) {
                 return cplx(psi_n_sigma(n, Sign::minus, xi, cs));
             })});
    }
    return out;
}

NormValue holder_norm_star(const GridFunction& u, double p) {
    auto dec = dyadic_blocks(u);
    NormValue nv{0.0, dec.truncation_warning, dec.high_band_mass};
    for (int n = 0; n <= dec.n_max; ++n)
        nv.value = std::max(nv.value, std::exp2(p * n) * dec.blocks[n].sup_norm());
    return nv;
}

NormValue aniso_norm(const GridFunction& u, double p, double q, const ConeSystem& cones) {
    auto dec = dyadic_blocks(u, cones);
    NormValue nv{0.0, dec.truncation_warning, dec.high_band_mass};
    for (int n = 0; n <= dec.n_max; ++n) {
        nv.value = std::max(nv.value, std::exp2(p * n) * dec.sigma_blocks[n][0].sup_norm());
        nv.value = std::max(nv.value, std::exp2(q * n) * dec.sigma_blocks[n][1].sup_norm());
    }
    return nv;
}

double classical_holder_norm(const GridFunction& u, double p) {
    require(p > 0 && p < 1, "classical Holder exponent must lie in (0,1)");
    const int n = u.size();
    const double h = u.spacing();
    const double reach = 0.25 * u.period();
    const int span = static_cast<int>(std::floor(reach / h + 1e-12));
    double best = u.sup_norm();
    if (u.dim() == 1) {
        for (int i = 0; i < n; ++i)
            for (int s = 1; s <= span; ++s) {
                double q = std::abs(u.at(i) - u.at((i + s) % n)) / std::pow(s * h, p);
                best = std::max(best, q);
            }
        return best;
    }
    // Rows are independent; per-row maxima are combined in order.
    std::vector<double> row_best(n, 0.0);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t ii) {
        int i = static_cast<int>(ii);
        double b = 0.0;
        for (int j = 0; j < n; ++j)
            for (int di = 0; di <= span; ++di)
                for (int dj = -span; dj <= span; ++dj) {
                    if (di == 0 && dj <= 0) continue;
                    double dist = h * std::hypot(di, dj);
                    if (dist > reach) continue;
                    cplx d = u.at(i, j) - u.at((i + di) % n, ((j + dj) % n + n) % n);
                    b = std::max(b, std::abs(d) / std::pow(dist, p));
                }
        row_best[ii] = b;
    });
    for (double b : row_best) best = std::max(best, b);
    return best;
}

double multiplier_kernel_l1(int dim, int n, int level) {
    GridFunction delta(dim, n);
    delta.at(0, 0) = cplx(static_cast<double>(delta.count()), 0.0);  // all coefficients = 1
    auto k = apply_multiplier(delta, [level, dim](const Freq& xi) { return cplx(psi_n(level, xi, dim)); });
    double s = 0.0;
    for (const auto& v : k.values()) s += std::abs(v);
    return s / static_cast<double>(k.count());
}

}  // namespace rlab::dyadic
