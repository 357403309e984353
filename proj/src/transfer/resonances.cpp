#include "rlab/transfer/resonances.hpp"

#include <cmath>
#include <limits>

#include "rlab/common/errors.hpp"
#include "rlab/common/parallel.hpp"
#include "rlab/dynamics/hyperbolicity.hpp"

namespace rlab::transfer {

double spectral_radius_expanding(const MapModel& map, const Weight& g, int m, int points) {
    require(map.dim() == 1, "R(T^{-1},g) is defined here for circle maps");
    if (g.is_zero()) return 0.0;
    std::vector<double> sums(points);
    parallel_for(static_cast<std::size_t>(points), [&](std::size_t i) {
        double x = (i + 0.5) / points;
        double s = 0.0;
        for (const auto& pre : dynamics::inverse_branches(map, x, m))
            s += std::abs(dynamics::birkhoff_weight(map, g, pre.point, m));
        sums[i] = s;
    });
    double sup = 0.0;
    for (double s : sums) sup = std::max(sup, s);
    return std::pow(sup, 1.0 / m);
}

double spectral_radius_hyperbolic(const MapModel& map, const Weight& g, int m, int points) {
    require(map.dim() == 2, "R(T,g) is defined here for toral maps");
    if (g.is_zero()) return 0.0;
    if (g.is_constant()) return std::abs(g.constant_value());
    std::vector<double> rows(points);
    parallel_for(static_cast<std::size_t>(points), [&](std::size_t i) {
        double best = 0.0;
        for (int j = 0; j < points; ++j) {
            dynamics::Vec2 x((i + 0.5) / points, (j + 0.5) / points);
            best = std::max(best, std::abs(dynamics::birkhoff_weight(map, g, x, m)));
        }
        rows[i] = best;
    });
    double sup = 0.0;
    for (double r : rows) sup = std::max(sup, r);
    return std::pow(sup, 1.0 / m);
}

double essential_filter(const MapModel& map, const Weight& g, const ResonanceConfig& cfg, double* radius_out,
                        double* rate_out) {
    double radius, rate;
    if (map.dim() == 1) {
        radius = spectral_radius_expanding(map, g, cfg.radius_m, cfg.radius_points);
        rate = std::pow(map.lambda_s(), cfg.p);
    } else {
        radius = spectral_radius_hyperbolic(map, g, cfg.radius_m, std::min(cfg.radius_points, 32));
        auto rates = dynamics::estimate_rates(map);
        rate = std::max(std::pow(rates.lambda_s, cfg.p), std::pow(rates.nu_u, cfg.q));
    }
    if (radius_out) *radius_out = radius;
    if (rate_out) *rate_out = rate;
    return radius * rate;
}

namespace {

OperatorMatrix assemble(const MapModel& map, const Weight& g, int n_f, const ResonanceConfig& cfg) {
    if (map.dim() == 1) return assemble_expanding(map, g, n_f, cfg.quadrature_factor * n_f);
    require(cfg.cones.has_value(), "resonances for toral maps need a cone system");
    return assemble_hyperbolic(map, g, n_f, cfg.p, cfg.q, *cfg.cones);
}

}  // namespace

ResonanceReport resonances(const MapModel& map, const Weight& g, const ResonanceConfig& cfg) {
    require(cfg.n_f >= 1 && cfg.refinement >= 2, "need n_f >= 1 and refinement >= 2");
    require(cfg.stability_tol > 0 && cfg.margin >= 0, "stability_tol must be positive, margin nonnegative");
    ResonanceReport rep;
    rep.margin = cfg.margin;
    rep.n_coarse = cfg.n_f;
    rep.n_fine = cfg.n_f * cfg.refinement;
    rep.filter = essential_filter(map, g, cfg, &rep.radius_factor, &rep.rate_factor);
    if (g.is_zero()) return rep;

    auto coarse = assemble(map, g, rep.n_coarse, cfg);
    auto fine = assemble(map, g, rep.n_fine, cfg);
    rep.coarse_spectrum = eigenvalues(coarse);
    rep.fine_spectrum = eigenvalues(fine);
    const double threshold = rep.filter + cfg.margin;
    const double coarse_scale = std::max(1.0, coarse.m.cwiseAbs().maxCoeff());

    std::vector<bool> used(rep.coarse_spectrum.size(), false);
    for (std::size_t i = 0; i < rep.coarse_spectrum.size(); ++i) {
        if (used[i]) continue;
        cplx z = rep.coarse_spectrum[i];
        if (std::abs(z) <= threshold) continue;
        double best = std::numeric_limits<double>::infinity();
        for (cplx w : rep.fine_spectrum)
            best = std::min(best, std::abs(w - z));
        if (best >= cfg.stability_tol) continue;
        Resonance r;
        r.value = z;
        r.stability = best;
        for (std::size_t j = i + 1; j < rep.coarse_spectrum.size(); ++j)
            if (!used[j] && std::abs(rep.coarse_spectrum[j] - z) < cfg.stability_tol) {
                used[j] = true;
                ++r.multiplicity;
            }
        r.residual = eigen_residual(coarse.m, z) / coarse_scale;
        if (r.residual > 1e-8)
            throw NumericalError("eigenpair residual above 1e-8 |M| for a reported resonance");
        rep.accepted.push_back(r);
    }
    return rep;
}

}  // namespace rlab::transfer
