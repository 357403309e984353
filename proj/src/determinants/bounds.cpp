#include "rlab/determinants/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rlab/common/errors.hpp"
#include "rlab/common/parallel.hpp"
#include "rlab/dynamics/hyperbolicity.hpp"

namespace rlab::determinants {

namespace {

using dynamics::Vec2;

void require_toral_dim(const MapModel& map) {
    require(map.dim() == 2, "bound quantities are defined for toral maps");
}

double integrand(const MapModel& map, const Weight& g, double p, double q, int m, const Vec2& x) {
    double w = std::abs(dynamics::birkhoff_weight(map, g, x, m));
    if (w == 0.0) return 0.0;
    return w * dynamics::lambda_pqm(map, x, p, q, m);
}

}  // namespace

Integral rho_pqm(const MapModel& map, const Weight& g, double p, double q, int m,
                 const QuadratureConfig& quad) {
    require_toral_dim(map);
    require(m >= 1, "m must be >= 1");
    Integral out;
    if (quad.monte_carlo) {
        require(quad.samples >= 2, "need at least two samples");
        std::mt19937_64 rng(quad.seed);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<Vec2> xs(quad.samples);
        for (auto& x : xs) x = Vec2(u(rng), u(rng));
        std::vector<double> f(xs.size());
        parallel_for(xs.size(), [&](std::size_t i) { f[i] = integrand(map, g, p, q, m, xs[i]); });
        double mean = 0.0;
        for (double v : f) mean += v;
        mean /= f.size();
        double var = 0.0;
        for (double v : f) var += (v - mean) * (v - mean);
        var /= (f.size() - 1);
        out.value = mean;
        out.std_error = std::sqrt(var / f.size());
        return out;
    }
    const int n = quad.points;
    require(n >= 1, "need at least one quadrature point per axis");
    // periodic trapezoid: equal weights on the uniform grid
    std::vector<double> rows(n);
    parallel_for(n, [&](std::size_t i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j)
            s += integrand(map, g, p, q, m, Vec2(double(i) / n, double(j) / n));
        rows[i] = s;
    });
    double total = 0.0;
    for (double r : rows) total += r;
    out.value = total / (double(n) * n);
    return out;
}

Limit rho_pq_limit(const std::vector<double>& roots) {
    require(roots.size() >= 4, "need at least four values of m");
    Limit l;
    l.value = roots.back();
    for (std::size_t i = roots.size() / 2; i + 1 < roots.size(); ++i)
        l.cauchy = std::max(l.cauchy, std::abs(roots[i + 1] - roots[i]));
    return l;
}

Limit R_pqt(const MapModel& map, const Weight& g, double p, double q, double t,
            const std::vector<int>& ms, int points) {
    require_toral_dim(map);
    require(t > 1.0, "t must lie in (1, inf]");
    require(!ms.empty(), "need at least one m");
    require(points >= 1, "need at least one grid point per axis");
    for (int m : ms) require(m >= 1, "m must be >= 1");
    std::vector<double> roots;
    for (int m : ms) {
        std::vector<double> rows(points);
        parallel_for(points, [&](std::size_t i) {
            double best = 0.0;
            for (int j = 0; j < points; ++j) {
                Vec2 x((i + 0.5) / points, (j + 0.5) / points);
                double v = integrand(map, g, p, q, m, x);
                if (v != 0.0 && !std::isinf(t))
                    v *= std::pow(std::abs(dynamics::jacobian_power(map, x, m).determinant()), 1.0 / t);
                best = std::max(best, v);
            }
            rows[i] = best;
        });
        double sup = *std::max_element(rows.begin(), rows.end());
        roots.push_back(std::pow(sup, 1.0 / m));
    }
    Limit l;
    l.value = roots.back();
    for (std::size_t i = roots.size() / 2; i + 1 < roots.size(); ++i)
        l.cauchy = std::max(l.cauchy, std::abs(roots[i + 1] - roots[i]));
    return l;
}

BoundEstimate bound_estimate(const MapModel& map, const Weight& g, double p, double q,
                             const std::vector<int>& ms, const std::vector<double>& ts,
                             const QuadratureConfig& quad, int sup_points) {
    BoundEstimate b;
    b.p = p;
    b.q = q;
    b.ms = ms;
    b.ts = ts;
    for (int m : ms) b.rho_roots.push_back(std::pow(rho_pqm(map, g, p, q, m, quad).value, 1.0 / m));
    if (b.rho_roots.size() >= 4) {
        b.rho = rho_pq_limit(b.rho_roots);
    } else {
        b.rho.value = b.rho_roots.back();
    }
    for (double t : ts) b.R.push_back(R_pqt(map, g, p, q, t, ms, sup_points));
    return b;
}

}  // namespace rlab::determinants
