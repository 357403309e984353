#include "rlab/transfer/linkage.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "rlab/common/errors.hpp"

namespace rlab::transfer {

LinkageRelation LinkageRelation::expanding(double t_plus) {
    LinkageRelation r;
    r.kind = RuleKind::expanding;
    r.t_plus = t_plus;
    return r;
}

LinkageRelation LinkageRelation::hyperbolic(double t_plus, double t_minus) {
    LinkageRelation r;
    r.kind = RuleKind::hyperbolic;
    r.t_plus = t_plus;
    r.t_minus = t_minus;
    return r;
}

bool LinkageRelation::linked(int ell, int n, std::optional<Sign> tau, std::optional<Sign> sigma) const {
    require(ell >= 0 && n >= 0, "dyadic indices must be nonnegative");
    const double two_n = std::ldexp(1.0, n), two_l = std::ldexp(1.0, ell);
    if (kind == RuleKind::expanding) return two_n <= t_plus * std::ldexp(1.0, ell + 4);
    require(tau.has_value() && sigma.has_value(), "hyperbolic linkage needs cone labels");
    if (*tau == Sign::plus && *sigma == Sign::plus) return two_n <= std::ldexp(1.0, ell + 5) * t_plus;
    if (*tau == Sign::minus && *sigma == Sign::minus) return std::ldexp(1.0, ell - 5) * t_minus <= two_n;
    if (*tau == Sign::plus && *sigma == Sign::minus) return two_n >= 32.0 * t_minus || two_l >= 32.0 * t_plus;
    return false;
}

namespace {

using dynamics::Vec2;
constexpr double kPi = std::numbers::pi;

// Closed annular double sector {r0 <= |xi| <= r1, angle in cone}; a missing cone
// means the full annulus.
struct AnnularSector {
    double r0 = 0.0, r1 = 0.0;
    std::optional<dyadic::Cone> cone;

    bool contains(const Vec2& z) const {
        double r = z.norm();
        if (r < r0 || r > r1) return false;
        return !cone || cone->contains(std::atan2(z[1], z[0]));
    }

    double distance(const Vec2& z) const {
        double r = z.norm();
        double radial = std::max({0.0, r0 - r, r - r1});
        if (!cone || r == 0.0 || cone->contains(std::atan2(z[1], z[0]))) {
            if (cone && r == 0.0 && r0 == 0.0) return 0.0;
            if (r == 0.0 && cone) return r0;
            return radial;
        }
        // Outside the angular range the nearest point lies on a radial edge.
        double best = std::numeric_limits<double>::infinity();
        for (double edge : {cone->center - cone->half_width, cone->center + cone->half_width})
            for (double flip : {0.0, kPi}) {
                Vec2 u(std::cos(edge + flip), std::sin(edge + flip));
                double t = std::clamp(z.dot(u), r0, r1);
                best = std::min(best, (z - t * u).norm());
            }
        return best;
    }

    // Boundary polyline samples (arcs and radial edges).
    std::vector<Vec2> boundary(int per_arc) const {
        std::vector<Vec2> pts;
        auto arc = [&](double r, double a0, double a1) {
            for (int i = 0; i <= per_arc; ++i) {
                double a = a0 + (a1 - a0) * i / per_arc;
                pts.emplace_back(r * std::cos(a), r * std::sin(a));
            }
        };
        auto seg = [&](double a) {
            for (int i = 0; i <= per_arc; ++i) {
                double r = r0 + (r1 - r0) * i / per_arc;
                pts.emplace_back(r * std::cos(a), r * std::sin(a));
            }
        };
        if (!cone) {
            arc(r1, 0, 2 * kPi);
            if (r0 > 0) arc(r0, 0, 2 * kPi);
            return pts;
        }
        for (double flip : {0.0, kPi}) {
            double a0 = cone->center - cone->half_width + flip, a1 = cone->center + cone->half_width + flip;
            arc(r1, a0, a1);
            if (r0 > 0) arc(r0, a0, a1);
            seg(a0);
            seg(a1);
        }
        return pts;
    }
};

// supp psi_n (or check psi_{n,sigma}).
AnnularSector target_support(int n, std::optional<Sign> sigma, const std::optional<dyadic::ConeSystem>& cones) {
    AnnularSector s;
    if (n == 0) {
        s.r0 = 0.0;
        s.r1 = 2.0;
        return s;
    }
    s.r0 = std::ldexp(1.0, n - 1);
    s.r1 = std::ldexp(1.0, n + 1);
    if (cones && sigma) {
        if (*sigma == Sign::minus) s.cone = cones->minus;
        else s.cone = cones->minus.shrunk(cones->check_fraction).complement();
    }
    return s;
}

// supp psi_tilde_ell (or psi_tilde_{ell,tau}).
AnnularSector source_support(int ell, std::optional<Sign> tau, const std::optional<dyadic::ConeSystem>& cones) {
    AnnularSector s;
    if (ell == 0) {
        s.r0 = 0.0;
        s.r1 = 4.0;
        return s;
    }
    s.r0 = std::ldexp(1.0, ell - 2);
    s.r1 = std::ldexp(1.0, ell + 2);
    if (cones && tau) {
        const auto& other = *tau == Sign::minus ? cones->plus : cones->minus;
        s.cone = other.shrunk(cones->tilde_fraction).complement();
    }
    return s;
}

double set_distance(const AnnularSector& target, const AnnularSector& source, const dynamics::Mat2& b, int dim) {
    if (dim == 1) {
        double s = std::abs(b(0, 0));
        double c = s * source.r0, d = s * source.r1;
        return std::max({0.0, c - target.r1, target.r0 - d});
    }
    // Disjoint compact sets: the distance is attained on the boundary of the
    // image, which is the image of the boundary.
    double best = std::numeric_limits<double>::infinity();
    for (const auto& z : source.boundary(2048)) best = std::min(best, target.distance(b * z));
    if (best == 0.0) return 0.0;
    // The target might sit inside the image without boundaries touching.
    Vec2 probe;
    double mid = 0.5 * (target.r0 + target.r1);
    double ang = target.cone ? target.cone->center : 0.0;
    probe = Vec2(mid * std::cos(ang), mid * std::sin(ang));
    if (std::abs(b.determinant()) > 0 && source.contains(b.inverse() * probe)) return 0.0;
    return best;
}

Vec2 sample_point(const dynamics::SampleGrid& g, int i, int j, int dim) {
    auto coord = [&](int k, int axis) {
        return g.points == 1 ? 0.5 * (g.lo[axis] + g.hi[axis])
                             : g.lo[axis] + (g.hi[axis] - g.lo[axis]) * k / (g.points - 1.0);
    };
    return {coord(i, 0), dim == 2 ? coord(j, 1) : 0.0};
}

}  // namespace

SeparationSample support_distance(const LocalBranch& t, const std::optional<dyadic::ConeSystem>& cones, int ell,
                                  int n, std::optional<Sign> tau, std::optional<Sign> sigma,
                                  const dynamics::SampleGrid& grid) {
    auto target = target_support(n, sigma, cones);
    auto source = source_support(ell, tau, cones);
    SeparationSample out;
    out.distance = std::numeric_limits<double>::infinity();
    const int jn = t.dim == 2 ? grid.points : 1;
    for (int i = 0; i < grid.points; ++i)
        for (int j = 0; j < jn; ++j) {
            Vec2 x = sample_point(grid, i, j, t.dim);
            double d = set_distance(target, source, t.jacobian(x).transpose(), t.dim);
            if (d < out.distance) out = {d, x};
        }
    return out;
}

int low_frequency_level(const LinkageRelation& rel) {
    double scale = std::max({rel.t_plus, rel.kind == RuleKind::hyperbolic ? rel.t_minus : 0.0, 1.0});
    return static_cast<int>(std::ceil(std::log2(32.0 * scale)));
}

ThresholdResult compute_threshold(const LinkageRelation& rel, const LocalBranch& t,
                                  const std::optional<dyadic::ConeSystem>& cones, int max_index,
                                  const dynamics::SampleGrid& grid) {
    ThresholdResult res;
    res.low_level = low_frequency_level(rel);
    std::vector<std::pair<std::optional<Sign>, std::optional<Sign>>> labels;
    if (rel.kind == RuleKind::expanding) labels.push_back({std::nullopt, std::nullopt});
    else
        for (Sign a : {Sign::plus, Sign::minus})
            for (Sign b : {Sign::plus, Sign::minus}) labels.push_back({a, b});
    for (const auto& [tau, sigma] : labels)
        for (int ell = 0; ell <= max_index; ++ell)
            for (int n = 0; n <= max_index; ++n) {
                if (rel.linked(ell, n, tau, sigma)) continue;
                auto s = support_distance(t, cones, ell, n, tau, sigma, grid);
                if (s.distance <= 0.0) {
                    if (std::max(n, ell) <= res.low_level) {
                        ++res.low_touching;
                        continue;
                    }
                    if (res.ok) {
                        res.ok = false;
                        res.bad_ell = ell;
                        res.bad_n = n;
                        res.bad_x = s.x;
                    }
                    continue;
                }
                int need = static_cast<int>(std::ceil(std::max(n, ell) - std::log2(s.distance)));
                res.n_threshold = std::max(res.n_threshold, std::max(1, need));
            }
    return res;
}

LinkageRelation make_linkage(const LocalBranch& t, const std::optional<dyadic::ConeSystem>& cones, int max_index,
                             const dynamics::SampleGrid& grid) {
    LinkageRelation rel;
    if (t.dim == 1 || !cones) {
        rel = LinkageRelation::expanding(dynamics::weakest_contraction(t, std::nullopt, grid));
    } else {
        rel = LinkageRelation::hyperbolic(dynamics::weakest_contraction(t, cones, grid),
                                          dynamics::weakest_expansion(t, cones, grid));
    }
    auto th = compute_threshold(rel, t, cones, max_index, grid);
    if (!th.ok)
        throw ValidationError("non-linked pair (" + std::to_string(th.bad_ell) + " -> " + std::to_string(th.bad_n) +
                              ") has touching supports; cones or N(T) unsuitable");
    rel.n_threshold = th.n_threshold;
    return rel;
}

}  // namespace rlab::transfer
