#include "rlab/dynamics/hyperbolicity.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "rlab/common/errors.hpp"
#include "rlab/common/parallel.hpp"

namespace rlab::dynamics {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_toral(const MapModel& map) {
    require(map.dim() == 2, "hyperbolicity exponents need a toral map");
}

// Eigenvector of A for the eigenvalue of modulus < 1 (stable) or > 1.
Vec2 linear_eigvec(const MapModel& map, bool stable) {
    Mat2 a = map.matrix().cast<double>();
    Eigen::EigenSolver<Mat2> es(a);
    int pick = 0;
    double m0 = std::abs(es.eigenvalues()[0]), m1 = std::abs(es.eigenvalues()[1]);
    if (stable) pick = m0 < m1 ? 0 : 1;
    else pick = m0 > m1 ? 0 : 1;
    Vec2 v = es.eigenvectors().col(pick).real();
    return v.normalized();
}

}  // namespace

Vec2 stable_direction(const MapModel& map, const Vec2& x, int n_pre) {
    require_toral(map);
    if (map.is_linear()) return linear_eigvec(map, true);
    require(n_pre >= 1, "n_pre must be >= 1");
    std::vector<Vec2> orbit(n_pre);
    orbit[0] = x;
    for (int i = 1; i < n_pre; ++i) orbit[i] = map.evaluate(orbit[i - 1]);
    Vec2 v = linear_eigvec(map, true);
    for (int i = n_pre - 1; i >= 0; --i) v = map.derivative(orbit[i]).inverse() * v, v.normalize();
    return v;
}

Vec2 unstable_direction(const MapModel& map, const Vec2& x, int n_pre) {
    require_toral(map);
    if (map.is_linear()) return linear_eigvec(map, false);
    require(n_pre >= 1, "n_pre must be >= 1");
    std::vector<Vec2> pre(n_pre + 1);
    pre[0] = x;
    for (int i = 1; i <= n_pre; ++i) pre[i] = map.inverse(pre[i - 1]);
    Vec2 v = linear_eigvec(map, false);
    for (int i = n_pre; i >= 1; --i) v = map.derivative(pre[i]) * v, v.normalize();
    return v;
}

Exponents hyperbolicity_exponents(const MapModel& map, const Vec2& x, int m, int n_pre) {
    require_toral(map);
    require(m >= 0, "m must be nonnegative");
    Exponents e;
    e.n_pre = n_pre;
    if (m == 0) return e;
    if (map.is_linear()) {
        double lam = map.linear_expansion();
        e.lambda = std::pow(lam, -m);
        e.nu = std::pow(lam, m);
        return e;
    }
    Mat2 d = jacobian_power(map, x, m);
    e.lambda = (d * stable_direction(map, x, n_pre)).norm();
    e.nu = (d * unstable_direction(map, x, n_pre)).norm();
    return e;
}

double lambda_pqm(const Exponents& e, double p, double q) {
    return std::max(std::pow(e.lambda, p), std::pow(e.nu, q));
}

double lambda_pqm(const MapModel& map, const Vec2& x, double p, double q, int m, int n_pre) {
    return lambda_pqm(hyperbolicity_exponents(map, x, m, n_pre), p, q);
}

Rates estimate_rates(const MapModel& map, int m, int points) {
    require_toral(map);
    Rates r;
    r.m = m;
    if (map.is_linear()) {
        r.lambda_s = 1.0 / map.linear_expansion();
        r.nu_u = map.linear_expansion();
        return r;
    }
    std::vector<std::vector<Exponents>> ex(points * points);
    parallel_for(ex.size(), [&](std::size_t idx) {
        Vec2 x((idx / points + 0.5) / points, (idx % points + 0.5) / points);
        for (int j = 1; j <= m; ++j) ex[idx].push_back(hyperbolicity_exponents(map, x, j));
    });
    double ls = 0.0, nu = std::numeric_limits<double>::infinity();
    for (const auto& e : ex) {
        ls = std::max(ls, std::pow(e.back().lambda, 1.0 / m));
        nu = std::min(nu, std::pow(e.back().nu, 1.0 / m));
    }
    double c = 1.0;
    for (const auto& e : ex)
        for (int j = 1; j <= m; ++j) {
            c = std::max(c, e[j - 1].lambda / std::pow(ls, j));
            c = std::max(c, std::pow(nu, j) / e[j - 1].nu);
        }
    r.lambda_s = ls;
    r.nu_u = nu;
    r.c_eff = c;
    return r;
}

LocalBranch LocalBranch::scaling(double c) {
    LocalBranch b;
    b.dim = 1;
    b.eval = [c](const Vec2& y) { return Vec2(c * y[0], 0.0); };
    b.jacobian = [c](const Vec2&) {
        Mat2 j = Mat2::Zero();
        j(0, 0) = c;
        return j;
    };
    b.label = "scaling";
    return b;
}

LocalBranch LocalBranch::perturbed_scaling(double c, double a) {
    LocalBranch b;
    b.dim = 1;
    b.eval = [c, a](const Vec2& y) { return Vec2(c * y[0] + a * std::sin(kTwoPi * y[0]), 0.0); };
    b.jacobian = [c, a](const Vec2& y) {
        Mat2 j = Mat2::Zero();
        j(0, 0) = c + a * kTwoPi * std::cos(kTwoPi * y[0]);
        return j;
    };
    b.label = "perturbed-scaling";
    return b;
}

LocalBranch LocalBranch::identity(int dim) {
    LocalBranch b;
    b.dim = dim;
    b.eval = [](const Vec2& y) { return y; };
    b.jacobian = [dim](const Vec2&) {
        Mat2 j = Mat2::Identity();
        if (dim == 1) j(1, 1) = 0.0;
        return j;
    };
    if (dim == 2) b.integer_linear = Mat2i::Identity();
    b.label = "identity";
    return b;
}

LocalBranch LocalBranch::linear(const Mat2& a, std::string label) {
    LocalBranch b;
    b.dim = 2;
    b.eval = [a](const Vec2& y) { return Vec2(a * y); };
    b.jacobian = [a](const Vec2&) { return a; };
    b.label = std::move(label);
    return b;
}

LocalBranch LocalBranch::from_map(const MapModel& map) {
    LocalBranch b;
    b.dim = map.dim();
    b.label = map.describe();
    if (map.dim() == 1) {
        b.eval = [map](const Vec2& y) { return Vec2(map.lift(y[0]), 0.0); };
        b.jacobian = [map](const Vec2& y) {
            Mat2 j = Mat2::Zero();
            j(0, 0) = map.derivative(y[0]);
            return j;
        };
        return b;
    }
    b.eval = [map](const Vec2& y) { return map.lift(y); };
    b.jacobian = [map](const Vec2& y) { return map.derivative(y); };
    if (map.is_linear()) b.integer_linear = map.matrix();
    return b;
}

namespace {

Vec2 sample_point(const SampleGrid& g, int i, int j, int dim) {
    auto coord = [&](int k, int axis) {
        return g.points == 1 ? 0.5 * (g.lo[axis] + g.hi[axis])
                             : g.lo[axis] + (g.hi[axis] - g.lo[axis]) * k / (g.points - 1.0);
    };
    return {coord(i, 0), dim == 2 ? coord(j, 1) : 0.0};
}

Vec2 unit(double th) { return {std::cos(th), std::sin(th)}; }

// Reduces over rows in index order so the result is thread-count invariant.
template <class RowFn>
std::vector<double> per_row(const SampleGrid& g, RowFn fn) {
    std::vector<double> out(g.points);
    parallel_for(static_cast<std::size_t>(g.points), [&](std::size_t i) { out[i] = fn(static_cast<int>(i)); });
    return out;
}

}  // namespace

double weakest_contraction(const LocalBranch& t, const std::optional<dyadic::ConeSystem>& cones,
                           const SampleGrid& grid) {
    require(grid.points >= 1 && grid.angles >= 1, "sample grid must be nonempty");
    if (t.dim == 1) {
        double best = 0.0;
        for (int i = 0; i < grid.points; ++i)
            best = std::max(best, std::abs(t.jacobian(sample_point(grid, i, 0, 1))(0, 0)));
        return best;
    }
    const int jn = grid.points;
    auto rows = per_row(grid, [&](int i) {
        double best = -1.0;
        for (int j = 0; j < jn; ++j) {
            Mat2 dt = t.jacobian(sample_point(grid, i, j, 2)).transpose();
            for (int a = 0; a < grid.angles; ++a) {
                Vec2 xi = unit(2.0 * std::numbers::pi * a / grid.angles);
                Vec2 img = dt * xi;
                if (img.norm() == 0.0) continue;
                if (cones && cones->minus.contains(dyadic::angle_of({img[0], img[1]}))) continue;
                best = std::max(best, img.norm());
            }
        }
        return best;
    });
    double best = -1.0;
    for (double r : rows) best = std::max(best, r);
    if (best < 0) throw ValidationError("weakest contraction: constraint set is empty");
    return best;
}

double weakest_expansion(const LocalBranch& t, const std::optional<dyadic::ConeSystem>& cones,
                         const SampleGrid& grid) {
    require(grid.points >= 1 && grid.angles >= 1, "sample grid must be nonempty");
    const double inf = std::numeric_limits<double>::infinity();
    if (t.dim == 1) {
        double best = inf;
        for (int i = 0; i < grid.points; ++i)
            best = std::min(best, std::abs(t.jacobian(sample_point(grid, i, 0, 1))(0, 0)));
        return best;
    }
    const dyadic::Cone* plus = nullptr;
    if (cones) plus = cones->plus_prime ? &*cones->plus_prime : &cones->plus;
    auto rows = per_row(grid, [&](int i) {
        double best = inf;
        for (int j = 0; j < grid.points; ++j) {
            Mat2 dt = t.jacobian(sample_point(grid, i, j, 2)).transpose();
            for (int a = 0; a < grid.angles; ++a) {
                double th = 2.0 * std::numbers::pi * a / grid.angles;
                if (plus && plus->contains(th)) continue;
                best = std::min(best, (dt * unit(th)).norm());
            }
        }
        return best;
    });
    double best = inf;
    for (double r : rows) best = std::min(best, r);
    if (best == inf) throw ValidationError("weakest expansion: constraint set is empty");
    return best;
}

ConeCheck cone_hyperbolicity_check(const LocalBranch& t, const dyadic::ConeSystem& cones,
                                   const SampleGrid& region, bool two_pair) {
    require(t.dim == 2, "cone hyperbolicity is a two-dimensional condition");
    cones.validate();
    require(!two_pair || cones.plus_prime.has_value(), "two-pair check needs the primed cones");
    const dyadic::Cone& plus = two_pair ? *cones.plus_prime : cones.plus;
    const dyadic::Cone& minus = cones.minus;
    struct RowResult {
        double margin;
        int j;
        double th;
    };
    std::vector<RowResult> rows(region.points);
    parallel_for(static_cast<std::size_t>(region.points), [&](std::size_t ii) {
        int i = static_cast<int>(ii);
        RowResult rr{std::numeric_limits<double>::infinity(), 0, 0.0};
        for (int j = 0; j < region.points; ++j) {
            Mat2 dt = t.jacobian(sample_point(region, i, j, 2)).transpose();
            for (int a = 0; a < region.angles; ++a) {
                double th = 2.0 * std::numbers::pi * a / region.angles;
                if (plus.contains_interior(th)) continue;
                Vec2 img = dt * unit(th);
                double margin = img.norm() == 0.0
                                    ? std::numeric_limits<double>::infinity()
                                    : minus.half_width - minus.axis_distance(dyadic::angle_of({img[0], img[1]}));
                if (margin < rr.margin) rr = {margin, j, th};
            }
        }
        rows[ii] = rr;
    });
    ConeCheck out;
    out.worst_margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < region.points; ++i) {
        if (rows[i].margin < out.worst_margin) {
            out.worst_margin = rows[i].margin;
            out.witness_x = sample_point(region, i, rows[i].j, 2);
            out.witness_angle = rows[i].th;
        }
    }
    out.ok = out.worst_margin > 0.0;
    return out;
}

}  // namespace rlab::dynamics
