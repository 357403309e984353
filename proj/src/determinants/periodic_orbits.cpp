#include "rlab/determinants/periodic_orbits.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "rlab/common/errors.hpp"
#include "rlab/common/parallel.hpp"

namespace rlab::determinants {

namespace {

using i128 = __int128;
using ld = long double;
const ld kTwoPiL = 2.0L * std::numbers::pi_v<long double>;

ld wrap_ld(ld x) { return x - std::floor(x); }

ld circle_gap(ld a, ld b) {
    ld d = wrap_ld(a - b);
    return std::min(d, 1.0L - d);
}

long long ipow(long long b, int e) {
    i128 r = 1;
    for (int i = 0; i < e; ++i) {
        r *= b;
        require(r < (i128(1) << 62), "periodic point count overflows 64 bits");
    }
    return static_cast<long long>(r);
}

dynamics::Mat2i mat_pow(const dynamics::Mat2i& a, int m) {
    dynamics::Mat2i r = dynamics::Mat2i::Identity();
    for (int i = 0; i < m; ++i) {
        dynamics::Mat2i next;
        for (int p = 0; p < 2; ++p)
            for (int q = 0; q < 2; ++q) {
                i128 s = i128(r(p, 0)) * a(0, q) + i128(r(p, 1)) * a(1, q);
                require(s < (i128(1) << 62) && s > -(i128(1) << 62), "matrix power overflows 64 bits");
                next(p, q) = static_cast<long long>(s);
            }
        r = next;
    }
    return r;
}

long long floor_mod(i128 a, long long d) {
    i128 r = a % d;
    if (r < 0) r += d;
    return static_cast<long long>(r);
}

// ---- expanding circle ------------------------------------------------------

PeriodicOrbitData circle_points(const MapModel& map, int m, const Weight& g) {
    require(m >= 1 && m <= 20, "expanding-circle periods are limited to 1 <= m <= 20");
    const int k = map.degree();
    const long long km = ipow(k, m);
    PeriodicOrbitData out;
    out.m = m;
    out.expected_count = km - 1;
    out.points.resize(static_cast<std::size_t>(km - 1));
    std::vector<ld> residual(out.points.size());
    const ld eps = map.eps();

    if (eps == 0.0) {
        out.method = "closed-form";
        // x_j = j / (k^m - 1); the orbit is j k^i mod (k^m - 1).
        parallel_for(out.points.size(), [&](std::size_t j) {
            PeriodicPoint pt;
            pt.x = Vec2(static_cast<double>(j) / static_cast<double>(km - 1), 0.0);
            pt.jacobian = Mat2::Zero();
            pt.jacobian(0, 0) = static_cast<double>(km);
            if (g.is_constant()) {
                pt.weight = std::pow(g.constant_value(), m);
            } else {
                cplx w = 1.0;
                long long s = static_cast<long long>(j);
                for (int i = 0; i < m; ++i) {
                    w *= g(map, static_cast<double>(s) / static_cast<double>(km - 1));
                    s = static_cast<long long>((i128(s) * k) % (km - 1));
                }
                pt.weight = w;
            }
            out.points[j] = pt;
            residual[j] = 0.0L;
        });
    } else {
        out.method = "lift-newton";
        // F(x) = T^m(x) - x is increasing from 0 to k^m - 1 on [0, 1]; the
        // fixed point with lift offset N solves F(x) = N, N = 0 .. k^m - 2.
        // The lift satisfies T(y + n) = T(y) + k n, so integer parts are peeled
        // off along the orbit and carried as C_{i+1} = k C_i + floor.
        auto eval = [&](ld x, ld target, ld& value, ld& slope) {
            ld y = x, d = 1.0L, c = 0.0L;
            for (int i = 0; i < m; ++i) {
                d *= k + kTwoPiL * eps * std::cos(kTwoPiL * y);
                ld z = k * y + eps * std::sin(kTwoPiL * y);
                ld f = std::floor(z);
                c = k * c + f;
                y = z - f;
            }
            value = (y - x) + (c - target);
            slope = d - 1.0L;
        };
        std::vector<int> failed(out.points.size(), 0);
        parallel_for(out.points.size(), [&](std::size_t j) {
            const ld target = static_cast<ld>(j);
            ld lo = 0.0L, hi = 1.0L;
            ld x = target / static_cast<ld>(km - 1);
            bool ok = false;
            for (int it = 0; it < 200; ++it) {
                ld f, df;
                eval(x, target, f, df);
                if (f == 0) {
                    ok = true;
                    break;
                }
                if (f < 0) lo = std::max(lo, x);
                else hi = std::min(hi, x);
                ld next = x - f / df;
                if (!(next > lo && next < hi)) next = 0.5L * (lo + hi);
                if (std::abs(next - x) <= 4e-19L || hi - lo <= 4e-19L) {
                    x = next;
                    ok = true;
                    break;
                }
                x = next;
            }
            if (!ok) failed[j] = 1;
            PeriodicPoint pt;
            double xd = static_cast<double>(wrap_ld(x));
            pt.x = Vec2(xd, 0.0);
            ld y = xd, d = 1.0L;
            cplx w = 1.0;
            for (int i = 0; i < m; ++i) {
                w *= g(map, static_cast<double>(wrap_ld(y)));
                d *= k + kTwoPiL * eps * std::cos(kTwoPiL * y);
                y = k * y + eps * std::sin(kTwoPiL * y);
            }
            pt.jacobian = Mat2::Zero();
            pt.jacobian(0, 0) = static_cast<double>(d);
            pt.weight = w;
            residual[j] = circle_gap(y, static_cast<ld>(xd));
            out.points[j] = pt;
        });
        for (std::size_t j = 0; j < failed.size(); ++j)
            if (failed[j]) {
                std::ostringstream os;
                os << "Newton did not converge for the period-" << m << " point with lift offset " << j;
                throw NumericalError(os.str());
            }
    }
    for (ld r : residual) out.max_residual = std::max(out.max_residual, static_cast<double>(r));
    return out;
}

// ---- toral -----------------------------------------------------------------

struct LatticePoint {
    long long v1, v2;  // x = v / D
};

// All x in [0,1)^2 with (A^m - I) x integral, as exact rationals v / D.
std::vector<LatticePoint> lattice_solutions(const dynamics::Mat2i& b, long long& d_out) {
    i128 det = i128(b(0, 0)) * b(1, 1) - i128(b(0, 1)) * b(1, 0);
    require(det != 0, "A^m - I is singular: the map has non-isolated periodic points");
    const long long d = static_cast<long long>(det < 0 ? -det : det);
    d_out = d;
    // Column Hermite form B U = [[h11, h12], [0, h22]] by an extended gcd on row 2.
    long long r0 = b(1, 0), r1 = b(1, 1);
    long long old_r = r0, r = r1, old_s = 1, s = 0, old_t = 0, t = 1;
    while (r != 0) {
        long long qt = old_r / r;
        long long tmp = old_r - qt * r; old_r = r; r = tmp;
        tmp = old_s - qt * s; old_s = s; s = tmp;
        tmp = old_t - qt * t; old_t = t; t = tmp;
    }
    long long gg = old_r;  // gcd with sign; old_s r0 + old_t r1 = gg
    if (gg < 0) {
        gg = -gg;
        old_s = -old_s;
        old_t = -old_t;
    }
    // new col1 = (r1/gg) col1 - (r0/gg) col2 has zero second entry.
    i128 h11 = i128(r1 / gg) * b(0, 0) - i128(r0 / gg) * b(0, 1);
    const long long a1 = static_cast<long long>(h11 < 0 ? -h11 : h11);
    const long long a2 = gg;
    require(i128(a1) * a2 == i128(d), "lattice reduction inconsistent with det(A^m - I)");
    // adj(B) z mod D gives D x for coset representatives z = (i, j), 0 <= i < a1, 0 <= j < a2.
    std::vector<LatticePoint> pts(static_cast<std::size_t>(d));
    const i128 sg = det < 0 ? -1 : 1;
    parallel_for(static_cast<std::size_t>(a1), [&](std::size_t i) {
        for (long long j = 0; j < a2; ++j) {
            i128 z1 = static_cast<long long>(i), z2 = j;
            i128 w1 = sg * (i128(b(1, 1)) * z1 - i128(b(0, 1)) * z2);
            i128 w2 = sg * (-i128(b(1, 0)) * z1 + i128(b(0, 0)) * z2);
            pts[i * a2 + j] = {floor_mod(w1, d), floor_mod(w2, d)};
        }
    });
    return pts;
}

PeriodicOrbitData toral_points(const MapModel& map, int m, const Weight& g) {
    require(m >= 1 && m <= 14, "toral periods are limited to 1 <= m <= 14");
    const auto& a = map.matrix();
    dynamics::Mat2i am = mat_pow(a, m);
    dynamics::Mat2i b = am - dynamics::Mat2i::Identity();
    long long d = 0;
    auto lattice = lattice_solutions(b, d);

    PeriodicOrbitData out;
    out.m = m;
    out.expected_count = d;
    out.points.resize(lattice.size());
    std::vector<double> residual(lattice.size(), 0.0);

    if (map.is_linear()) {
        out.method = "lattice";
        Mat2 jac = am.cast<double>();
        parallel_for(lattice.size(), [&](std::size_t idx) {
            auto [v1, v2] = lattice[idx];
            PeriodicPoint pt;
            pt.x = Vec2(double(v1) / double(d), double(v2) / double(d));
            pt.jacobian = jac;
            cplx w = 1.0;
            if (g.is_constant()) {
                w = std::pow(g.constant_value(), m);
            } else {
                long long c1 = v1, c2 = v2;
                for (int i = 0; i < m; ++i) {
                    w *= g(map, Vec2(double(c1) / double(d), double(c2) / double(d)));
                    long long n1 = floor_mod(i128(a(0, 0)) * c1 + i128(a(0, 1)) * c2, d);
                    long long n2 = floor_mod(i128(a(1, 0)) * c1 + i128(a(1, 1)) * c2, d);
                    c1 = n1;
                    c2 = n2;
                }
            }
            pt.weight = w;
            // exact check of the period in integers
            long long e1 = floor_mod(i128(am(0, 0)) * v1 + i128(am(0, 1)) * v2, d);
            long long e2 = floor_mod(i128(am(1, 0)) * v1 + i128(am(1, 1)) * v2, d);
            residual[idx] = (e1 == v1 && e2 == v2) ? 0.0 : 1.0;
            out.points[idx] = pt;
        });
    } else {
        out.method = "homotopy-newton";
        const double delta = map.delta();
        constexpr int kSteps = 8;
        std::vector<int> failed(lattice.size(), 0);
        parallel_for(lattice.size(), [&](std::size_t idx) {
            auto [v1, v2] = lattice[idx];
            ld x1 = ld(v1) / ld(d), x2 = ld(v2) / ld(d);
            // integer lift offset n = A^m x - x at delta = 0
            const ld n1 = ld((i128(am(0, 0)) * v1 + i128(am(0, 1)) * v2 - v1) / d);
            const ld n2 = ld((i128(am(1, 0)) * v1 + i128(am(1, 1)) * v2 - v2) / d);
            for (int step = 1; step <= kSteps && !failed[idx]; ++step) {
                const ld dl = ld(delta) * step / kSteps;
                bool ok = false;
                for (int it = 0; it < 60; ++it) {
                    // G(x) = T^m(x) - x - n with integer parts peeled off along the orbit.
                    ld y1 = x1, y2 = x2, c1 = 0, c2 = 0;
                    ld j00 = 1, j01 = 0, j10 = 0, j11 = 1;
                    for (int i = 0; i < m; ++i) {
                        ld d00 = a(0, 0) + dl * std::cos(kTwoPiL * y1), d01 = a(0, 1);
                        ld d10 = a(1, 0), d11 = a(1, 1) + dl * std::cos(kTwoPiL * y2);
                        ld t00 = d00 * j00 + d01 * j10, t01 = d00 * j01 + d01 * j11;
                        ld t10 = d10 * j00 + d11 * j10, t11 = d10 * j01 + d11 * j11;
                        j00 = t00; j01 = t01; j10 = t10; j11 = t11;
                        ld z1 = a(0, 0) * y1 + a(0, 1) * y2 + dl / kTwoPiL * std::sin(kTwoPiL * y1);
                        ld z2 = a(1, 0) * y1 + a(1, 1) * y2 + dl / kTwoPiL * std::sin(kTwoPiL * y2);
                        ld f1 = std::floor(z1), f2 = std::floor(z2);
                        // T(y + n) = T(y) + A n: carry C_{i+1} = A C_i + floor
                        ld e1 = a(0, 0) * c1 + a(0, 1) * c2 + f1, e2 = a(1, 0) * c1 + a(1, 1) * c2 + f2;
                        c1 = e1; c2 = e2;
                        y1 = z1 - f1; y2 = z2 - f2;
                    }
                    ld g1 = (y1 - x1) + (c1 - n1), g2 = (y2 - x2) + (c2 - n2);
                    ld m00 = j00 - 1, m11 = j11 - 1, det = m00 * m11 - j01 * j10;
                    ld dx1 = (m11 * g1 - j01 * g2) / det, dx2 = (-j10 * g1 + m00 * g2) / det;
                    x1 -= dx1;
                    x2 -= dx2;
                    if (std::abs(dx1) + std::abs(dx2) < 1e-18L && std::abs(g1) + std::abs(g2) < 1e-12L) {
                        ok = true;
                        break;
                    }
                }
                if (!ok) failed[idx] = step;
            }
            PeriodicPoint pt;
            Vec2 x(double(wrap_ld(x1)), double(wrap_ld(x2)));
            pt.x = x;
            Mat2 jac = Mat2::Identity();
            cplx w = 1.0;
            ld y1 = x[0], y2 = x[1];
            for (int i = 0; i < m; ++i) {
                Vec2 yd(double(wrap_ld(y1)), double(wrap_ld(y2)));
                w *= g(map, yd);
                jac = map.derivative(yd) * jac;
                ld z1 = a(0, 0) * y1 + a(0, 1) * y2 + ld(delta) / kTwoPiL * std::sin(kTwoPiL * y1);
                ld z2 = a(1, 0) * y1 + a(1, 1) * y2 + ld(delta) / kTwoPiL * std::sin(kTwoPiL * y2);
                y1 = z1;
                y2 = z2;
            }
            pt.jacobian = jac;
            pt.weight = w;
            residual[idx] = double(std::max(circle_gap(y1, ld(x[0])), circle_gap(y2, ld(x[1]))));
            out.points[idx] = pt;
        });
        for (std::size_t i = 0; i < failed.size(); ++i)
            if (failed[i]) {
                std::ostringstream os;
                os << "homotopy Newton failed at step " << failed[i] << "/8 for the orbit seeded at ("
                   << lattice[i].v1 << "/" << d << ", " << lattice[i].v2 << "/" << d << ")";
                throw NumericalError(os.str());
            }
        // Continuation must not merge orbits.
        std::set<std::pair<long long, long long>> seen;
        for (const auto& pt : out.points) {
            auto key = std::make_pair(std::llround(pt.x[0] * 1e9) % 1000000000LL,
                                      std::llround(pt.x[1] * 1e9) % 1000000000LL);
            if (!seen.insert(key).second) throw NumericalError("homotopy continuation merged two periodic points");
        }
    }
    for (double r : residual) out.max_residual = std::max(out.max_residual, r);
    return out;
}

}  // namespace

long long periodic_count(const MapModel& map, int m) {
    require(m >= 1, "period must be positive");
    if (map.dim() == 1) return ipow(map.degree(), m) - 1;
    dynamics::Mat2i b = mat_pow(map.matrix(), m) - dynamics::Mat2i::Identity();
    i128 det = i128(b(0, 0)) * b(1, 1) - i128(b(0, 1)) * b(1, 0);
    return static_cast<long long>(det < 0 ? -det : det);
}

PeriodicOrbitData periodic_points(const MapModel& map, int m, const Weight& g) {
    auto out = map.dim() == 1 ? circle_points(map, m, g) : toral_points(map, m, g);
    if (static_cast<long long>(out.points.size()) != out.expected_count)
        throw NumericalError("periodic point count differs from the closed form");
    if (out.max_residual >= 1e-10) {
        std::ostringstream os;
        os << "periodic point residual " << out.max_residual << " at period " << m;
        throw NumericalError(os.str());
    }
    return out;
}

}  // namespace rlab::determinants
