#include <cmath>
#include <cstdlib>

#include "doctest.h"
#include "rlab/common/errors.hpp"
#include "rlab/determinants/bounds.hpp"
#include "rlab/determinants/matching.hpp"
#include "rlab/determinants/periodic_orbits.hpp"
#include "rlab/determinants/series.hpp"
#include "rlab/transfer/operator_matrix.hpp"

using namespace rlab::determinants;
using rlab::dyadic::ConeSystem;
using rlab::dynamics::Vec2;

namespace {

const double kLam = (3.0 + std::sqrt(5.0)) / 2.0;
const double kDeg = std::acos(-1.0) / 180.0;

MapModel doubling(double eps = 0.0) { return MapModel::expanding_circle(2, eps); }
MapModel cat() { return MapModel::linear_toral(MapModel::cat_matrix()); }
MapModel perturbed_cat(double delta) { return MapModel::perturbed_toral(MapModel::cat_matrix(), delta); }

ConeSystem cat_cones() {
    ConeSystem c;
    c.plus = {std::atan(-(1.0 + std::sqrt(5.0)) / 2.0), 20 * kDeg};
    c.minus = {std::atan((std::sqrt(5.0) - 1.0) / 2.0), 25 * kDeg};
    return c;
}

// Lucas numbers: tr(A^m) = L_{2m} for the cat matrix, so |det(A^m - I)| = L_{2m} - 2.
long long cat_count_oracle(int m) {
    long long a = 2, b = 1;
    for (int i = 0; i < 2 * m; ++i) {
        long long c = a + b;
        a = b;
        b = c;
    }
    return a - 2;
}

std::vector<cplx> constant_traces(int count, cplx value) { return std::vector<cplx>(count, value); }

}  // namespace

TEST_CASE("doubling periodic points of period 2") {
    auto d = periodic_points(doubling(), 2);
    REQUIRE(d.points.size() == 3);
    const double expect[] = {0.0, 1.0 / 3.0, 2.0 / 3.0};
    for (int j = 0; j < 3; ++j) {
        CHECK(d.points[j].x(0) == doctest::Approx(expect[j]).epsilon(1e-15));
        CHECK(d.points[j].jacobian(0, 0) == 4.0);
    }
}

TEST_CASE("cat map periodic points of period 1 and 2") {
    auto p1 = periodic_points(cat(), 1);
    REQUIRE(p1.points.size() == 1);
    CHECK(p1.points[0].x.norm() == 0.0);
    CHECK(periodic_points(cat(), 2).points.size() == 5);
}

TEST_CASE("count identities and residuals") {
    for (int m = 1; m <= 14; ++m) {
        CHECK(periodic_count(doubling(), m) == (1LL << m) - 1);
        CHECK(static_cast<long long>(periodic_points(doubling(), m).points.size()) == (1LL << m) - 1);
    }
    auto tripling = MapModel::expanding_circle(3, 0.05);
    for (int m = 1; m <= 8; ++m) {
        auto d = periodic_points(tripling, m);
        long long k = 1;
        for (int i = 0; i < m; ++i) k *= 3;
        CHECK(static_cast<long long>(d.points.size()) == k - 1);
        CHECK(d.max_residual < 1e-10);
        for (const auto& p : d.points)
            CHECK(std::abs(rlab::dynamics::circle_residual(tripling.iterate(p.x(0), m), p.x(0))) < 1e-10);
    }
    for (int m = 1; m <= 12; ++m) {
        CHECK(periodic_count(cat(), m) == cat_count_oracle(m));
        auto d = periodic_points(cat(), m);
        CHECK(static_cast<long long>(d.points.size()) == cat_count_oracle(m));
        CHECK(d.method == "lattice");
    }
    auto pc = perturbed_cat(0.01);
    for (int m = 1; m <= 6; ++m) {
        auto d = periodic_points(pc, m);
        CHECK(static_cast<long long>(d.points.size()) == cat_count_oracle(m));
        CHECK(d.max_residual < 1e-10);
        for (int i = 0; i < static_cast<int>(d.points.size()); i += 7)
            CHECK(rlab::dynamics::torus_residual(pc.iterate(d.points[i].x, m), d.points[i].x).norm() < 1e-10);
    }
}

TEST_CASE("periodic points reject out-of-range periods") {
    CHECK_THROWS_AS(periodic_points(doubling(), 0), rlab::ValidationError);
    CHECK_THROWS_AS(periodic_points(doubling(), 21), rlab::ValidationError);
    CHECK_THROWS_AS(periodic_points(cat(), 15), rlab::ValidationError);
}

TEST_CASE("closed-form traces") {
    for (int m = 1; m <= 14; ++m) {
        cplx t = trace_sum(doubling(), Weight::constant(0.5), m);
        CHECK(std::abs(t - 1.0) < 1e-12);
        cplx t1 = trace_sum(doubling(), Weight::constant(1.0), m);
        CHECK(std::abs(t1 - std::ldexp(1.0, m)) < 1e-12 * std::ldexp(1.0, m));
    }
    for (int m = 1; m <= 12; ++m) CHECK(trace_sum(cat(), Weight::constant(1.0), m) == cplx(1.0));
}

TEST_CASE("expanding traces agree with the trace of powers of the Fourier matrix") {
    // For analytic expanding maps the truncated matrix traces converge to the
    // periodic-orbit sums, which gives an oracle independent of orbit enumeration.
    auto map = doubling(0.02);
    auto g = Weight::inverse_derivative();
    auto op = rlab::transfer::assemble_expanding(map, g, 48);
    Eigen::MatrixXcd power = op.m;
    for (int m = 1; m <= 6; ++m) {
        cplx t = trace_sum(map, g, m);
        CHECK(std::abs(power.trace() - t) < 1e-9);
        power = power * op.m;
    }
}

TEST_CASE("determinant coefficient recursion examples") {
    auto a = determinant_coefficients(constant_traces(10, 1.0));
    CHECK(a[0] == cplx(1.0));
    CHECK(std::abs(a[1] + 1.0) < 1e-15);
    for (int m = 2; m <= 10; ++m) CHECK(std::abs(a[m]) < 1e-14);

    std::vector<cplx> pow2;
    for (int m = 1; m <= 12; ++m) pow2.push_back(std::ldexp(1.0, m));
    auto b = determinant_coefficients(pow2);
    CHECK(std::abs(b[1] + 2.0) < 1e-14);
    for (int m = 2; m <= 12; ++m) CHECK(std::abs(b[m]) < 1e-9);

    auto z = determinant_coefficients(constant_traces(6, 0.0));
    CHECK(z[0] == cplx(1.0));
    for (int m = 1; m <= 6; ++m) CHECK(z[m] == cplx(0.0));
}

TEST_CASE("series invariants: a_0 = 1, recursion residual, log re-expansion") {
    auto s = determinant_series(doubling(0.02), Weight::inverse_derivative(), 14);
    REQUIRE(s.coeffs.size() == 15);
    CHECK(s.coeffs[0] == cplx(1.0));
    for (int m = 1; m <= 14; ++m) {
        cplx r = static_cast<double>(m) * s.coeffs[m];
        for (int j = 1; j <= m; ++j) r += s.traces[j - 1] * s.coeffs[m - j];
        CHECK(std::abs(r) < 1e-13);
    }
    auto back = traces_from_coefficients(s.coeffs, 7);
    for (int m = 1; m <= 7; ++m) CHECK(std::abs(back[m - 1] - s.traces[m - 1]) < 1e-9 * std::max(1.0, std::abs(s.traces[m - 1])));
    CHECK(s.reliability_radius > 1.0);
}

TEST_CASE("determinant zeros of polynomial examples") {
    auto z1 = determinant_zeros(series_from_polynomial({1.0, -2.0}));
    REQUIRE(z1.zeros.size() == 1);
    CHECK(std::abs(z1.zeros[0].z - 0.5) < 1e-15);
    CHECK(z1.zeros[0].order == 1);

    auto z2 = determinant_zeros(series_from_polynomial({1.0, -1.5, 0.5}));
    REQUIRE(z2.zeros.size() == 2);
    CHECK(std::abs(z2.zeros[0].z - 1.0) < 1e-14);
    CHECK(std::abs(z2.zeros[1].z - 2.0) < 1e-14);

    auto z3 = determinant_zeros(series_from_polynomial({1.0, 0.0, 0.0, 0.0}));
    CHECK(z3.zeros.empty());
    CHECK_FALSE(z3.diagnostic.empty());

    auto dbl = determinant_zeros(series_from_polynomial({1.0, -2.0, 1.0}));
    REQUIRE(dbl.zeros.size() == 1);
    CHECK(dbl.zeros[0].order == 2);
}

TEST_CASE("zeros from trace series respect the reliability radius") {
    auto s = series_from_traces(constant_traces(14, 1.0));
    auto z = determinant_zeros(s);
    REQUIRE(z.zeros.size() == 1);
    CHECK(std::abs(z.zeros[0].z - 1.0) < 1e-12);
    // Truncation of exp(-sum z^m 3^m / m) = 1 - 3z is exact; radius is capped.
    std::vector<cplx> t;
    for (int m = 1; m <= 10; ++m) t.push_back(std::pow(3.0, m));
    auto s3 = series_from_traces(t);
    auto z3 = determinant_zeros(s3);
    REQUIRE(z3.zeros.size() == 1);
    CHECK(std::abs(z3.zeros[0].z - 1.0 / 3.0) < 1e-10);
    for (const auto& zz : determinant_zeros(determinant_series(doubling(0.02), Weight::inverse_derivative(), 14)).zeros)
        CHECK(std::abs(zz.z) < determinant_series(doubling(0.02), Weight::inverse_derivative(), 14).reliability_radius);
}

TEST_CASE("rho^{p,q} examples on the cat map") {
    auto g = Weight::constant(1.0);
    CHECK(std::abs(rho_pqm(cat(), g, 1, -1, 1).value - 1.0 / kLam) < 1e-12);
    CHECK(std::abs(rho_pqm(cat(), g, 1, -1, 8).value - std::pow(kLam, -8)) < 1e-14);
    CHECK(rho_pqm(cat(), Weight::constant(0.0), 1, -1, 3).value == 0.0);
    QuadratureConfig mc;
    mc.monte_carlo = true;
    mc.samples = 1000;
    auto r = rho_pqm(cat(), g, 1, -1, 2, mc);
    CHECK(std::abs(r.value - std::pow(kLam, -2)) < 1e-12);
    CHECK(r.std_error < 1e-12);
}

TEST_CASE("rho_pq_limit examples") {
    auto c = rho_pq_limit({0.3, 0.3, 0.3, 0.3});
    CHECK(c.value == 0.3);
    CHECK(c.cauchy == 0.0);
    CHECK_THROWS_AS(rho_pq_limit({1.0, 1.0, 1.0}), rlab::ValidationError);
    std::vector<double> roots;
    for (int m : {2, 4, 6, 8})
        roots.push_back(std::pow(rho_pqm(cat(), Weight::constant(1.0), 1, -1, m).value, 1.0 / m));
    auto l = rho_pq_limit(roots);
    CHECK(std::abs(l.value - 1.0 / kLam) < 1e-12);
    CHECK(l.cauchy < 1e-12);
}

TEST_CASE("R^{p,q,t} examples and monotonicity") {
    auto g = Weight::constant(1.0);
    std::vector<int> ms{1, 2, 4, 8};
    CHECK(std::abs(R_pqt(cat(), g, 1, -1, kInfiniteT, ms, 16).value - 1.0 / kLam) < 1e-12);
    CHECK(std::abs(R_pqt(cat(), g, 1, -1, 2.0, ms, 16).value - 1.0 / kLam) < 1e-12);
    CHECK(R_pqt(cat(), Weight::constant(0.0), 1, -1, 2.0, ms, 16).value == 0.0);
    CHECK_THROWS_AS(R_pqt(cat(), g, 1, -1, 1.0, ms, 16), rlab::ValidationError);

    for (const auto& map : {cat(), perturbed_cat(0.01)}) {
        for (auto [p, q] : {std::pair{1.0, -1.0}, std::pair{2.0, -1.0}, std::pair{0.5, -0.5}}) {
            QuadratureConfig quad;
            quad.points = 32;
            auto b = bound_estimate(map, g, p, q, {1, 2, 3, 4}, {2.0, 4.0, kInfiniteT}, quad, 32);
            for (const auto& r : b.R) CHECK(b.rho.value <= r.value + 1e-6);
            for (double v : b.rho_roots) CHECK((std::isfinite(v) && v > 0));
        }
    }
}

TEST_CASE("perturbed cat Cauchy diagnostic") {
    QuadratureConfig quad;
    quad.points = 64;
    auto b = bound_estimate(perturbed_cat(0.01), Weight::constant(1.0), 1, -1, {1, 2, 3, 4, 5, 6, 7, 8}, {}, quad);
    CHECK(b.rho.cauchy < 1e-2);
}

TEST_CASE("zero/resonance matching on the closed-form benchmarks") {
    rlab::transfer::ResonanceConfig cfg;
    cfg.n_f = 32;
    auto rep = rlab::transfer::resonances(doubling(), Weight::constant(0.5), cfg);
    auto s = determinant_series(doubling(), Weight::constant(0.5), 14);
    double radius = std::min(s.reliability_radius, 1.0 / (rep.filter + rep.margin));
    auto t = compare_zeros_eigenvalues(rep, s, radius);
    REQUIRE(t.pairs.size() == 1);
    CHECK(t.max_distance < 1e-8);
    CHECK(t.perfect());

    rlab::transfer::ResonanceConfig cc;
    cc.n_f = 6;
    cc.p = 1.0;
    cc.q = -1.0;
    cc.cones = cat_cones();
    auto crep = rlab::transfer::resonances(cat(), Weight::constant(1.0), cc);
    auto cs = determinant_series(cat(), Weight::constant(1.0), 8);
    auto ct = compare_zeros_eigenvalues(crep, cs, std::min(cs.reliability_radius, 1.0 / (crep.filter + crep.margin)));
    REQUIRE(ct.pairs.size() == 1);
    CHECK(std::abs(ct.pairs[0].resonance - 1.0) < 1e-10);
    CHECK(ct.perfect());

    auto empty = compare_zeros_eigenvalues(rlab::transfer::ResonanceReport{},
                                           series_from_traces(constant_traces(6, 0.0)), 10.0);
    CHECK(empty.pairs.empty());
    CHECK(empty.perfect());
}

TEST_CASE("matching reports unmatched items on both sides") {
    rlab::transfer::ResonanceReport rep;
    rep.accepted.push_back({cplx(0.5), 1, 0.0, 0.0});
    auto t = compare_zeros_eigenvalues(rep, series_from_polynomial({1.0, -1.0}), 10.0);
    CHECK(t.pairs.empty());
    CHECK(t.unmatched_zeros.size() == 1);
    CHECK(t.unmatched_resonances.size() == 1);
}

TEST_CASE("perturbed doubling: zeros and resonances agree beyond the leading pair") {
    auto map = doubling(0.02);
    auto g = Weight::inverse_derivative();
    rlab::transfer::ResonanceConfig cfg;
    cfg.n_f = 64;
    cfg.p = 8.0;
    auto rep = rlab::transfer::resonances(map, g, cfg);
    auto s = determinant_series(map, g, 12);
    auto t = compare_zeros_eigenvalues(rep, s, std::min(s.reliability_radius, 1.0 / (rep.filter + rep.margin)));
    CHECK(t.pairs.size() == 3);
    CHECK(t.perfect());
    CHECK(t.max_distance < 1e-5);
}
