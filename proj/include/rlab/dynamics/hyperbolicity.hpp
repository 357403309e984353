#pragma once

#include <functional>
#include <optional>
#include <string>

#include "rlab/dyadic/cones.hpp"
#include "rlab/dynamics/maps.hpp"

namespace rlab::dynamics {

inline constexpr int kDefaultPreOrbit = 30;

// Unit vectors spanning approximate E^s(x), E^u(x). Exact eigenvectors for
// linear maps; otherwise n_pre steps of power iteration of DT^{-1} along the
// forward orbit (stable) or of DT along the backward orbit (unstable).
Vec2 stable_direction(const MapModel& map, const Vec2& x, int n_pre = kDefaultPreOrbit);
Vec2 unstable_direction(const MapModel& map, const Vec2& x, int n_pre = kDefaultPreOrbit);

struct Exponents {
    double lambda = 1.0;  // |DT^m_x restricted to E^s(x)|
    double nu = 1.0;      // expansion of DT^m_x on E^u(x)
    int n_pre = kDefaultPreOrbit;
};

Exponents hyperbolicity_exponents(const MapModel& map, const Vec2& x, int m,
                                  int n_pre = kDefaultPreOrbit);

// max(lambda_x(T^m)^p, nu_x(T^m)^q)
double lambda_pqm(const MapModel& map, const Vec2& x, double p, double q, int m,
                  int n_pre = kDefaultPreOrbit);
double lambda_pqm(const Exponents& e, double p, double q);

// Effective rates from finite orbits: lambda_s = sup_x lambda_x(T^m)^{1/m},
// nu_u = inf_x nu_x(T^m)^{1/m} on a points^2 grid, and the smallest C with
// lambda_x(T^j) <= C lambda_s^j, nu_x(T^j) >= C^{-1} nu_u^j for j <= m.
struct Rates {
    double lambda_s = 1.0;
    double nu_u = 1.0;
    double c_eff = 1.0;
    int m = 0;
};
Rates estimate_rates(const MapModel& map, int m = 6, int points = 8);

// A local diffeomorphism T with its Jacobian, as seen by the local transfer
// operator L u = gamma * (u o T). One-dimensional branches use only the first
// coordinate and the (0,0) Jacobian entry.
struct LocalBranch {
    int dim = 1;
    std::function<Vec2(const Vec2&)> eval;
    std::function<Mat2(const Vec2&)> jacobian;
    std::optional<Mat2i> integer_linear;  // set for exact lattice actions
    std::string label;

    static LocalBranch scaling(double c);
    static LocalBranch identity(int dim);
    static LocalBranch from_map(const MapModel& map);
    static LocalBranch linear(const Mat2& a, std::string label = "linear");
    // y -> c y + a sin(2 pi y)
    static LocalBranch perturbed_scaling(double c, double a);
};

struct SampleGrid {
    int angles = 720;
    int points = 64;  // per axis
    Vec2 lo{0.0, 0.0};
    Vec2 hi{1.0, 1.0};
};

// Weakest contraction: sup_x sup { |DT^tr xi| / |xi| : DT^tr xi not in Theta_- }.
double weakest_contraction(const LocalBranch& t, const std::optional<dyadic::ConeSystem>& cones,
                           const SampleGrid& grid = {});
// Weakest expansion: inf_x inf { |DT^tr xi| / |xi| : xi not in Theta_+ } (Theta'_+ if present).
double weakest_expansion(const LocalBranch& t, const std::optional<dyadic::ConeSystem>& cones,
                         const SampleGrid& grid = {});

struct ConeCheck {
    bool ok = true;
    Vec2 witness_x{0, 0};
    double witness_angle = 0.0;  // covector angle of the violation
    double worst_margin = 0.0;   // min over samples of (half_width - axis distance) of the image
};

// True iff DT_x^tr maps every unit covector outside interior(Theta_+) (or
// interior(Theta'_+) for the two-pair variant) into interior(Theta_-).
ConeCheck cone_hyperbolicity_check(const LocalBranch& t, const dyadic::ConeSystem& cones,
                                   const SampleGrid& region = {}, bool two_pair = false);

}  // namespace rlab::dynamics
