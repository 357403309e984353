#pragma once

#include <optional>
#include <vector>

#include "rlab/transfer/operator_matrix.hpp"

namespace rlab::transfer {

struct ResonanceConfig {
    int n_f = 32;
    int refinement = 2;           // finer truncation is refinement * n_f
    double stability_tol = 1e-6;  // absolute distance to the nearest fine eigenvalue
    double margin = 0.05;         // accepted iff |lambda| > filter + margin
    double p = 2.0;
    double q = -1.0;
    std::optional<dyadic::ConeSystem> cones;  // required for toral maps
    int quadrature_factor = 8;    // quadrature nodes per retained mode (expanding)
    int radius_m = 10;            // orbit length used to estimate R(T^{-1},g) / R(T,g)
    int radius_points = 64;       // base points per axis for that estimate
};

struct Resonance {
    cplx value;
    int multiplicity = 1;      // size of the cluster of coarse eigenvalues within stability_tol
    double stability = 0.0;    // distance to the nearest eigenvalue at the finer truncation
    double residual = 0.0;     // inverse-iteration residual at the coarse truncation, relative to |M|
};

struct ResonanceReport {
    std::vector<Resonance> accepted;
    double filter = 0.0;
    double margin = 0.0;
    double radius_factor = 0.0;  // R(T^{-1},g) or R(T,g)
    double rate_factor = 0.0;    // lambda_s^p or max(lambda_s^p, nu_u^q)
    int n_coarse = 0;
    int n_fine = 0;
    std::vector<cplx> coarse_spectrum;
    std::vector<cplx> fine_spectrum;
};

// R(T^{-1},g) = lim (sup_x sum_{T^m y = x} |g^{(m)}(y)|)^{1/m}, estimated at a fixed m.
double spectral_radius_expanding(const MapModel& map, const Weight& g, int m, int points);
// R(T,g) = lim (sup_x |g^{(m)}(x)|)^{1/m}, estimated at a fixed m.
double spectral_radius_hyperbolic(const MapModel& map, const Weight& g, int m, int points);

// Essential-radius filter: R(T^{-1},g) lambda_s^p (expanding) or
// R(T,g) max(lambda_s^p, nu_u^q) (toral).
double essential_filter(const MapModel& map, const Weight& g, const ResonanceConfig& cfg,
                        double* radius_out = nullptr, double* rate_out = nullptr);

ResonanceReport resonances(const MapModel& map, const Weight& g, const ResonanceConfig& cfg);

}  // namespace rlab::transfer
