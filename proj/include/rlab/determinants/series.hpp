#pragma once

#include <string>
#include <vector>

#include "rlab/determinants/periodic_orbits.hpp"

namespace rlab::determinants {

// t_m = sum g^{(m)}(x) / |det(1 - DT^m(x))| (toral) or
//       sum g^{(m)}(x) / |1 - 1/(T^m)'(x)|   (expanding, operator L_{T^{-1},g}).
cplx trace_sum(const MapModel& map, const Weight& g, int m);
cplx trace_from_orbits(const MapModel& map, const PeriodicOrbitData& orbits);

// a_0 = 1, m a_m = -sum_{j=1}^m t_j a_{m-j}.
std::vector<cplx> determinant_coefficients(const std::vector<cplx>& traces);
// Inverse recursion: t_m from a_0..a_M (requires a_0 = 1).
std::vector<cplx> traces_from_coefficients(const std::vector<cplx>& coeffs, int count);

inline constexpr double kReliabilityCap = 1e3;
inline constexpr double kTailTolerance = 1e-6;

struct DeterminantSeries {
    std::vector<cplx> traces;  // t_1 .. t_M
    std::vector<cplx> coeffs;  // a_0 .. a_M
    double reliability_radius = 0.0;
    double decay_rate = 0.0;   // fitted |a_m| ~ C rate^m over the last third
    bool exact = false;        // built from a known polynomial
    std::string diagnostic;
};

// Largest r <= kReliabilityCap with estimated tail sum_{m>M} |a_m| r^m < kTailTolerance.
double reliability_radius(const std::vector<cplx>& coeffs, double* rate_out = nullptr,
                          std::string* diagnostic = nullptr);

DeterminantSeries series_from_traces(std::vector<cplx> traces);
DeterminantSeries series_from_polynomial(std::vector<cplx> coeffs);
DeterminantSeries determinant_series(const MapModel& map, const Weight& g, int max_m);

struct DeterminantZero {
    cplx z;
    int order = 1;
    double agreement = 0.0;  // distance to the nearest zero of the M-2 truncation
};

struct ZeroReport {
    std::vector<DeterminantZero> zeros;
    std::string diagnostic;
};

// Roots of the truncated series inside the reliability radius, stable between
// truncation orders M and M-2 (1e-8), with cluster sizes as orders.
ZeroReport determinant_zeros(const DeterminantSeries& series);

}  // namespace rlab::determinants
