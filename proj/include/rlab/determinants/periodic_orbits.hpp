#pragma once

#include <string>
#include <vector>

#include "rlab/dynamics/maps.hpp"

namespace rlab::determinants {

using dynamics::cplx;
using dynamics::MapModel;
using dynamics::Mat2;
using dynamics::Vec2;
using dynamics::Weight;

struct PeriodicPoint {
    Vec2 x{0, 0};          // second coordinate unused on the circle
    Mat2 jacobian;         // DT^m(x); (0,0) entry on the circle
    cplx weight{1.0, 0.0}; // g^{(m)}(x)
};

struct PeriodicOrbitData {
    int m = 0;
    std::vector<PeriodicPoint> points;
    std::string method;     // "closed-form", "lift-newton", "lattice", "homotopy-newton"
    long long expected_count = 0;
    double max_residual = 0.0;  // max |T^m(x) - x| on the circle / torus
};

// Closed-form counts: k^m - 1 (expanding circle), |det(A^m - I)| (toral).
long long periodic_count(const MapModel& map, int m);

// Fixed points of T^m with their Jacobians and Birkhoff weights of g.
PeriodicOrbitData periodic_points(const MapModel& map, int m, const Weight& g = Weight::constant(1.0));

}  // namespace rlab::determinants
