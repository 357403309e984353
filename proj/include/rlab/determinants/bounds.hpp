#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "rlab/dynamics/maps.hpp"

namespace rlab::determinants {

using dynamics::MapModel;
using dynamics::Weight;

struct QuadratureConfig {
    int points = 256;           // per axis, tensor trapezoid
    bool monte_carlo = false;
    int samples = 65536;
    std::uint64_t seed = 1;
};

struct Integral {
    double value = 0.0;
    double std_error = 0.0;     // Monte Carlo only
};

// rho^{p,q}(T,g,m) = int |g^{(m)}(x)| lambda^{(p,q,m)}(x) dx over the torus.
Integral rho_pqm(const MapModel& map, const Weight& g, double p, double q, int m,
                 const QuadratureConfig& quad = {});

struct Limit {
    double value = 0.0;
    double cauchy = 0.0;        // max |s_{i+1} - s_i| over the final half
};

// roots[i] = rho(m_i)^{1/m_i}; needs at least four entries.
Limit rho_pq_limit(const std::vector<double>& roots);

inline constexpr double kInfiniteT = std::numeric_limits<double>::infinity();

struct BoundEstimate {
    double p = 0.0, q = 0.0;
    std::vector<int> ms;
    std::vector<double> rho_roots;       // rho(m)^{1/m}
    Limit rho;
    std::vector<double> ts;
    std::vector<Limit> R;                // one per t
};

// (sup_x |det DT^m|^{1/t} |g^{(m)}| lambda^{(p,q,m)})^{1/m} on a points^2 grid for
// every m in ms; value at the largest m, Cauchy diagnostic over the sequence.
Limit R_pqt(const MapModel& map, const Weight& g, double p, double q, double t,
            const std::vector<int>& ms, int points = 64);

BoundEstimate bound_estimate(const MapModel& map, const Weight& g, double p, double q,
                             const std::vector<int>& ms, const std::vector<double>& ts,
                             const QuadratureConfig& quad = {}, int sup_points = 64);

}  // namespace rlab::determinants
