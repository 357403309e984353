#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rlab/dyadic/cones.hpp"
#include "rlab/dynamics/hyperbolicity.hpp"
#include "rlab/transfer/linkage.hpp"

namespace rlab::kernels {

using dynamics::cplx;
using dynamics::LocalBranch;
using dynamics::Vec2;
using dynamics::Weight;
using dyadic::Sign;

inline constexpr int kMaxIndex1D = 9;
inline constexpr int kMaxIndex2D = 2;

// gamma(w) = exp(1 - 1/(1 - 4|w|^2)) on |w| < 1/2: a smooth bump in the centre unit cell.
Weight bump_amplitude();
// |w|^a gamma(w) (Euclidean norm): C^a-regular at the origin for non-even a, smooth elsewhere.
Weight power_bump_amplitude(double a);

// b(x) = 1 for |x| <= 1, |x|^{-d-1} otherwise.
double envelope_b(const Vec2& x, int dim);

enum class EnvelopeChoice {
    expanding,  // 2^{-(r-1) max} 2^{d min} b(2^{min}(x-y))
    appendix,   // 2^{-r max} 2^{(d+1) min} b(2^{min}(x-y))
};
const char* envelope_name(EnvelopeChoice c);

struct EnvelopeProfile {
    EnvelopeChoice choice = EnvelopeChoice::expanding;
    double r = 3.0;  // r_test: smoothness the bound is evaluated for

    double operator()(int dim, int n, int ell, const Vec2& x_minus_y) const;
};

struct KernelQuadrature {
    int factor = 16;            // w-nodes per unit length = factor * 2^{max(n,ell,3)}
    int max_factor = 64;        // Richardson doubling stops here
    double rel_tol = 1e-6;
    double box = 8.0;           // side of the periodic box carrying the frequency lattice
};

// Cone labels for the anisotropic kernel V_{n,sigma}^{ell,tau}; dimension 2 only.
struct KernelLabels {
    std::optional<dyadic::ConeSystem> cones;
    std::optional<Sign> sigma;
    std::optional<Sign> tau;
};

// V(x,y) = int int int e^{i(x-w)xi + i(T(w)-T(y))eta} gamma(w) psi_n(xi) psi_tilde_ell(eta)
// for every (x, y) in xs x ys, on the periodic box of side `box`: xi and eta run over
// the lattice (2 pi / box) Z^d, so the xi- and eta-kernels are the box periodisations
// of their free-space versions. gamma is read on the centre cell [-1/2,1/2]^d only.
// Tensor trapezoid rule; the xi and eta sums are tabulated per x and per y, so the
// cost is (|xs| + |ys|) W N + |xs| |ys| W. error_estimate is the Richardson
// difference of the w-rule between factors f and 2f.
struct KernelSample {
    int dim = 1;
    int n = 0, ell = 0;
    std::optional<Sign> sigma, tau;
    std::vector<Vec2> xs, ys;
    std::vector<cplx> values;       // values[i * ys.size() + j] = V(xs[i], ys[j])
    double error_estimate = 0.0;    // max |V_f - V_{2f}| over the grid
    double noise_floor = 0.0;       // rounding scale of the sums
    int factor = 0;                 // resolution of the reported values

    cplx at(std::size_t i, std::size_t j) const { return values[i * ys.size() + j]; }
    double sup_abs() const;
};

KernelSample kernel_grid(const LocalBranch& t, const Weight& gamma, int n, int ell,
                         const std::vector<Vec2>& xs, const std::vector<Vec2>& ys,
                         const KernelQuadrature& quad = {}, const KernelLabels& labels = {});

cplx kernel_V(const LocalBranch& t, const Weight& gamma, int n, int ell, const Vec2& x, const Vec2& y,
              const KernelQuadrature& quad = {}, const KernelLabels& labels = {});

// Fitted constant C(n,ell) = max over the grid of |V| / envelope.
struct PairBound {
    int n = 0, ell = 0;
    std::optional<Sign> sigma, tau;
    double sup_abs_v = 0.0;
    double constant = 0.0;
    Vec2 argmax_x{0, 0}, argmax_y{0, 0};
};

struct BoundCheck {
    EnvelopeProfile profile;
    std::vector<PairBound> pairs;
    double c_max = 0.0, c_min = 0.0;
    double spread = 0.0;       // c_max / c_min (NaN when some constant is 0)
    double slope = 0.0;        // d log sup|V| / d max(n,ell), natural log, pairs with max >= slope_from
    int slope_from = 4;
    int slope_points = 0;
    std::string note;
};

// All non-linked pairs (rel) with n, ell <= max_index on the xs x ys grid.
BoundCheck kernel_bound_check(const LocalBranch& t, const Weight& gamma, const transfer::LinkageRelation& rel,
                              int max_index, const EnvelopeProfile& profile,
                              const std::vector<Vec2>& xs, const std::vector<Vec2>& ys,
                              const KernelQuadrature& quad = {},
                              const std::optional<dyadic::ConeSystem>& cones = std::nullopt);

// Uniform 1D sample points a, a + h, ..., b.
std::vector<Vec2> line_points(double a, double b, int count);

// CSV with columns n, ell, sigma, tau, sup_abs_V, envelope_const, slope_window.
void export_bound_check_csv(const BoundCheck& b, const std::string& path);

}  // namespace rlab::kernels
