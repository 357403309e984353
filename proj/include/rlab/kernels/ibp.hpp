#pragma once

#include <functional>
#include <vector>

#include "rlab/dynamics/hyperbolicity.hpp"

namespace rlab::kernels {

using dynamics::cplx;
using dynamics::LocalBranch;
using dynamics::Vec2;

// One-dimensional oscillatory integrand e^{i Lambda f(w)} g(w) with supp g in [a, b].
struct Oscillatory1D {
    std::function<double(double)> f;
    std::function<double(double)> df;
    std::function<cplx(double)> g;
    double a = -1.0, b = 1.0;
};

struct RegularizedIbpConfig {
    double lambda = 16.0;
    double eps = 1.0 / 16.0;
    double delta = 0.5;          // Hoelder exponent used to normalise the mollification norms
    int nodes_per_width = 256;   // grid nodes per min(eps, 1/lambda)
    int holder_samples = 1500;   // subsample for the C^delta seminorm
};

// Both sides of the regularised integration by parts
//   int e^{iLf} g = int e^{iLf} h_eps' / L - int i f' e^{iLf} (h - h_eps),   h = i f' g / f'^2,
// on one uniform grid. h_eps = h * upsilon_eps and h_eps' = h * upsilon_eps' are discrete
// convolutions with the unit-mass exp-profile bump upsilon(s) ~ exp(-1/(1-s^2)).
struct RegularizedIbpResult {
    cplx lhs{}, rhs{};
    cplx smooth_term{}, rough_term{};   // the two integrals on the right
    double residual = 0.0;
    double h_sup = 0.0;
    double h_holder = 0.0;              // sup|h| + delta-Hoelder seminorm on the subsample
    double mollify_error = 0.0;         // ||h - h_eps||_inf
    double mollified_derivative = 0.0;  // ||h_eps'||_inf
    double c_error = 0.0;               // mollify_error / (h_holder eps^delta)
    double c_derivative = 0.0;          // mollified_derivative / (h_holder eps^(delta - 1))
    double step = 0.0;
    std::size_t nodes = 0;
};

RegularizedIbpResult regularized_ibp(const Oscillatory1D& problem, const RegularizedIbpConfig& cfg);

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// Repeated plain integration by parts int e^{if} g = i int e^{if} (g / f')'. The amplitude
// is sampled on `nodes` points of [a, b] (g must vanish to all orders at both ends) and
// differentiated spectrally.
struct PlainIbpResult {
    std::vector<double> w;
    std::vector<cplx> amplitude;      // g_reps
    std::vector<double> sup_norms;    // sup|g_k|, k = 0..reps
    std::vector<double> gains;        // sup|g_k| / sup|g_0|, k = 1..reps
    cplx lhs{}, rhs{};                // int e^{if} g_0 and int e^{if} g_reps
    double relative_to_dyadic = 0.0;  // gain_reps / 2^{-reps * scale_index}, when scale_index >= 0
};

PlainIbpResult plain_ibp_factor(const Oscillatory1D& problem, int repetitions, int nodes = 4096,
                                int scale_index = -1);

// The w-phase (x - w) xi + (T(w) - T(y)) eta of the kernel, for fixed xi, eta (1D).
Oscillatory1D kernel_phase(const LocalBranch& t, const std::function<cplx(double)>& gamma, double xi,
                           double eta, double x = 0.0, double y = 0.0);

// A_y(w) = T(w) - T(y) - DT(y)(w - y).
class PhaseSplit {
public:
    PhaseSplit(LocalBranch t, const Vec2& y);
    Vec2 operator()(const Vec2& w) const;
    // A_y(w) + T(y) + DT(y)(w - y); equals T(w) up to rounding.
    Vec2 reassemble(const Vec2& w) const;
    const Vec2& base() const { return y_; }

private:
    LocalBranch t_;
    Vec2 y_;
    Vec2 ty_;
    dynamics::Mat2 dty_;
};

PhaseSplit appendix_phase_split(const LocalBranch& t, const Vec2& y);

// F after one integration by parts on w, G = F psi_n psi_tilde_ell, and the check
//   (F G)(u, v, w) = 2^{n + ell} W(2^n u, 2^ell v, w),  W = F of G(2^n xi, 2^ell eta, w),
// with the two inverse transforms computed on unrelated trapezoid grids (1D branch).
struct ScalingCheck {
    cplx direct{}, scaled{};
    double rel_diff = 0.0;
};

ScalingCheck scaling_identity_check(const LocalBranch& t, const std::function<cplx(double)>& gamma, int n,
                                    int ell, double u, double v, double w, int nodes = 768);

}  // namespace rlab::kernels
