#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "rlab/dyadic/decomposition.hpp"
#include "rlab/transfer/linkage.hpp"
#include "rlab/transfer/operator_matrix.hpp"

namespace rlab::transfer {

using dyadic::GridFunction;

// Local operator L u = gamma * (u o T) on the grid of u. Points are taken at
// their representative in [-P/2, P/2)^d and u is evaluated off-grid by its
// Fourier series, so u o T need not be periodic; gamma must vanish (to the
// tolerance of interest) near the box boundary unless P = 1 and T is a
// lattice map.
GridFunction apply_local(const LocalBranch& t, const Weight& gamma, const GridFunction& u);

struct SplitResult {
    GridFunction l0;
    GridFunction l1;
    GridFunction direct;        // L u without any dyadic splitting
    double identity_error = 0;  // |l0 + l1 - direct|_inf
    double high_band_mass = 0;  // of direct; the identity only holds below 2^{n_max}
    bool truncation_warning = false;
    int n_max = 0;
    // (L_i u)_{(n,sigma)}; index [n][0] in the isotropic case. Filled on request.
    std::vector<std::array<GridFunction, 2>> l0_blocks;
    std::vector<std::array<GridFunction, 2>> l1_blocks;
};

// (L'_0 u)_(n) = sum_{l ~> n} psi_n(D) L u_l,  (L'_1 u)_(n) = sum_{l !~> n} psi_n(D) L psi~_l(D) u_l,
// and the cone-refined version with check psi_{n,sigma} and u_{l,tau} when the
// relation is hyperbolic.
SplitResult split_L0_L1(const LocalBranch& t, const Weight& gamma, const GridFunction& u,
                        const LinkageRelation& rel, const std::optional<dyadic::ConeSystem>& cones,
                        bool keep_blocks = false);

struct L0BoundResult {
    std::vector<double> factors;  // |T|_+ per branch
    std::vector<double> ratios;   // max over samples of |L'_0 u|_{C^p_*} / (|gamma|_inf |u|_{C^p_*})
    double slope = 0.0;           // least squares in log-log
    double constant = 0.0;        // exp(intercept)
    bool degenerate = false;      // some ratio is zero; no fit
};

// Branches are isotropic scalings y -> c y for c in `factors`.
L0BoundResult measure_L0_bound(const std::vector<double>& factors, const Weight& gamma, double p,
                               const std::vector<GridFunction>& samples);

// Sample functions for measure_L0_bound on a 1D box of side `period`:
// white Gaussian coefficients up to 2^{n_max-1}, times exp(-x^2 / 2 envelope^2)
// centred at 0, then smoothly band-limited with chi(|xi| / 2^{n_max-1}).
// Centring keeps the peak of u inside the window that gamma * (u o T) sees.
std::vector<GridFunction> localized_samples(int n, double period, int count, std::uint64_t seed,
                                            double envelope = 0.1);

}  // namespace rlab::transfer
