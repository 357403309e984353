#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "rlab/dyadic/cones.hpp"
#include "rlab/dyadic/grid_function.hpp"

namespace rlab::dyadic {

using Symbol = std::function<cplx(const Freq&)>;

// Largest dyadic index whose annulus fits below the grid Nyquist frequency:
// floor(log2(N / (2P))) - 1.
int n_max_for(int n, double period = 1.0);

// a(D)u. On Nyquist slots the symbol is averaged over the +-N/2 aliases.
GridFunction apply_multiplier(const GridFunction& u, const Symbol& a);
// Same, starting from a precomputed spectrum of u.
GridFunction apply_multiplier_spectrum(const GridFunction& shape, const std::vector<cplx>& spec,
                                       const Symbol& a);

// Relative spectral energy of u at frequencies |xi| > 2^{n_max}.
double high_band_mass(const GridFunction& u);
inline constexpr double kTruncationMassLimit = 1e-8;

struct DyadicDecomposition {
    int n_max = 0;
    std::vector<GridFunction> blocks;                     // u_n
    std::vector<std::array<GridFunction, 2>> sigma_blocks;  // u_{n,+}, u_{n,-}
    double high_band_mass = 0.0;
    bool truncation_warning = false;

    GridFunction reconstruct() const;
};

DyadicDecomposition dyadic_blocks(const GridFunction& u,
                                  const std::optional<ConeSystem>& cones = std::nullopt);

struct NormValue {
    double value = 0.0;
    bool truncation_warning = false;
    double high_band_mass = 0.0;
};

// sup_{n <= n_max} 2^{pn} |u_n|_inf
NormValue holder_norm_star(const GridFunction& u, double p);
// max(sup_n 2^{pn}|u_{n,+}|_inf, sup_n 2^{qn}|u_{n,-}|_inf), d = 2 only.
NormValue aniso_norm(const GridFunction& u, double p, double q, const ConeSystem& cones);
// max(sup|u|, sup_{0 < |x-y| <= 1/4} |u(x)-u(y)|/|x-y|^p), periodic distance.
double classical_holder_norm(const GridFunction& u, double p);

// l1 mass (1/N^d) sum_j |K_n(x_j)| of the discrete kernel of psi_n(D).
double multiplier_kernel_l1(int dim, int n, int level);

}  // namespace rlab::dyadic
