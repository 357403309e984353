#pragma once

#include <optional>

#include "rlab/transfer/linkage.hpp"

namespace rlab::kernels {

using dynamics::LocalBranch;
using dynamics::Vec2;
using dyadic::Sign;

struct SeparationReport {
    int n = 0, ell = 0;
    std::optional<Sign> sigma, tau;
    double distance = 0.0;   // min over the sampled x of the support distance
    double threshold = 0.0;  // 2^{max(n, ell) - N(T)}
    int n_threshold = 0;
    bool ok = false;
    Vec2 violating_x{0, 0};  // minimiser of the distance; the witness when !ok
};

// Distance between supp(psi_n) (supp(check psi_{n,sigma}) with cones) and
// DT_x^tr supp(psi_tilde_ell) (resp. psi_tilde_{ell,tau}) against 2^{max - N(T)}.
// Refuses linked pairs. When rel.n_threshold is 0 the threshold uses N(T) = 0.
SeparationReport support_separation(const LocalBranch& t, const std::optional<dyadic::ConeSystem>& cones,
                                    const transfer::LinkageRelation& rel, int ell, int n,
                                    std::optional<Sign> tau = std::nullopt,
                                    std::optional<Sign> sigma = std::nullopt,
                                    const dynamics::SampleGrid& grid = {});

}  // namespace rlab::kernels
