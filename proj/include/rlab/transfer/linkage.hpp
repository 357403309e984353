#pragma once

#include <optional>
#include <vector>

#include "rlab/dyadic/cones.hpp"
#include "rlab/dynamics/hyperbolicity.hpp"

namespace rlab::transfer {

using dyadic::Sign;
using dynamics::LocalBranch;

enum class RuleKind { expanding, hyperbolic };

// Which dyadic block pairs (ell -> n) go into the bounded part L'_0.
//   expanding:  ell ~> n  iff 2^n <= |T|_+ 2^{ell+4}
//   hyperbolic: (+,+) 2^n <= 2^{ell+5} |T|_+
//               (-,-) 2^{ell-5} |T|_- <= 2^n
//               (+,-) 2^n >= 2^5 |T|_-  or  2^ell >= 2^5 |T|_+
//               (-,+) never
struct LinkageRelation {
    RuleKind kind = RuleKind::expanding;
    double t_plus = 1.0;
    double t_minus = 1.0;
    int n_threshold = 0;  // N(T); 0 until measured

    static LinkageRelation expanding(double t_plus);
    static LinkageRelation hyperbolic(double t_plus, double t_minus);

    bool linked(int ell, int n, std::optional<Sign> tau = std::nullopt,
                std::optional<Sign> sigma = std::nullopt) const;
};

// Support geometry. Distances are between supp(psi_n) (or supp(check psi_{n,sigma}))
// and DT_x^tr supp(psi_tilde_ell) (or supp(psi_tilde_{ell,tau})), in frequency units.
struct SeparationSample {
    double distance = 0.0;
    dynamics::Vec2 x{0, 0};
};

// Minimum over the sampled points x of the support distance.
SeparationSample support_distance(const LocalBranch& t, const std::optional<dyadic::ConeSystem>& cones,
                                  int ell, int n, std::optional<Sign> tau, std::optional<Sign> sigma,
                                  const dynamics::SampleGrid& grid);

struct ThresholdResult {
    int n_threshold = 0;
    bool ok = true;          // false when a non-linked pair above low_level has touching supports
    int bad_ell = -1, bad_n = -1;
    dynamics::Vec2 bad_x{0, 0};
    int low_level = 0;       // pairs with max(n, ell) <= low_level may touch
    int low_touching = 0;    // how many of them do
};

// Level below which touching supports are tolerated: ceil(log2(32 max(|T|_+, |T|_-, 1))).
// Non-linked pairs under it only move frequencies <= 2^{low_level+1}, so their
// part of L'_1 has finite-dimensional range whatever the separation.
int low_frequency_level(const LinkageRelation& rel);

// Smallest N with d >= 2^{max(n,ell) - N} for every non-linked pair with
// indices <= max_index and positive support distance.
ThresholdResult compute_threshold(const LinkageRelation& rel, const LocalBranch& t,
                                  const std::optional<dyadic::ConeSystem>& cones, int max_index,
                                  const dynamics::SampleGrid& grid);

// |T|_+ / |T|_- from the branch and cones, with N(T) measured on the grid.
LinkageRelation make_linkage(const LocalBranch& t, const std::optional<dyadic::ConeSystem>& cones,
                             int max_index, const dynamics::SampleGrid& grid = {});

}  // namespace rlab::transfer
