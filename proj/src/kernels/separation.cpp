#include "rlab/kernels/separation.hpp"

#include <cmath>
#include <sstream>

#include "rlab/common/errors.hpp"

namespace rlab::kernels {

SeparationReport support_separation(const LocalBranch& t, const std::optional<dyadic::ConeSystem>& cones,
                                    const transfer::LinkageRelation& rel, int ell, int n, std::optional<Sign> tau,
                                    std::optional<Sign> sigma, const dynamics::SampleGrid& grid) {
    require(!cones || (tau && sigma), "cone labels are required with a cone system");
    if (rel.linked(ell, n, tau, sigma)) {
        std::ostringstream os;
        os << "support_separation needs a non-linked pair; (ell, n) = (" << ell << ", " << n << ") is linked";
        throw ValidationError(os.str());
    }
    const auto s = transfer::support_distance(t, cones, ell, n, tau, sigma, grid);
    SeparationReport r;
    r.n = n;
    r.ell = ell;
    r.sigma = sigma;
    r.tau = tau;
    r.distance = s.distance;
    r.n_threshold = rel.n_threshold;
    r.threshold = std::ldexp(1.0, std::max(n, ell) - rel.n_threshold);
    r.ok = r.distance >= r.threshold;
    r.violating_x = s.x;
    return r;
}

}  // namespace rlab::kernels
