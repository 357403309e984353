#include "rlab/dyadic/bump.hpp"

#include <cmath>

namespace rlab::dyadic {

double norm(const Freq& xi, int dim) {
    return dim == 1 ? std::abs(xi[0]) : std::hypot(xi[0], xi[1]);
}

double exp_profile(double t, double a) {
    if (t <= 0.0) return 0.0;
    return std::exp(-std::pow(t, -a));
}

double chi(double s) {
    if (s <= 1.0) return 1.0;
    if (s >= 2.0) return 0.0;
    double up = exp_profile(2.0 - s), down = exp_profile(s - 1.0);
    return up / (up + down);
}

double psi_n(int n, double r) {
    if (n == 0) return chi(r);
    return chi(std::ldexp(r, -n)) - chi(std::ldexp(r, 1 - n));
}

double psi_n(int n, const Freq& xi, int dim) { return psi_n(n, norm(xi, dim)); }

double psi_tilde(int ell, double r) {
    if (ell == 0) return chi(0.5 * r);
    return chi(std::ldexp(r, -ell - 1)) - chi(std::ldexp(r, 2 - ell));
}

double psi_tilde(int ell, const Freq& xi, int dim) { return psi_tilde(ell, norm(xi, dim)); }

}  // namespace rlab::dyadic
