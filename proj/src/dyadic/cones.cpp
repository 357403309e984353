#include "rlab/dyadic/cones.hpp"

#include <cmath>
#include <numbers>

#include "rlab/common/errors.hpp"

namespace rlab::dyadic {

namespace {
constexpr double kPi = std::numbers::pi;
}

double Cone::axis_distance(double theta) const {
    double d = std::fmod(theta - center, kPi);
    if (d < 0) d += kPi;
    return d > 0.5 * kPi ? kPi - d : d;
}

bool Cone::contains(double theta) const { return axis_distance(theta) <= half_width; }

bool Cone::contains_interior(double theta) const { return axis_distance(theta) < half_width; }

Cone Cone::complement() const { return {center + 0.5 * kPi, 0.5 * kPi - half_width}; }

Cone Cone::shrunk(double fraction) const { return {center, half_width * fraction}; }

double cone_step(const Cone& inner, const Cone& outer, double theta, double exponent) {
    double dist = outer.axis_distance(theta);
    double d_in = std::max(0.0, inner.axis_distance(theta) - inner.half_width);
    double d_out = std::max(0.0, outer.half_width - dist);
    double a = exp_profile(d_out, exponent), b = exp_profile(d_in, exponent);
    if (a == 0.0) return 0.0;
    return a / (a + b);
}

void ConeSystem::validate() const {
    require(plus.half_width > 0 && minus.half_width > 0, "cone half-widths must be positive");
    double sep = Cone{plus.center, 0}.axis_distance(minus.center);
    require(sep > plus.half_width + minus.half_width,
            "cones must intersect only at the origin");
    require(exponent > 0, "cone transition exponent must be positive");
    require(tilde_fraction > 0 && tilde_fraction < 1, "tilde_fraction must lie in (0,1)");
    require(check_fraction > 0 && check_fraction < 1, "check_fraction must lie in (0,1)");
    require(plus_prime.has_value() == minus_prime.has_value(),
            "the primed cone pair must be given together");
}

double ConeSystem::phi(Sign s, double theta) const {
    double m = cone_step(minus, plus.complement(), theta, exponent);
    return s == Sign::minus ? m : 1.0 - m;
}

double ConeSystem::phi_tilde(Sign s, double theta) const {
    if (s == Sign::minus) return 1.0 - cone_step(plus.shrunk(tilde_fraction), plus, theta, exponent);
    return 1.0 - cone_step(minus.shrunk(tilde_fraction), minus, theta, exponent);
}

double ConeSystem::phi_check(Sign s, double theta) const {
    double m = cone_step(minus.shrunk(check_fraction), minus, theta, exponent);
    return s == Sign::minus ? m : 1.0 - m;
}

double angle_of(const Freq& xi) { return std::atan2(xi[1], xi[0]); }

double psi_n_sigma(int n, Sign s, const Freq& xi, const ConeSystem& cones) {
    if (n == 0) return 0.5 * chi(norm(xi));
    double r = norm(xi);
    double radial = psi_n(n, r);
    if (radial == 0.0) return 0.0;
    return radial * cones.phi(s, angle_of(xi));
}

double psi_tilde_sigma(int ell, Sign s, const Freq& xi, const ConeSystem& cones) {
    double r = norm(xi);
    if (ell == 0) return chi(0.5 * r);
    double radial = psi_tilde(ell, r);
    if (radial == 0.0) return 0.0;
    return radial * cones.phi_tilde(s, angle_of(xi));
}

double psi_check_sigma(int n, Sign s, const Freq& xi, const ConeSystem& cones) {
    if (n == 0) return 0.5 * chi(norm(xi));
    double r = norm(xi);
    double radial = psi_n(n, r);
    if (radial == 0.0) return 0.0;
    return radial * cones.phi_check(s, angle_of(xi));
}

}  // namespace rlab::dyadic
