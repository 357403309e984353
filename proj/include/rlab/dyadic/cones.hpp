#pragma once

#include <optional>

#include "rlab/dyadic/bump.hpp"

namespace rlab::dyadic {

enum class Sign { plus, minus };

inline const char* sign_label(Sign s) { return s == Sign::plus ? "+" : "-"; }

// Closed double sector {xi : angle(xi) within half_width of center, mod pi}.
struct Cone {
    double center = 0.0;
    double half_width = 0.0;

    // Angular distance of theta to the axis, folded into [0, pi/2].
    double axis_distance(double theta) const;
    bool contains(double theta) const;
    bool contains_interior(double theta) const;
    // Closure of the complement, again a double sector.
    Cone complement() const;
    Cone shrunk(double fraction) const;
};

// Smooth angular step: 1 on `inner`, 0 off `outer`, exp-profile in between.
// Requires inner contained in the interior of outer.
double cone_step(const Cone& inner, const Cone& outer, double theta, double exponent = 1.0);

struct ConeSystem {
    Cone plus;
    Cone minus;
    double exponent = 1.0;        // transition profile exponent a in exp(-t^{-a})
    double tilde_fraction = 0.5;  // widened multipliers use cones shrunk by this factor
    double check_fraction = 0.8;  // post-localisation uses minus cone shrunk by this factor
    std::optional<Cone> plus_prime;
    std::optional<Cone> minus_prime;

    void validate() const;

    // phi_-: 1 on the minus cone, 0 on the plus cone; phi_+ = 1 - phi_-.
    double phi(Sign s, double theta) const;
    // Widened profiles: phi_tilde_sigma = 1 on supp(phi_sigma).
    double phi_tilde(Sign s, double theta) const;
    // Post-localisation profiles; phi_+ * phi_check_- vanishes identically.
    double phi_check(Sign s, double theta) const;
};

double angle_of(const Freq& xi);

// psi_{n,sigma}; the n = 0 piece is chi/2 for both signs.
double psi_n_sigma(int n, Sign s, const Freq& xi, const ConeSystem& cones);
double psi_tilde_sigma(int ell, Sign s, const Freq& xi, const ConeSystem& cones);
double psi_check_sigma(int n, Sign s, const Freq& xi, const ConeSystem& cones);

}  // namespace rlab::dyadic
