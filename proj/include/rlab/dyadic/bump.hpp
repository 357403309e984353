#pragma once

#include <array>

namespace rlab::dyadic {

// Frequency vector. In one dimension only the first component is used.
using Freq = std::array<double, 2>;

double norm(const Freq& xi, int dim = 2);

// f(t) = exp(-t^{-a}) for t > 0, zero otherwise.
double exp_profile(double t, double a = 1.0);

// Smooth cutoff: 1 on [0,1], 0 on [2,inf), monotone in between.
double chi(double s);

// Radial Paley-Littlewood multipliers, evaluated at r = |xi|.
double psi_n(int n, double r);
double psi_n(int n, const Freq& xi, int dim = 2);

// Widened multiplier, identically 1 on supp(psi_ell).
double psi_tilde(int ell, double r);
double psi_tilde(int ell, const Freq& xi, int dim = 2);

}  // namespace rlab::dyadic
