#pragma once

namespace rmc {

// Log of the Gamma function for x > 0. Lanczos approximation, relative
// error below 1e-13 over the positive axis.
double lgamma_pos(double x);

// Digamma (psi) for x > 0.
double digamma(double x);

// Trigamma (psi') for x > 0.
double trigamma(double x);

// Regularized incomplete beta I_x(p, q), x in [0,1], p,q > 0.
double reg_inc_beta(double x, double p, double q);

// Regularized lower incomplete gamma P(a, x), x >= 0, a > 0.
double reg_inc_gamma(double x, double a);

}  // namespace rmc
