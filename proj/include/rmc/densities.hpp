#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rmc/quadrature.hpp"

namespace rmc {

// An evaluable density on [0,1] with a family tag and its parameters.
struct DensityFn {
    std::string family;
    std::vector<double> params;
    std::function<double(double)> pdf;

    double operator()(double z) const { return pdf(z); }
};

// Marginal density of a single matrix element when columns are symmetric
// Dirichlet(a) in dimension n: Beta(a, (n-1)a).
double beta_marginal_pdf(double v, double a, int n);

// Density of the top-left element of a two-step 2x2 product at a=1:
// -2 z ln z - 2(1-z) ln(1-z). Endpoints return the limit 0.
double two_step_density(double z);
double two_step_cdf(double z);

// Stationary (large-t) element density: Beta(n a, n(n-1) a).
double stationary_density(double z, double a, int n);

double gamma_pdf(double x, double alpha, double beta);

// CDFs used as KS references.
double beta_cdf(double x, double p, double q);
double gamma_cdf(double x, double alpha, double beta);

DensityFn make_uniform_density();
DensityFn make_beta_density(double p, double q);
DensityFn make_two_step_density();
DensityFn make_stationary_density(double a, int n);

// Integral of the density over [0,1] under the module quadrature.
double density_mass(const DensityFn& p, const QuadratureSpec& spec = {});

}  // namespace rmc
