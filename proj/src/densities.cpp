#include "rmc/densities.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "rmc/specfun.hpp"

namespace rmc {

namespace {

// log-space Beta(p,q) pdf; endpoints handled by the caller
double beta_pdf(double x, double p, double q) {
    if (!(p > 0.0) || !(q > 0.0)) throw std::invalid_argument("beta_pdf: p, q must be > 0");
    if (!(x >= 0.0) || !(x <= 1.0)) throw std::invalid_argument("beta_pdf: x must be in [0,1]");
    const double infty = std::numeric_limits<double>::infinity();
    if (x == 0.0) return (p < 1.0) ? infty : (p == 1.0 ? std::exp(lgamma_pos(p + q) - lgamma_pos(p) - lgamma_pos(q)) : 0.0);
    if (x == 1.0) return (q < 1.0) ? infty : (q == 1.0 ? std::exp(lgamma_pos(p + q) - lgamma_pos(p) - lgamma_pos(q)) : 0.0);
    const double logv = lgamma_pos(p + q) - lgamma_pos(p) - lgamma_pos(q)
                      + (p - 1.0) * std::log(x) + (q - 1.0) * std::log1p(-x);
    return std::exp(logv);
}

}  // namespace

double beta_marginal_pdf(double v, double a, int n) {
    if (!(a > 0.0) || n < 2) throw std::invalid_argument("beta_marginal_pdf: need a > 0, n >= 2");
    return beta_pdf(v, a, (n - 1) * a);
}

double two_step_density(double z) {
    if (!(z >= 0.0) || !(z <= 1.0)) throw std::invalid_argument("two_step_density: z must be in [0,1]");
    if (z == 0.0 || z == 1.0) return 0.0;
    return -2.0 * z * std::log(z) - 2.0 * (1.0 - z) * std::log1p(-z);
}

double two_step_cdf(double z) {
    if (!(z >= 0.0) || !(z <= 1.0)) throw std::invalid_argument("two_step_cdf: z must be in [0,1]");
    if (z == 0.0) return 0.0;
    if (z == 1.0) return 1.0;
    const double w = 1.0 - z;
    return -z * z * std::log(z) + 0.5 * z * z + w * w * std::log(w) - 0.5 * w * w + 0.5;
}

double stationary_density(double z, double a, int n) {
    if (!(a > 0.0) || n < 2) throw std::invalid_argument("stationary_density: need a > 0, n >= 2");
    return beta_pdf(z, n * a, static_cast<double>(n) * (n - 1) * a);
}

double gamma_pdf(double x, double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0)) throw std::invalid_argument("gamma_pdf: alpha, beta must be > 0");
    if (!(x >= 0.0)) throw std::invalid_argument("gamma_pdf: x must be >= 0");
    if (x == 0.0) {
        if (alpha < 1.0) return std::numeric_limits<double>::infinity();
        if (alpha == 1.0) return beta;
        return 0.0;
    }
    return std::exp(alpha * std::log(beta) - lgamma_pos(alpha) + (alpha - 1.0) * std::log(x) - beta * x);
}

double beta_cdf(double x, double p, double q) { return reg_inc_beta(x, p, q); }

double gamma_cdf(double x, double alpha, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("gamma_cdf: beta must be > 0");
    return reg_inc_gamma(beta * x, alpha);
}

DensityFn make_uniform_density() {
    return {"uniform", {}, [](double) { return 1.0; }};
}

DensityFn make_beta_density(double p, double q) {
    return {"beta", {p, q}, [p, q](double z) { return beta_pdf(z, p, q); }};
}

DensityFn make_two_step_density() {
    return {"two_step", {}, [](double z) { return two_step_density(z); }};
}

DensityFn make_stationary_density(double a, int n) {
    const double p = n * a;
    const double q = static_cast<double>(n) * (n - 1) * a;
    return {"stationary", {a, static_cast<double>(n)},
            [p, q](double z) { return beta_pdf(z, p, q); }};
}

double density_mass(const DensityFn& p, const QuadratureSpec& spec) {
    return integrate_adaptive(p.pdf, 0.0, 1.0, spec).value;
}

}  // namespace rmc
