#pragma once

#include <functional>

namespace rmc {

struct QuadratureSpec {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_subdivisions = 4000;
    bool endpoint_substitution = true;  // power-law maps near singular endpoints
};

struct IntegralResult {
    double value = 0.0;
    double error = 0.0;  // estimated
    int subdivisions = 0;
    bool converged = false;
};

// Globally adaptive quadrature on [lo, hi]: fixed 15-point Gauss rule per
// cell, error from the whole-vs-halves (Richardson) difference, worst cell
// split first. Integrand is only evaluated at interior nodes, so integrable
// endpoint singularities are admissible.
IntegralResult integrate_adaptive(const std::function<double(double)>& f,
                                  double lo, double hi,
                                  const QuadratureSpec& spec = {});

}  // namespace rmc
