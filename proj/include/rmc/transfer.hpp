#pragma once

#include <vector>

#include "rmc/densities.hpp"
#include "rmc/quadrature.hpp"

namespace rmc {

// One application of the n=2 transfer operator to the density p of a matrix
// element, evaluated at z: the triple integral over (w, r, s) with the delta
// constraint z = w(r-s)+s eliminated in the (r,s) plane (w dependent,
// Jacobian 1/|r-s|). The admissible set splits into the two rectangles
// r <= z <= s and s <= z <= r, which touch the diagonal r=s only at the
// corner (z,z), where the singularity is integrable.
double transfer_apply(const DensityFn& p, double a, double z,
                      const QuadratureSpec& spec = {});

struct FixedPointCheck {
    double region_i = 0.0;   // s in [z,1], r in [0,z]
    double region_ii = 0.0;  // s in [0,z], r in [z,1]
    double residual = 0.0;   // |region_i + region_ii - stationary(z)|
};

// Integrates the stationary density through the transfer operator over the
// two regions separately; each must reproduce half of the stationary value.
FixedPointCheck verify_fixed_point(double a, double z,
                                   const QuadratureSpec& spec = {});

// Density tabulated on a uniform grid over [0,1], evaluated with monotone
// cubic (Fritsch-Carlson) interpolation.
class GridDensity {
  public:
    GridDensity(std::vector<double> values);  // nodes i/(m-1), m >= 4

    double operator()(double z) const;
    int size() const { return static_cast<int>(y_.size()); }
    double node_value(int i) const { return y_[i]; }

    DensityFn as_density() const;

  private:
    std::vector<double> y_;
    std::vector<double> slope_;
    double h_ = 0.0;
};

// Evaluate transfer_apply(p) on a uniform grid of `grid_points` nodes
// (endpoints included, set to the limit value 0).
GridDensity transfer_to_grid(const DensityFn& p, double a, int grid_points,
                             const QuadratureSpec& spec = {});

}  // namespace rmc
