#include "rmc/transfer.hpp"

#include <cmath>
#include <stdexcept>

#include "rmc/errors.hpp"
#include "rmc/specfun.hpp"

namespace rmc {

namespace {

// Marginal factor density for n=2: Beta(a, a), in log space.
struct FactorDensity {
    double a;
    double lognorm;
    explicit FactorDensity(double a_) : a(a_), lognorm(lgamma_pos(2.0 * a_) - 2.0 * lgamma_pos(a_)) {}
    double operator()(double x) const {
        if (a == 1.0) return 1.0;
        if (x <= 0.0 || x >= 1.0) return 0.0;  // interior nodes only
        return std::exp(lognorm + (a - 1.0) * (std::log(x) + std::log1p(-x)));
    }
};

struct RegionResult {
    double value;
    double error;
    bool converged;
};

// integral of p((z-s)/(r-s)) B(r) B(s) / |r-s| over r in [rlo,rhi], s in
// [slo,shi], where z separates the r and s ranges. The inner variable is r.
RegionResult region_integral(const DensityFn& p, const FactorDensity& B, double z,
                             double rlo, double rhi, double slo, double shi,
                             const QuadratureSpec& spec, bool substitute) {
    QuadratureSpec inner = spec;
    inner.abs_tol = spec.abs_tol * 0.1;
    inner.rel_tol = spec.rel_tol * 0.1;
    bool inner_ok = true;
    double inner_err = 0.0;

    auto inner_integral = [&](double s) {
        const double bs = B(s);
        if (bs == 0.0) return 0.0;
        auto f = [&](double r) {
            const double w = (z - s) / (r - s);
            return p(w) * B(r) / std::fabs(r - s);
        };
        IntegralResult res;
        if (substitute && B.a < 1.0) {
            // map the singular r-endpoint (0 or 1) with r = edge +- span*u^{1/a}
            const double inva = 1.0 / B.a;
            if (rlo == 0.0) {
                const double span = rhi - rlo;
                auto g = [&](double u) {
                    const double r = span * std::pow(u, inva);
                    return f(r) * span * inva * std::pow(u, inva - 1.0);
                };
                res = integrate_adaptive(g, 0.0, 1.0, inner);
            } else {
                const double span = rhi - rlo;
                auto g = [&](double u) {
                    const double r = rhi - span * std::pow(u, inva);
                    return f(r) * span * inva * std::pow(u, inva - 1.0);
                };
                res = integrate_adaptive(g, 0.0, 1.0, inner);
            }
        } else {
            res = integrate_adaptive(f, rlo, rhi, inner);
        }
        if (!res.converged) inner_ok = false;
        inner_err = std::max(inner_err, res.error);
        return bs * res.value;
    };

    IntegralResult outer;
    if (substitute && B.a < 1.0) {
        const double inva = 1.0 / B.a;
        const double span = shi - slo;
        if (shi == 1.0) {
            auto g = [&](double u) {
                const double s = 1.0 - span * std::pow(u, inva);
                return inner_integral(s) * span * inva * std::pow(u, inva - 1.0);
            };
            outer = integrate_adaptive(g, 0.0, 1.0, spec);
        } else {
            auto g = [&](double u) {
                const double s = span * std::pow(u, inva);
                return inner_integral(s) * span * inva * std::pow(u, inva - 1.0);
            };
            outer = integrate_adaptive(g, 0.0, 1.0, spec);
        }
    } else {
        outer = integrate_adaptive(inner_integral, slo, shi, spec);
    }
    return {outer.value, outer.error + inner_err, outer.converged && inner_ok};
}

RegionResult region_with_retry(const DensityFn& p, const FactorDensity& B, double z,
                               double rlo, double rhi, double slo, double shi,
                               const QuadratureSpec& spec) {
    RegionResult res = region_integral(p, B, z, rlo, rhi, slo, shi, spec, false);
    if (!res.converged && spec.endpoint_substitution && B.a < 1.0)
        res = region_integral(p, B, z, rlo, rhi, slo, shi, spec, true);
    return res;
}

}  // namespace

double transfer_apply(const DensityFn& p, double a, double z, const QuadratureSpec& spec) {
    if (!(a > 0.0)) throw std::invalid_argument("transfer_apply: a must be > 0");
    if (!(z >= 0.0) || !(z <= 1.0)) throw std::invalid_argument("transfer_apply: z must be in [0,1]");
    if (z == 0.0 || z == 1.0) return 0.0;  // both regions degenerate
    const FactorDensity B(a);
    const RegionResult ri = region_with_retry(p, B, z, 0.0, z, z, 1.0, spec);
    const RegionResult rii = region_with_retry(p, B, z, z, 1.0, 0.0, z, spec);
    if (!ri.converged || !rii.converged)
        throw NumericalFailure("transfer_apply: quadrature did not converge",
                               std::max(ri.error, rii.error));
    return ri.value + rii.value;
}

FixedPointCheck verify_fixed_point(double a, double z, const QuadratureSpec& spec) {
    if (!(a > 0.0)) throw std::invalid_argument("verify_fixed_point: a must be > 0");
    if (!(z > 0.0) || !(z < 1.0)) throw std::invalid_argument("verify_fixed_point: z must be in (0,1)");
    const DensityFn p = make_stationary_density(a, 2);
    const FactorDensity B(a);
    const RegionResult ri = region_with_retry(p, B, z, 0.0, z, z, 1.0, spec);
    const RegionResult rii = region_with_retry(p, B, z, z, 1.0, 0.0, z, spec);
    if (!ri.converged || !rii.converged)
        throw NumericalFailure("verify_fixed_point: quadrature did not converge",
                               std::max(ri.error, rii.error));
    FixedPointCheck out;
    out.region_i = ri.value;
    out.region_ii = rii.value;
    out.residual = std::fabs(ri.value + rii.value - stationary_density(z, a, 2));
    return out;
}

GridDensity::GridDensity(std::vector<double> values) : y_(std::move(values)) {
    const int m = static_cast<int>(y_.size());
    if (m < 4) throw std::invalid_argument("GridDensity: need at least 4 nodes");
    h_ = 1.0 / (m - 1);
    slope_.assign(m, 0.0);
    // Fritsch-Carlson monotone slopes on the uniform grid
    std::vector<double> d(m - 1);
    for (int k = 0; k < m - 1; k++) d[k] = (y_[k + 1] - y_[k]) / h_;
    slope_[0] = d[0];
    slope_[m - 1] = d[m - 2];
    for (int k = 1; k < m - 1; k++) {
        if (d[k - 1] * d[k] <= 0.0)
            slope_[k] = 0.0;
        else
            slope_[k] = 2.0 * d[k - 1] * d[k] / (d[k - 1] + d[k]);
    }
}

double GridDensity::operator()(double z) const {
    if (z <= 0.0) return y_.front();
    if (z >= 1.0) return y_.back();
    const int m = static_cast<int>(y_.size());
    int k = static_cast<int>(z / h_);
    if (k > m - 2) k = m - 2;
    const double x = (z - k * h_) / h_;
    const double x2 = x * x, x3 = x2 * x;
    const double h00 = 2 * x3 - 3 * x2 + 1;
    const double h10 = x3 - 2 * x2 + x;
    const double h01 = -2 * x3 + 3 * x2;
    const double h11 = x3 - x2;
    return h00 * y_[k] + h10 * h_ * slope_[k] + h01 * y_[k + 1] + h11 * h_ * slope_[k + 1];
}

DensityFn GridDensity::as_density() const {
    GridDensity copy = *this;
    return {"grid", {static_cast<double>(size())},
            [copy](double z) { return copy(z); }};
}

GridDensity transfer_to_grid(const DensityFn& p, double a, int grid_points,
                             const QuadratureSpec& spec) {
    if (grid_points < 4) throw std::invalid_argument("transfer_to_grid: need >= 4 nodes");
    std::vector<double> vals(grid_points, 0.0);
    for (int i = 1; i < grid_points - 1; i++) {
        const double z = static_cast<double>(i) / (grid_points - 1);
        vals[i] = transfer_apply(p, a, z, spec);
    }
    return GridDensity(std::move(vals));
}

}  // namespace rmc
