#include "rmc/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace rmc {

void DirichletParams::validate() const {
    if (!(a > 0.0)) throw std::invalid_argument("DirichletParams: a must be > 0");
    if (n < 2) throw std::invalid_argument("DirichletParams: n must be >= 2");
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
}

double Rng::gamma(double shape) {
    if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be > 0");
    if (shape < 1.0) {
        const double u = uniform_pos();
        return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_pos();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

Rng derive_rng(const SeedSpec& spec) {
    std::uint64_t h = mix64(spec.master_seed);
    h = mix64(h ^ spec.replica_index);
    h = mix64(h ^ spec.stream_label);
    return Rng(h);
}

std::vector<double> dirichlet_column(const DirichletParams& params, Rng& gen) {
    params.validate();
    std::vector<double> v(params.n);
    for (;;) {
        double sum = 0.0;
        for (int i = 0; i < params.n; i++) {
            v[i] = gen.gamma(params.a);
            sum += v[i];
        }
        if (sum <= 0.0) continue;  // all draws underflowed to zero: redraw
        for (double& x : v) x /= sum;
        // second pass pins the sum-to-1 invariant at machine precision
        double s2 = 0.0;
        for (double x : v) s2 += x;
        for (double& x : v) x /= s2;
        return v;
    }
}

Matrix random_stochastic_matrix(const DirichletParams& params, Rng& gen) {
    params.validate();
    Matrix m(params.n);
    for (int j = 0; j < params.n; j++) {
        const std::vector<double> col = dirichlet_column(params, gen);
        for (int i = 0; i < params.n; i++) m(i, j) = col[i];
    }
    return m;
}

}  // namespace rmc
