#include "rmc/chain.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rmc {

Deflation::Deflation(int dim) : n(dim), v(dim, 0.0) {
    if (dim < 2) throw std::invalid_argument("Deflation: need n >= 2");
    // v ~ q1 - e1 with q1 = ones/sqrt(n)
    const double q1 = 1.0 / std::sqrt(static_cast<double>(dim));
    v[0] = q1 - 1.0;
    for (int i = 1; i < dim; i++) v[i] = q1;
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
}

Matrix Deflation::deflated_block(const Matrix& m) const {
    // Q m Q = m - 2 u v^T - 2 v w^T + 4 c v v^T, with u = m v, w = m^T v,
    // c = v^T m v; Q is symmetric so this is the full similarity transform.
    std::vector<double> u(n, 0.0), w(n, 0.0);
    for (int j = 0; j < n; j++) {
        const double vj = v[j];
        double wj = 0.0;
        for (int i = 0; i < n; i++) {
            u[i] += m(i, j) * vj;
            wj += m(i, j) * v[i];
        }
        w[j] = wj;
    }
    double c = 0.0;
    for (int i = 0; i < n; i++) c += v[i] * u[i];
    Matrix out(n - 1);
    for (int j = 1; j < n; j++)
        for (int i = 1; i < n; i++)
            out(i - 1, j - 1) = m(i, j) - 2.0 * u[i] * v[j] - 2.0 * v[i] * w[j]
                              + 4.0 * c * v[i] * v[j];
    return out;
}

std::vector<double> Deflation::deflate_vector(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != n)
        throw std::invalid_argument("deflate_vector: dimension mismatch");
    double vx = 0.0;
    for (int i = 0; i < n; i++) vx += v[i] * x[i];
    std::vector<double> out(n - 1);
    for (int i = 1; i < n; i++) out[i - 1] = x[i] - 2.0 * v[i] * vx;
    return out;
}

ChainAccumulator::ChainAccumulator(int n, ChainOptions options)
    : opts_(options), defl_(n) {
    rec_.t = 0;
    rec_.product = Matrix::identity(n);
    if (opts_.track_deflated) {
        rec_.has_deflated = true;
        rec_.deflated = Matrix::identity(n - 1);
        rec_.log_scale = 0.0;
    }
}

void ChainAccumulator::step(const Matrix& factor) {
    if (factor.n != rec_.product.n) throw std::invalid_argument("step: dimension mismatch");
    rec_.product = multiply(factor, rec_.product);
    if (opts_.renormalize_columns) renormalize_columns(rec_.product);
    if (opts_.keep_snapshots) rec_.snapshots.push_back(factor);
    if (rec_.has_deflated) {
        rec_.deflated = multiply(defl_.deflated_block(factor), rec_.deflated);
        double top = 0.0;
        for (double x : rec_.deflated.a) top = std::max(top, std::fabs(x));
        if (top > 0.0) {
            for (double& x : rec_.deflated.a) x /= top;
            rec_.log_scale += std::log(top);
        } else {
            rec_.log_scale = -std::numeric_limits<double>::infinity();
        }
    }
    rec_.t++;
}

ChainRecord chain_product(const DirichletParams& params, int t, Rng& gen,
                          ChainOptions options) {
    if (t < 1) throw std::invalid_argument("chain_product: t must be >= 1");
    ChainAccumulator acc(params.n, options);
    for (int k = 0; k < t; k++) acc.step(random_stochastic_matrix(params, gen));
    return acc.take();
}

ProbVector evolve(const ProbVector& p0, const ChainRecord& record) {
    if (record.t == 0) {
        if (record.product.n != 0 && static_cast<int>(p0.size()) != record.product.n)
            throw std::invalid_argument("evolve: dimension mismatch");
        return p0;
    }
    return apply_matrix(record.product, p0);
}

double log_column_distance(const ChainRecord& record, int i, int j) {
    const int n = record.product.n;
    if (i < 0 || j < 0 || i >= n || j >= n)
        throw std::invalid_argument("log_column_distance: index out of range");
    if (i == j) return -std::numeric_limits<double>::infinity();
    if (!record.has_deflated)
        return std::log(column_distance(record.product, i, j));
    // U (e_i - e_j) has no component along the all-ones left eigenvector,
    // so it is exactly Q [0; B_t...B_1 y] with y the deflated difference.
    const Deflation defl(n);
    std::vector<double> x(n, 0.0);
    x[i] = 1.0;
    x[j] = -1.0;
    const std::vector<double> y = defl.deflate_vector(x);
    std::vector<double> z(n - 1, 0.0);
    for (int col = 0; col < n - 1; col++) {
        const double yc = y[col];
        if (yc == 0.0) continue;
        for (int row = 0; row < n - 1; row++) z[row] += record.deflated(row, col) * yc;
    }
    // first row of U(e_i - e_j) = sum_k Q(0, k+1) z_k
    double first = 0.0;
    for (int k = 0; k < n - 1; k++) first += defl.q(0, k + 1) * z[k];
    if (first == 0.0) return -std::numeric_limits<double>::infinity();
    return record.log_scale + std::log(std::fabs(first));
}

}  // namespace rmc
