#pragma once

#include <optional>
#include <vector>

#include "rmc/matrix.hpp"
#include "rmc/rng.hpp"

namespace rmc {

// Householder reflector data for the orthogonal basis Q whose first column
// is (1,...,1)/sqrt(n). Q = I - 2 v v^T is symmetric; Q^T M Q of a
// column-stochastic M is block lower triangular [[1, 0], [c, B]], and the
// (n-1)-dimensional blocks B of successive factors multiply independently
// of the rest. Products of the B blocks stay O(1) after per-step rescaling,
// which keeps the decaying spectrum accurate long after the entries of U(t)
// have converged to the Perron profile.
struct Deflation {
    int n = 0;
    std::vector<double> v;  // reflector, |v| = 1

    explicit Deflation(int dim);

    double q(int i, int j) const { return (i == j ? 1.0 : 0.0) - 2.0 * v[i] * v[j]; }

    // (n-1)x(n-1) lower-right block of Q^T m Q.
    Matrix deflated_block(const Matrix& m) const;
    // (n-1)-vector: rows 1..n-1 of Q^T x.
    std::vector<double> deflate_vector(const std::vector<double>& x) const;
};

struct ChainOptions {
    bool keep_snapshots = false;
    bool renormalize_columns = false;  // per-step column renormalization of U
    bool track_deflated = true;
};

// Product U(t) = M_t ... M_1 plus the rescaled deflated product.
struct ChainRecord {
    int t = 0;
    Matrix product;                  // U(t)
    std::vector<Matrix> snapshots;   // M_1, ..., M_t when retained
    bool has_deflated = false;
    Matrix deflated;                 // B_t ... B_1 scaled to unit max-abs
    double log_scale = 0.0;          // deflated true block = e^{log_scale} * deflated
};

class ChainAccumulator {
  public:
    explicit ChainAccumulator(int n, ChainOptions options = {});

    void step(const Matrix& factor);
    const ChainRecord& record() const { return rec_; }
    ChainRecord take() { return std::move(rec_); }
    const Deflation& deflation() const { return defl_; }

  private:
    ChainOptions opts_;
    Deflation defl_;
    ChainRecord rec_;
};

// U(t) with fresh independent factors, newest factor on the left.
ChainRecord chain_product(const DirichletParams& params, int t, Rng& gen,
                          ChainOptions options = {});

// U(t) * p0; the empty chain (t = 0) leaves p0 unchanged.
ProbVector evolve(const ProbVector& p0, const ChainRecord& record);

// ln |U(0,i) - U(0,j)| through the deflated product (exact to relative
// rounding error at any t); falls back to the direct difference when the
// record carries no deflated block. Returns -inf for an exactly zero
// distance.
double log_column_distance(const ChainRecord& record, int i, int j);

}  // namespace rmc
