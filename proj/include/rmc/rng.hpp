#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "rmc/matrix.hpp"

namespace rmc {

struct DirichletParams {
    double a = 1.0;  // common concentration for all components
    int n = 2;       // dimension, >= 2

    double a0() const { return n * a; }
    void validate() const;
};

// Identifies one reproducible random stream. Derivation is a pure function
// of the three fields; distinct replicas or labels give independent streams.
struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t replica_index = 0;
    std::uint64_t stream_label = 0;
};

// Deterministic generator: a std::mt19937_64 (bit-exact across platforms by
// the standard) behind hand-rolled variate transforms, so the full stream is
// reproducible byte-for-byte.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t raw() { return engine_(); }

    // uniform on [0,1) with 53 random bits
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // uniform on (0,1)
    double uniform_pos() {
        double u;
        do { u = uniform(); } while (u == 0.0);
        return u;
    }

    // standard normal (Marsaglia polar, second variate cached)
    double normal();

    // Gamma(shape, 1) via the squeeze/rejection method; shapes below 1 use
    // the shape+1 draw with a uniform power correction.
    double gamma(double shape);

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

Rng derive_rng(const SeedSpec& spec);

// One symmetric-Dirichlet(a) probability vector of length n. The returned
// vector is renormalized a second time so the sum-to-1 invariant holds to
// machine precision.
std::vector<double> dirichlet_column(const DirichletParams& params, Rng& gen);

// n independent Dirichlet columns assembled column-wise.
Matrix random_stochastic_matrix(const DirichletParams& params, Rng& gen);

}  // namespace rmc
