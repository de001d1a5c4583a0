#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "rmc/chain.hpp"
#include "rmc/matrix.hpp"

namespace rmc {

// Eigenvalues ordered by descending modulus; ties by descending real part,
// then descending imaginary part, so selection of the second-largest is
// deterministic.
struct Spectrum {
    std::vector<std::complex<double>> eigenvalues;
};

struct SingularValues {
    std::vector<double> values;  // nonnegative, descending
};

struct ExponentSample {
    double theta = 0.0;     // stability exponent, -(1/t) ln |lambda_1|
    double vartheta = 0.0;  // Lyapunov exponent, -(1/t) ln z_1
    int t = 0;
    int n = 0;
    std::uint64_t replica_index = 0;
    bool theta_degenerate = false;
    bool vartheta_degenerate = false;
};

// Moduli below this are treated as degenerate (excluded, counted) rather
// than clamped, so they cannot distort exponent fits.
inline constexpr double kDegenerateModulus = 1e-280;

// All eigenvalues of a dense real matrix: balancing, elimination to
// Hessenberg form, then Francis double-shift QR with 2x2 real-Schur blocks
// for conjugate pairs. Closed form for n <= 2. Throws NumericalFailure if a
// block exceeds the sweep budget.
Spectrum eigenvalues(const Matrix& m);

// Singular values by one-sided Jacobi orthogonalization (always converges
// on finite input; norms computed in scaled form so values far below 1
// keep relative accuracy).
SingularValues singular_values(const Matrix& m);

// -(1/t) ln |lambda_1| with lambda_1 the second-largest-modulus eigenvalue.
// Empty optional flags a degenerate sample.
std::optional<double> stability_exponent(const Spectrum& spec, int t);

// -(1/t) ln z_1 with z_1 the second-largest singular value.
std::optional<double> lyapunov_exponent(const SingularValues& sv, int t);

// lambda -> lambda |lambda|^{1/t - 1}: modulus becomes |lambda|^{1/t},
// argument preserved, zero stays zero.
Spectrum rescale_spectrum(const Spectrum& spec, int t);

// Fraction of eigenvalues with |Im| < eps, excluding the leading (Perron)
// eigenvalue from numerator and denominator.
double real_fraction(const Spectrum& spec, double eps);

// Spectrum of U(t) extracted from the rescaled deflated product, which
// stays accurate when the decaying eigenvalues are far below the rounding
// floor of the entries of U(t). The exact unit eigenvalue is prepended.
Spectrum chain_spectrum(const ChainRecord& record);

// ln |lambda_1(U(t))| straight from the deflated product (no underflow).
std::optional<double> chain_log_lambda1(const ChainRecord& record);

// Singular values of U(t) via the orthogonally-equivalent block form
// [[1, 0], [c, e^L B]], accurate down to e^L near the double-precision
// floor instead of the ~1e-13 cancellation floor of a raw SVD of U(t).
SingularValues chain_singular_values(const ChainRecord& record);

// Both exponents of one realization, with degenerate samples flagged
// (exponent fields are NaN when the flag is set).
ExponentSample exponent_sample(const ChainRecord& record, std::uint64_t replica_index);

}  // namespace rmc
