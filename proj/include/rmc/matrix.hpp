#pragma once

#include <cstddef>
#include <vector>

namespace rmc {

// Dense real square matrix, column-major. Entry (i,j) of a transition
// matrix is the probability of the step j -> i; columns of a stochastic
// matrix are probability vectors.
struct Matrix {
    int n = 0;
    std::vector<double> a;  // a[j*n + i]

    Matrix() = default;
    explicit Matrix(int dim) : n(dim), a(static_cast<std::size_t>(dim) * dim, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(j) * n + i]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(j) * n + i]; }

    static Matrix identity(int dim);
};

using ProbVector = std::vector<double>;

Matrix multiply(const Matrix& left, const Matrix& right);

// Largest deviation of any column sum from 1 (stochasticity drift).
double max_column_sum_error(const Matrix& m);
bool is_column_stochastic(const Matrix& m, double tol);

// Divide every column by its sum.
void renormalize_columns(Matrix& m);

// U * p, with dimension check.
ProbVector apply_matrix(const Matrix& u, const ProbVector& p);

// |U(0,i) - U(0,j)|: distance between columns i and j through their first
// row entries.
double column_distance(const Matrix& u, int i, int j);

// Right eigenvector for the unit eigenvalue of a stochastic matrix by power
// iteration from the uniform vector, normalized to sum 1. Throws
// NumericalFailure when the residual has not reached `tol` in `max_iter`
// iterations.
ProbVector perron_vector(const Matrix& u, double tol = 1e-13, int max_iter = 10000);

}  // namespace rmc
