#include "rmc/matrix.hpp"

#include <cmath>
#include <stdexcept>

#include "rmc/errors.hpp"

namespace rmc {

Matrix Matrix::identity(int dim) {
    Matrix m(dim);
    for (int i = 0; i < dim; i++) m(i, i) = 1.0;
    return m;
}

Matrix multiply(const Matrix& left, const Matrix& right) {
    if (left.n != right.n) throw std::invalid_argument("multiply: dimension mismatch");
    const int n = left.n;
    Matrix out(n);
    for (int j = 0; j < n; j++) {
        double* cj = &out.a[static_cast<std::size_t>(j) * n];
        for (int k = 0; k < n; k++) {
            const double bkj = right(k, j);
            if (bkj == 0.0) continue;
            const double* ak = &left.a[static_cast<std::size_t>(k) * n];
            for (int i = 0; i < n; i++) cj[i] += ak[i] * bkj;
        }
    }
    return out;
}

double max_column_sum_error(const Matrix& m) {
    double worst = 0.0;
    for (int j = 0; j < m.n; j++) {
        double s = 0.0;
        for (int i = 0; i < m.n; i++) s += m(i, j);
        worst = std::max(worst, std::fabs(s - 1.0));
    }
    return worst;
}

bool is_column_stochastic(const Matrix& m, double tol) {
    for (double x : m.a)
        if (!(x >= -tol) || !(x <= 1.0 + tol)) return false;
    return max_column_sum_error(m) <= tol;
}

void renormalize_columns(Matrix& m) {
    for (int j = 0; j < m.n; j++) {
        double s = 0.0;
        for (int i = 0; i < m.n; i++) s += m(i, j);
        if (s != 0.0)
            for (int i = 0; i < m.n; i++) m(i, j) /= s;
    }
}

ProbVector apply_matrix(const Matrix& u, const ProbVector& p) {
    if (static_cast<int>(p.size()) != u.n) throw std::invalid_argument("apply: dimension mismatch");
    ProbVector out(u.n, 0.0);
    for (int j = 0; j < u.n; j++) {
        const double pj = p[j];
        if (pj == 0.0) continue;
        for (int i = 0; i < u.n; i++) out[i] += u(i, j) * pj;
    }
    return out;
}

double column_distance(const Matrix& u, int i, int j) {
    if (i < 0 || j < 0 || i >= u.n || j >= u.n)
        throw std::invalid_argument("column_distance: index out of range");
    return std::fabs(u(0, i) - u(0, j));
}

ProbVector perron_vector(const Matrix& u, double tol, int max_iter) {
    if (u.n < 1) throw std::invalid_argument("perron_vector: empty matrix");
    ProbVector v(u.n, 1.0 / u.n);
    double resid = 0.0;
    for (int it = 0; it < max_iter; it++) {
        ProbVector w = apply_matrix(u, v);
        double s = 0.0;
        for (double x : w) s += x;
        if (s <= 0.0) throw NumericalFailure("perron_vector: nonpositive column mass", s);
        for (double& x : w) x /= s;
        resid = 0.0;
        for (int i = 0; i < u.n; i++) resid = std::max(resid, std::fabs(w[i] - v[i]));
        v = std::move(w);
        if (resid < tol) {
            return v;
        }
    }
    throw NumericalFailure("perron_vector: power iteration did not converge", resid);
}

}  // namespace rmc
