#pragma once

// Test-side oracles, kept independent of the library implementation paths
// they check.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "rmc/matrix.hpp"

namespace oracle {

// Determinant by LU with partial pivoting.
inline double lu_determinant(const rmc::Matrix& m) {
    const int n = m.n;
    std::vector<double> a(m.a.begin(), m.a.end());  // column-major copy
    auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(j) * n + i]; };
    double det = 1.0;
    for (int k = 0; k < n; k++) {
        int piv = k;
        for (int i = k + 1; i < n; i++)
            if (std::fabs(at(i, k)) > std::fabs(at(piv, k))) piv = i;
        if (at(piv, k) == 0.0) return 0.0;
        if (piv != k) {
            for (int j = 0; j < n; j++) std::swap(at(piv, j), at(k, j));
            det = -det;
        }
        det *= at(k, k);
        for (int i = k + 1; i < n; i++) {
            const double f = at(i, k) / at(k, k);
            for (int j = k; j < n; j++) at(i, j) -= f * at(k, j);
        }
    }
    return det;
}

// Euler-Mascheroni constant from the accelerated harmonic series
// H_m - ln(m + 1/2 + 1/(24 m)); error O(m^-3).
inline double euler_gamma_series(int m = 200000) {
    double h = 0.0;
    for (int k = 1; k <= m; k++) h += 1.0 / k;
    return h - std::log(m + 0.5 + 1.0 / (24.0 * m));
}

// Simpson integration on a uniform grid (independent of the library's
// adaptive Gauss rule).
template <typename F>
double simpson(F&& f, double lo, double hi, int intervals) {
    if (intervals % 2) intervals++;
    const double h = (hi - lo) / intervals;
    double acc = f(lo) + f(hi);
    for (int k = 1; k < intervals; k++) acc += f(lo + k * h) * (k % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

}  // namespace oracle
