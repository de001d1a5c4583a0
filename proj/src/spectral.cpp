#include "rmc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rmc/errors.hpp"

namespace rmc {

namespace {

using cplx = std::complex<double>;

double sign_with(double a, double b) { return b >= 0.0 ? std::fabs(a) : -std::fabs(a); }

void sort_spectrum(std::vector<cplx>& ev) {
    std::sort(ev.begin(), ev.end(), [](const cplx& x, const cplx& y) {
        const double ax = std::abs(x), ay = std::abs(y);
        if (ax != ay) return ax > ay;
        if (x.real() != y.real()) return x.real() > y.real();
        return x.imag() > y.imag();
    });
}

std::vector<cplx> eig2x2(double a11, double a12, double a21, double a22) {
    const double tr = a11 + a22;
    const double det = a11 * a22 - a12 * a21;
    const double q = 0.5 * tr;
    const double disc = q * q - det;
    if (disc >= 0.0) {
        const double r = std::sqrt(disc);
        // larger-magnitude root first, the other from the product
        const double big = q + sign_with(r, q);
        if (big == 0.0) return {cplx(0.0, 0.0), cplx(0.0, 0.0)};
        return {cplx(big, 0.0), cplx(det / big, 0.0)};
    }
    const double s = std::sqrt(-disc);
    return {cplx(q, s), cplx(q, -s)};
}

// Row-major working copy for the dense solver.
struct Dense {
    int n;
    std::vector<double> h;
    explicit Dense(const Matrix& m) : n(m.n), h(static_cast<std::size_t>(m.n) * m.n) {
        for (int i = 0; i < n; i++)
            for (int j = 0; j < n; j++) h[static_cast<std::size_t>(i) * n + j] = m(i, j);
    }
    double& at(int i, int j) { return h[static_cast<std::size_t>(i) * n + j]; }
    double at(int i, int j) const { return h[static_cast<std::size_t>(i) * n + j]; }
};

// Iterative row/column norm equalization with radix-2 scaling.
void balance(Dense& a) {
    const int n = a.n;
    const double RADIX = 2.0, sqrdx = RADIX * RADIX;
    bool done = false;
    while (!done) {
        done = true;
        for (int i = 0; i < n; i++) {
            double r = 0.0, c = 0.0;
            for (int j = 0; j < n; j++)
                if (j != i) {
                    c += std::fabs(a.at(j, i));
                    r += std::fabs(a.at(i, j));
                }
            if (c != 0.0 && r != 0.0) {
                double g = r / RADIX, f = 1.0;
                const double s = c + r;
                while (c < g) {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while (c > g) {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if ((c + r) / f < 0.95 * s) {
                    done = false;
                    g = 1.0 / f;
                    for (int j = 0; j < n; j++) a.at(i, j) *= g;
                    for (int j = 0; j < n; j++) a.at(j, i) *= f;
                }
            }
        }
    }
}

// Reduction to upper Hessenberg form by stabilized elementary similarity
// transformations.
void hessenberg(Dense& a) {
    const int n = a.n;
    for (int m = 1; m < n - 1; m++) {
        double x = 0.0;
        int piv = m;
        for (int j = m; j < n; j++) {
            if (std::fabs(a.at(j, m - 1)) > std::fabs(x)) {
                x = a.at(j, m - 1);
                piv = j;
            }
        }
        if (piv != m) {
            for (int j = m - 1; j < n; j++) std::swap(a.at(piv, j), a.at(m, j));
            for (int j = 0; j < n; j++) std::swap(a.at(j, piv), a.at(j, m));
        }
        if (x != 0.0) {
            for (int i = m + 1; i < n; i++) {
                double y = a.at(i, m - 1);
                if (y != 0.0) {
                    y /= x;
                    a.at(i, m - 1) = 0.0;
                    for (int j = m; j < n; j++) a.at(i, j) -= y * a.at(m, j);
                    for (int j = 0; j < n; j++) a.at(j, m) += y * a.at(j, i);
                }
            }
        }
    }
    for (int i = 2; i < n; i++)
        for (int j = 0; j < i - 1; j++) a.at(i, j) = 0.0;
}

// Francis double-shift QR on an upper Hessenberg matrix; eigenvalues only.
std::vector<cplx> hqr(Dense& a) {
    const int n = a.n;
    const double EPS = std::numeric_limits<double>::epsilon();
    std::vector<cplx> wri(n);
    double anorm = 0.0;
    for (int i = 0; i < n; i++)
        for (int j = std::max(i - 1, 0); j < n; j++) anorm += std::fabs(a.at(i, j));
    if (anorm == 0.0) return wri;

    int nn = n - 1;
    double p = 0.0, q = 0.0, r = 0.0;
    const int sweep_budget = 30 * n + 30;
    int sweeps = 0;
    while (nn >= 0) {
        int its = 0;
        int l;
        do {
            for (l = nn; l > 0; l--) {
                double s = std::fabs(a.at(l - 1, l - 1)) + std::fabs(a.at(l, l));
                if (s == 0.0) s = anorm;
                // relative test, plus the norm-based floor: entries below
                // EPS*anorm are within rounding of the stored matrix, and
                // noise-level clusters never satisfy the relative test alone
                if (std::fabs(a.at(l, l - 1)) <= EPS * std::max(s, anorm)) {
                    a.at(l, l - 1) = 0.0;
                    break;
                }
            }
            double x = a.at(nn, nn);
            if (l == nn) {
                wri[nn--] = x;
            } else {
                double y = a.at(nn - 1, nn - 1);
                double w = a.at(nn, nn - 1) * a.at(nn - 1, nn);
                if (l == nn - 1) {
                    p = 0.5 * (y - x);
                    q = p * p + w;
                    double z = std::sqrt(std::fabs(q));
                    if (q >= 0.0) {
                        z = p + sign_with(z, p);
                        wri[nn - 1] = wri[nn] = x + z;
                        if (z != 0.0) wri[nn] = x - w / z;
                    } else {
                        wri[nn] = cplx(x + p, -z);
                        wri[nn - 1] = std::conj(wri[nn]);
                    }
                    nn -= 2;
                } else {
                    if (its == 60 || ++sweeps > sweep_budget)
                        throw NumericalFailure("eigenvalues: QR iteration did not converge",
                                               std::fabs(a.at(nn, nn - 1)));
                    // ad-hoc exceptional shifts every 10 sweeps, alternating
                    // between the top and the bottom of the active block; a
                    // cycle that survives a bottom-based shift can persist
                    // through an identical second one
                    if (its % 20 == 10) {
                        const double s = std::fabs(a.at(l + 1, l)) + std::fabs(a.at(l + 2, l + 1));
                        y = x = 0.75 * s + a.at(l, l);
                        w = -0.4375 * s * s;
                    } else if (its > 0 && its % 20 == 0) {
                        const double s = std::fabs(a.at(nn, nn - 1)) + std::fabs(a.at(nn - 1, nn - 2));
                        y = x = 0.75 * s + a.at(nn, nn);
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    int m;
                    for (m = nn - 2; m >= l; m--) {
                        const double z = a.at(m, m);
                        r = x - z;
                        double s = y - z;
                        p = (r * s - w) / a.at(m + 1, m) + a.at(m, m + 1);
                        q = a.at(m + 1, m + 1) - z - r - s;
                        r = a.at(m + 2, m + 1);
                        s = std::fabs(p) + std::fabs(q) + std::fabs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l) break;
                        const double u = std::fabs(a.at(m, m - 1)) * (std::fabs(q) + std::fabs(r));
                        const double v = std::fabs(p) * (std::fabs(a.at(m - 1, m - 1)) +
                                                         std::fabs(z) + std::fabs(a.at(m + 1, m + 1)));
                        if (u <= EPS * v) break;
                    }
                    for (int i = m; i < nn - 1; i++) {
                        a.at(i + 2, i) = 0.0;
                        if (i != m) a.at(i + 2, i - 1) = 0.0;
                    }
                    for (int k = m; k < nn; k++) {
                        if (k != m) {
                            p = a.at(k, k - 1);
                            q = a.at(k + 1, k - 1);
                            r = 0.0;
                            if (k + 1 != nn) r = a.at(k + 2, k - 1);
                            x = std::fabs(p) + std::fabs(q) + std::fabs(r);
                            if (x != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        const double s = sign_with(std::sqrt(p * p + q * q + r * r), p);
                        if (s != 0.0) {
                            if (k == m) {
                                if (l != m) a.at(k, k - 1) = -a.at(k, k - 1);
                            } else {
                                a.at(k, k - 1) = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            const double z = r / s;
                            q /= p;
                            r /= p;
                            for (int j = k; j < nn + 1; j++) {
                                double pp = a.at(k, j) + q * a.at(k + 1, j);
                                if (k + 1 != nn) {
                                    pp += r * a.at(k + 2, j);
                                    a.at(k + 2, j) -= pp * z;
                                }
                                a.at(k + 1, j) -= pp * y;
                                a.at(k, j) -= pp * x;
                            }
                            const int mmin = nn < k + 3 ? nn : k + 3;
                            for (int i = l; i < mmin + 1; i++) {
                                double pp = x * a.at(i, k) + y * a.at(i, k + 1);
                                if (k + 1 != nn) {
                                    pp += z * a.at(i, k + 2);
                                    a.at(i, k + 2) -= pp * r;
                                }
                                a.at(i, k + 1) -= pp * q;
                                a.at(i, k) -= pp;
                            }
                        }
                    }
                }
            }
        } while (l + 1 < nn);
    }
    return wri;
}

}  // namespace

Spectrum eigenvalues(const Matrix& m) {
    if (m.n < 1) throw std::invalid_argument("eigenvalues: empty matrix");
    for (double x : m.a)
        if (!std::isfinite(x)) throw std::invalid_argument("eigenvalues: non-finite entry");
    Spectrum spec;
    if (m.n == 1) {
        spec.eigenvalues = {cplx(m(0, 0), 0.0)};
        return spec;
    }
    if (m.n == 2) {
        spec.eigenvalues = eig2x2(m(0, 0), m(0, 1), m(1, 0), m(1, 1));
        sort_spectrum(spec.eigenvalues);
        return spec;
    }
    Dense a(m);
    balance(a);
    hessenberg(a);
    spec.eigenvalues = hqr(a);
    sort_spectrum(spec.eigenvalues);
    return spec;
}

namespace {

double scaled_norm(const double* x, int n) {
    double top = 0.0;
    for (int i = 0; i < n; i++) top = std::max(top, std::fabs(x[i]));
    if (top == 0.0) return 0.0;
    double acc = 0.0;
    for (int i = 0; i < n; i++) {
        const double y = x[i] / top;
        acc += y * y;
    }
    return top * std::sqrt(acc);
}

}  // namespace

SingularValues singular_values(const Matrix& m) {
    const int n = m.n;
    for (double x : m.a)
        if (!std::isfinite(x)) throw std::invalid_argument("singular_values: non-finite entry");
    std::vector<double> cols = m.a;  // column-major copy
    std::vector<double> norms(n);
    auto col = [&](int j) { return &cols[static_cast<std::size_t>(j) * n]; };
    for (int j = 0; j < n; j++) norms[j] = scaled_norm(col(j), n);

    const double tol = 1e-15;
    for (int sweep = 0; sweep < 60; sweep++) {
        bool changed = false;
        for (int i = 0; i < n - 1; i++) {
            for (int j = i + 1; j < n; j++) {
                const double ni = norms[i], nj = norms[j];
                if (ni == 0.0 || nj == 0.0) continue;
                double g = 0.0;  // cosine of the angle between columns
                const double *ci = col(i), *cj = col(j);
                for (int k = 0; k < n; k++) g += (ci[k] / ni) * (cj[k] / nj);
                if (std::fabs(g) <= tol) continue;
                changed = true;
                const double rho = nj / ni;
                const double zeta = (rho - 1.0 / rho) / (2.0 * g);
                const double tt = sign_with(1.0, zeta) / (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + tt * tt);
                const double s = c * tt;
                double *pi = col(i), *pj = col(j);
                for (int k = 0; k < n; k++) {
                    const double xi = pi[k], xj = pj[k];
                    pi[k] = c * xi - s * xj;
                    pj[k] = s * xi + c * xj;
                }
                norms[i] = scaled_norm(pi, n);
                norms[j] = scaled_norm(pj, n);
            }
        }
        if (!changed) break;
    }
    SingularValues sv;
    sv.values = norms;
    std::sort(sv.values.begin(), sv.values.end(), std::greater<double>());
    return sv;
}

std::optional<double> stability_exponent(const Spectrum& spec, int t) {
    if (t < 1) throw std::invalid_argument("stability_exponent: t must be >= 1");
    if (spec.eigenvalues.size() < 2)
        throw std::invalid_argument("stability_exponent: need at least two eigenvalues");
    const double mod = std::abs(spec.eigenvalues[1]);
    if (mod < kDegenerateModulus) return std::nullopt;
    return -std::log(mod) / t;
}

std::optional<double> lyapunov_exponent(const SingularValues& sv, int t) {
    if (t < 1) throw std::invalid_argument("lyapunov_exponent: t must be >= 1");
    if (sv.values.size() < 2)
        throw std::invalid_argument("lyapunov_exponent: need at least two singular values");
    const double z1 = sv.values[1];
    if (z1 < kDegenerateModulus) return std::nullopt;
    return -std::log(z1) / t;
}

Spectrum rescale_spectrum(const Spectrum& spec, int t) {
    if (t < 1) throw std::invalid_argument("rescale_spectrum: t must be >= 1");
    Spectrum out;
    out.eigenvalues.reserve(spec.eigenvalues.size());
    for (const cplx& lam : spec.eigenvalues) {
        const double mod = std::abs(lam);
        if (mod == 0.0) {
            out.eigenvalues.push_back(cplx(0.0, 0.0));
            continue;
        }
        // modulus |lam|^{1/t}, argument unchanged
        const double newmod = std::exp(std::log(mod) / t);
        out.eigenvalues.push_back(lam * (newmod / mod));
    }
    return out;
}

double real_fraction(const Spectrum& spec, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("real_fraction: eps must be > 0");
    const std::size_t n = spec.eigenvalues.size();
    if (n <= 1) return 1.0;
    std::size_t count = 0;
    for (std::size_t k = 1; k < n; k++)
        if (std::fabs(spec.eigenvalues[k].imag()) < eps) count++;
    return static_cast<double>(count) / static_cast<double>(n - 1);
}

Spectrum chain_spectrum(const ChainRecord& record) {
    if (!record.has_deflated) return eigenvalues(record.product);
    Spectrum inner = eigenvalues(record.deflated);
    const double scale = std::isfinite(record.log_scale) ? std::exp(record.log_scale) : 0.0;
    Spectrum out;
    out.eigenvalues.reserve(inner.eigenvalues.size() + 1);
    out.eigenvalues.push_back(cplx(1.0, 0.0));
    for (const cplx& mu : inner.eigenvalues) out.eigenvalues.push_back(mu * scale);
    sort_spectrum(out.eigenvalues);
    return out;
}

std::optional<double> chain_log_lambda1(const ChainRecord& record) {
    if (!record.has_deflated) {
        const Spectrum spec = eigenvalues(record.product);
        if (spec.eigenvalues.size() < 2) return std::nullopt;
        const double mod = std::abs(spec.eigenvalues[1]);
        if (mod < kDegenerateModulus) return std::nullopt;
        return std::log(mod);
    }
    if (!std::isfinite(record.log_scale)) return std::nullopt;
    const Spectrum inner = eigenvalues(record.deflated);
    double top = 0.0;
    for (const cplx& mu : inner.eigenvalues) top = std::max(top, std::abs(mu));
    if (top == 0.0) return std::nullopt;
    return record.log_scale + std::log(top);
}

ExponentSample exponent_sample(const ChainRecord& record, std::uint64_t replica_index) {
    if (record.t < 1) throw std::invalid_argument("exponent_sample: record has no steps");
    ExponentSample s;
    s.t = record.t;
    s.n = record.product.n;
    s.replica_index = replica_index;
    const auto loglam = chain_log_lambda1(record);
    if (loglam) {
        s.theta = -(*loglam) / record.t;
    } else {
        s.theta = std::numeric_limits<double>::quiet_NaN();
        s.theta_degenerate = true;
    }
    const auto vth = lyapunov_exponent(chain_singular_values(record), record.t);
    if (vth) {
        s.vartheta = *vth;
    } else {
        s.vartheta = std::numeric_limits<double>::quiet_NaN();
        s.vartheta_degenerate = true;
    }
    return s;
}

SingularValues chain_singular_values(const ChainRecord& record) {
    if (!record.has_deflated) return singular_values(record.product);
    const int n = record.product.n;
    const Deflation defl(n);
    // first column of Q^T U Q: O(1), no cancellation
    std::vector<double> qcol(n, 0.0);
    {
        // x = Q e_1 is the first column of Q; y = U x; c = Q^T y
        std::vector<double> x(n), y(n, 0.0);
        for (int i = 0; i < n; i++) x[i] = defl.q(i, 0);
        for (int j = 0; j < n; j++) {
            const double xj = x[j];
            for (int i = 0; i < n; i++) y[i] += record.product(i, j) * xj;
        }
        for (int i = 0; i < n; i++) {
            double acc = 0.0;
            for (int k = 0; k < n; k++) acc += defl.q(k, i) * y[k];
            qcol[i] = acc;
        }
    }
    const double scale = std::isfinite(record.log_scale) ? std::exp(record.log_scale) : 0.0;
    Matrix v(n);
    v(0, 0) = 1.0;
    for (int i = 1; i < n; i++) v(i, 0) = qcol[i];
    for (int j = 1; j < n; j++)
        for (int i = 1; i < n; i++) v(i, j) = scale * record.deflated(i - 1, j - 1);
    return singular_values(v);
}

}  // namespace rmc
