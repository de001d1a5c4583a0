#include "rmc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rmc/densities.hpp"
#include "rmc/specfun.hpp"

namespace rmc {

double mean(const std::vector<double>& xs) {
    if (xs.empty()) throw std::invalid_argument("mean: empty input");
    double acc = 0.0;
    for (double x : xs) acc += x;
    return acc / xs.size();
}

double variance(const std::vector<double>& xs) {
    if (xs.size() < 2) throw std::invalid_argument("variance: need >= 2 samples");
    const double mu = mean(xs);
    double acc = 0.0;
    for (double x : xs) acc += (x - mu) * (x - mu);
    return acc / (xs.size() - 1);
}

double median(std::vector<double> xs) {
    if (xs.empty()) throw std::invalid_argument("median: empty input");
    const std::size_t mid = xs.size() / 2;
    std::nth_element(xs.begin(), xs.begin() + mid, xs.end());
    double hi = xs[mid];
    if (xs.size() % 2 == 1) return hi;
    std::nth_element(xs.begin(), xs.begin() + mid - 1, xs.begin() + mid);
    return 0.5 * (hi + xs[mid - 1]);
}

namespace {

double quantile_sorted(const std::vector<double>& s, double q) {
    const double pos = q * (s.size() - 1);
    const std::size_t k = static_cast<std::size_t>(pos);
    const double frac = pos - k;
    if (k + 1 < s.size()) return s[k] * (1.0 - frac) + s[k + 1] * frac;
    return s[k];
}

}  // namespace

Histogram histogram(const std::vector<double>& samples, int bins) {
    if (samples.size() < 2) throw std::invalid_argument("histogram: need >= 2 samples");
    for (double x : samples)
        if (!std::isfinite(x)) throw std::invalid_argument("histogram: non-finite sample");
    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    const double lo = sorted.front(), hi = sorted.back();
    if (lo == hi) throw std::invalid_argument("histogram: degenerate (constant) input");
    if (bins <= 0) {
        const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
        const double width = 2.0 * iqr / std::cbrt(static_cast<double>(sorted.size()));
        if (width > 0.0)
            bins = static_cast<int>(std::ceil((hi - lo) / width));
        else
            bins = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(sorted.size()))));
        bins = std::clamp(bins, 1, 2000);
    }
    std::vector<double> edges(bins + 1);
    for (int k = 0; k <= bins; k++) edges[k] = lo + (hi - lo) * k / bins;
    return histogram(samples, edges);
}

Histogram histogram(const std::vector<double>& samples, const std::vector<double>& edges) {
    if (samples.empty()) throw std::invalid_argument("histogram: empty input");
    if (edges.size() < 2) throw std::invalid_argument("histogram: need >= 2 edges");
    for (std::size_t k = 0; k + 1 < edges.size(); k++)
        if (!(edges[k] < edges[k + 1]))
            throw std::invalid_argument("histogram: edges must be strictly increasing");
    const int bins = static_cast<int>(edges.size()) - 1;
    std::vector<std::size_t> counts(bins, 0);
    std::size_t inside = 0;
    for (double x : samples) {
        if (x < edges.front() || x > edges.back()) continue;
        int k = static_cast<int>(std::upper_bound(edges.begin(), edges.end(), x) - edges.begin()) - 1;
        if (k == bins) k = bins - 1;  // right edge closed
        counts[k]++;
        inside++;
    }
    if (inside == 0) throw std::invalid_argument("histogram: no samples inside the edges");
    Histogram h;
    h.edges = edges;
    h.count = inside;
    h.density.resize(bins);
    for (int k = 0; k < bins; k++)
        h.density[k] = static_cast<double>(counts[k]) / (inside * (edges[k + 1] - edges[k]));
    return h;
}

namespace {

// asymptotic Kolmogorov survival function Q(lambda) = 2 sum (-1)^{j-1} e^{-2 j^2 lambda^2}
double kolmogorov_q(double lambda) {
    if (lambda < 1e-8) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 100; j++) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += sign * term;
        if (term < 1e-16) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

KsResult ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw std::invalid_argument("ks_statistic: empty input");
    std::sort(samples.begin(), samples.end());
    const double m = static_cast<double>(samples.size());
    double d = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < samples.size(); i++) {
        const double f = cdf(samples[i]);
        if (!(f >= 0.0 && f <= 1.0) || f + 1e-12 < prev)
            throw std::invalid_argument("ks_statistic: cdf is not monotone in [0,1] on the samples");
        prev = std::max(prev, f);
        d = std::max(d, std::fabs(f - static_cast<double>(i) / m));
        d = std::max(d, std::fabs(static_cast<double>(i + 1) / m - f));
    }
    KsResult res;
    res.d = d;
    const double sq = std::sqrt(m);
    res.p_value = kolmogorov_q((sq + 0.12 + 0.11 / sq) * d);
    return res;
}

std::function<double(double)> FitResult::cdf() const {
    if (family == "gamma") {
        const double al = params[0], be = params[1];
        return [al, be](double x) { return x <= 0.0 ? 0.0 : gamma_cdf(x, al, be); };
    }
    if (family == "beta") {
        const double p = params[0], q = params[1];
        return [p, q](double x) {
            if (x <= 0.0) return 0.0;
            if (x >= 1.0) return 1.0;
            return beta_cdf(x, p, q);
        };
    }
    if (family == "gaussian") {
        const double mu = params[0], sigma = params[1];
        return [mu, sigma](double x) { return 0.5 * std::erfc(-(x - mu) / (sigma * std::sqrt(2.0))); };
    }
    throw std::logic_error("FitResult::cdf: unknown family " + family);
}

std::function<double(double)> FitResult::pdf() const {
    if (family == "gamma") {
        const double al = params[0], be = params[1];
        return [al, be](double x) { return x < 0.0 ? 0.0 : gamma_pdf(x, al, be); };
    }
    if (family == "beta") {
        const double p = params[0], q = params[1];
        return make_beta_density(p, q).pdf;
    }
    if (family == "gaussian") {
        const double mu = params[0], sigma = params[1];
        return [mu, sigma](double x) {
            const double z = (x - mu) / sigma;
            return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * M_PI));
        };
    }
    throw std::logic_error("FitResult::pdf: unknown family " + family);
}

FitResult fit_gamma(const std::vector<double>& samples) {
    if (samples.size() < 10) throw std::invalid_argument("fit_gamma: need >= 10 samples");
    double m1 = 0.0, mlog = 0.0;
    for (double x : samples) {
        if (!(x > 0.0)) throw std::invalid_argument("fit_gamma: samples must be > 0");
        m1 += x;
        mlog += std::log(x);
    }
    m1 /= samples.size();
    mlog /= samples.size();
    const double s = std::log(m1) - mlog;  // >= 0 by Jensen; 0 only for constant data
    if (!(s > 0.0)) throw std::invalid_argument("fit_gamma: zero variance");

    FitResult res;
    res.family = "gamma";
    res.count = samples.size();
    double alpha = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
    bool converged = false;
    double lo = 1e-10, hi = 1e10;  // f is strictly decreasing in alpha
    for (int it = 0; it < 100; it++) {
        const double f = std::log(alpha) - digamma(alpha) - s;
        if (std::fabs(f) < 1e-13) {
            converged = true;
            break;
        }
        if (f > 0.0) lo = alpha; else hi = alpha;
        const double fp = 1.0 / alpha - trigamma(alpha);
        double next = alpha - f / fp;
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        if (next == alpha) {
            converged = true;
            break;
        }
        alpha = next;
    }
    if (!converged) {
        // method of moments fallback
        const double var = variance(samples);
        alpha = m1 * m1 / var;
        res.method = "moments";
    }
    const double beta = alpha / m1;
    res.params = {alpha, beta};
    res.log_likelihood = samples.size() * (alpha * std::log(beta) - lgamma_pos(alpha)
                          + (alpha - 1.0) * mlog - beta * m1);
    res.ks_statistic = ks_statistic(samples, res.cdf()).d;
    return res;
}

FitResult fit_beta(const std::vector<double>& samples) {
    if (samples.size() < 10) throw std::invalid_argument("fit_beta: need >= 10 samples");
    double m1 = 0.0, l1 = 0.0, l2 = 0.0;
    for (double x : samples) {
        if (!(x > 0.0) || !(x < 1.0)) throw std::invalid_argument("fit_beta: samples must be in (0,1)");
        m1 += x;
        l1 += std::log(x);
        l2 += std::log1p(-x);
    }
    const double m = static_cast<double>(samples.size());
    m1 /= m;
    l1 /= m;
    l2 /= m;
    const double var = variance(samples);
    if (!(var > 0.0)) throw std::invalid_argument("fit_beta: zero variance");

    // moment start
    const double common = m1 * (1.0 - m1) / var - 1.0;
    double p = std::max(m1 * common, 1e-3);
    double q = std::max((1.0 - m1) * common, 1e-3);
    bool converged = false;
    for (int it = 0; it < 200; it++) {
        const double dpq = digamma(p + q);
        const double f1 = digamma(p) - dpq - l1;
        const double f2 = digamma(q) - dpq - l2;
        if (std::fabs(f1) < 1e-12 && std::fabs(f2) < 1e-12) {
            converged = true;
            break;
        }
        const double tpq = trigamma(p + q);
        const double j11 = trigamma(p) - tpq, j12 = -tpq;
        const double j21 = -tpq, j22 = trigamma(q) - tpq;
        const double det = j11 * j22 - j12 * j21;
        if (det == 0.0) break;
        double dp = -(j22 * f1 - j12 * f2) / det;
        double dq = -(-j21 * f1 + j11 * f2) / det;
        double scale = 1.0;
        while ((p + scale * dp <= 0.0 || q + scale * dq <= 0.0) && scale > 1e-8) scale *= 0.5;
        p += scale * dp;
        q += scale * dq;
    }
    FitResult res;
    res.family = "beta";
    res.count = samples.size();
    if (!converged) {
        p = std::max(m1 * common, 1e-6);
        q = std::max((1.0 - m1) * common, 1e-6);
        res.method = "moments";
    }
    res.params = {p, q};
    res.log_likelihood = m * (lgamma_pos(p + q) - lgamma_pos(p) - lgamma_pos(q)
                          + (p - 1.0) * l1 + (q - 1.0) * l2);
    res.ks_statistic = ks_statistic(samples, res.cdf()).d;
    return res;
}

FitResult fit_gaussian(const std::vector<double>& samples) {
    if (samples.size() < 10) throw std::invalid_argument("fit_gaussian: need >= 10 samples");
    const double mu = mean(samples);
    const double var = variance(samples);
    if (!(var > 0.0)) throw std::invalid_argument("fit_gaussian: zero variance");
    FitResult res;
    res.family = "gaussian";
    res.count = samples.size();
    res.params = {mu, std::sqrt(var)};
    double acc = 0.0;
    for (double x : samples) acc += (x - mu) * (x - mu);
    res.log_likelihood = -0.5 * samples.size() * std::log(2.0 * M_PI * var) - 0.5 * acc / var;
    res.ks_statistic = ks_statistic(samples, res.cdf()).d;
    return res;
}

std::vector<CurvePoint> mean_log_modulus_curve(const std::map<int, std::vector<double>>& per_t,
                                               std::vector<int>* skipped) {
    if (per_t.empty()) throw std::invalid_argument("mean_log_modulus_curve: empty input");
    std::vector<CurvePoint> out;
    for (const auto& [t, vals] : per_t) {
        if (vals.empty()) throw std::invalid_argument("mean_log_modulus_curve: empty t-slice");
        double acc = 0.0;
        for (double v : vals) acc += v;
        acc /= vals.size();
        if (!(acc > 0.0)) {
            if (skipped) skipped->push_back(t);
            continue;
        }
        out.push_back({t, -std::log(acc)});
    }
    return out;
}

LineFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit: bad input");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); i++) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    const double vx = sxx - sx * sx / n;
    const double vy = syy - sy * sy / n;
    const double cxy = sxy - sx * sy / n;
    if (vx == 0.0) throw std::invalid_argument("linear_fit: degenerate abscissa");
    LineFit f;
    f.slope = cxy / vx;
    f.intercept = (sy - f.slope * sx) / n;
    f.r2 = (vy == 0.0) ? 1.0 : (cxy * cxy) / (vx * vy);
    return f;
}

}  // namespace rmc
