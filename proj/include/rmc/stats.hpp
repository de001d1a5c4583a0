#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace rmc {

struct Histogram {
    std::vector<double> edges;    // ascending, size bins+1
    std::vector<double> density;  // per bin; sum(density * width) = 1
    std::size_t count = 0;        // samples inside the edges
};

// Density-normalized histogram. With bins == 0 the bin count follows the
// Freedman-Diaconis rule (2 IQR m^{-1/3}).
Histogram histogram(const std::vector<double>& samples, int bins = 0);
Histogram histogram(const std::vector<double>& samples, const std::vector<double>& edges);

struct KsResult {
    double d = 0.0;
    double p_value = 0.0;
};

// Two-sided Kolmogorov-Smirnov statistic of the samples against an
// evaluable CDF, with the asymptotic-series p-value.
KsResult ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

struct FitResult {
    std::string family;          // gamma | beta | gaussian
    std::vector<double> params;  // (alpha, beta) or (mu, sigma)
    double log_likelihood = 0.0;
    double ks_statistic = 0.0;   // against the fitted CDF
    std::size_t count = 0;
    std::size_t excluded = 0;    // degenerate samples excluded upstream
    std::string method = "mle";  // "moments" when the solver fell back

    std::function<double(double)> cdf() const;
    std::function<double(double)> pdf() const;
};

// Maximum-likelihood Gamma fit (rate convention): safeguarded Newton on
// ln(alpha) - psi(alpha) = ln(mean) - mean(ln x), beta = alpha / mean.
FitResult fit_gamma(const std::vector<double>& samples);

// Maximum-likelihood Beta fit: Newton on the two digamma equations from the
// moment-matching start.
FitResult fit_beta(const std::vector<double>& samples);

// Gaussian fit: sample mean and unbiased variance.
FitResult fit_gaussian(const std::vector<double>& samples);

// For each t, -ln(mean of |lambda_1| samples); the average sits inside the
// logarithm. All-degenerate slices are skipped and reported.
struct CurvePoint {
    int t = 0;
    double neg_log_mean = 0.0;
};
std::vector<CurvePoint> mean_log_modulus_curve(const std::map<int, std::vector<double>>& per_t,
                                               std::vector<int>* skipped = nullptr);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};
LineFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

double mean(const std::vector<double>& xs);
double variance(const std::vector<double>& xs);  // unbiased
double median(std::vector<double> xs);

}  // namespace rmc
