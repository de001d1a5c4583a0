#include "rmc/specfun.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rmc {

double lgamma_pos(double x) {
    if (!(x > 0.0)) throw std::invalid_argument("lgamma_pos: x must be > 0");
    static const double cof[14] = {
        57.1562356658629235,     -59.5979603554754912,    14.1360979747417471,
        -0.491913816097620199,   0.339946499848118887e-4, 0.465236289270485756e-4,
        -0.983744753048795646e-4, 0.158088703224912494e-3, -0.210264441724104883e-3,
        0.217439618115212643e-3, -0.164318106536763890e-3, 0.844182239838527433e-4,
        -0.261908384015814087e-4, 0.368991826595316234e-5};
    double y = x;
    double tmp = x + 5.24218750000000000;
    tmp = (x + 0.5) * std::log(tmp) - tmp;
    double ser = 0.999999999999997092;
    for (int j = 0; j < 14; j++) ser += cof[j] / ++y;
    return tmp + std::log(2.5066282746310005 * ser / x);
}

double digamma(double x) {
    if (!(x > 0.0)) throw std::invalid_argument("digamma: x must be > 0");
    double result = 0.0;
    while (x < 10.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    // asymptotic expansion, Bernoulli terms through 1/x^12
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    double series = std::log(x) - 0.5 * inv
        - inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0
        - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0))))));
    return result + series;
}

double trigamma(double x) {
    if (!(x > 0.0)) throw std::invalid_argument("trigamma: x must be > 0");
    double result = 0.0;
    while (x < 10.0) {
        result += 1.0 / (x * x);
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    double series = inv * (1.0 + 0.5 * inv
        + inv2 * (1.0 / 6.0 - inv2 * (1.0 / 30.0 - inv2 * (1.0 / 42.0
        - inv2 * (1.0 / 30.0 - inv2 * (5.0 / 66.0))))));
    return result + series;
}

namespace {

// Continued fraction for the incomplete beta (modified Lentz).
double betacf(double a, double b, double x) {
    const double FPMIN = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
    const double EPS = std::numeric_limits<double>::epsilon();
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < FPMIN) d = FPMIN;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; m++) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < FPMIN) d = FPMIN;
        c = 1.0 + aa / c;
        if (std::fabs(c) < FPMIN) c = FPMIN;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < FPMIN) d = FPMIN;
        c = 1.0 + aa / c;
        if (std::fabs(c) < FPMIN) c = FPMIN;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= EPS) break;
    }
    return h;
}

}  // namespace

double reg_inc_beta(double x, double p, double q) {
    if (!(p > 0.0) || !(q > 0.0)) throw std::invalid_argument("reg_inc_beta: p, q must be > 0");
    if (!(x >= 0.0) || !(x <= 1.0)) throw std::invalid_argument("reg_inc_beta: x must be in [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double bt = std::exp(lgamma_pos(p + q) - lgamma_pos(p) - lgamma_pos(q)
                               + p * std::log(x) + q * std::log1p(-x));
    if (x < (p + 1.0) / (p + q + 2.0))
        return bt * betacf(p, q, x) / p;
    return 1.0 - bt * betacf(q, p, 1.0 - x) / q;
}

double reg_inc_gamma(double x, double a) {
    if (!(a > 0.0)) throw std::invalid_argument("reg_inc_gamma: a must be > 0");
    if (!(x >= 0.0)) throw std::invalid_argument("reg_inc_gamma: x must be >= 0");
    if (x == 0.0) return 0.0;
    const double gln = lgamma_pos(a);
    if (x < a + 1.0) {
        // series representation
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int i = 0; i < 500; i++) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * std::numeric_limits<double>::epsilon())
                break;
        }
        return sum * std::exp(-x + a * std::log(x) - gln);
    }
    // continued fraction for Q(a,x) (modified Lentz)
    const double FPMIN = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
    double b = x + 1.0 - a;
    double c = 1.0 / FPMIN;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; i++) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < FPMIN) d = FPMIN;
        c = b + an / c;
        if (std::fabs(c) < FPMIN) c = FPMIN;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= std::numeric_limits<double>::epsilon()) break;
    }
    return 1.0 - std::exp(-x + a * std::log(x) - gln) * h;
}

}  // namespace rmc
