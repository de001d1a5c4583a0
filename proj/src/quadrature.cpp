#include "rmc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

namespace rmc {

namespace {

// 15-point Gauss-Legendre nodes/weights on [-1,1] (positive half; symmetric).
const double kNodes[7] = {
    2.01194093997434542e-01, 3.94151347077563385e-01, 5.70972172608538830e-01,
    7.24417731360170070e-01, 8.48206583410427206e-01, 9.37273392400705951e-01,
    9.87992518020485377e-01};
const double kWeights[7] = {
    1.98431485327111634e-01, 1.86161000015562239e-01, 1.66269205816994114e-01,
    1.39570677926154324e-01, 1.07159220467171759e-01, 7.03660474881071529e-02,
    3.07532419961181538e-02};
const double kWeightMid = 2.02578241925561365e-01;

double gauss15(const std::function<double(double)>& f, double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    double acc = kWeightMid * f(mid);
    for (int i = 0; i < 7; i++) {
        const double dx = half * kNodes[i];
        acc += kWeights[i] * (f(mid + dx) + f(mid - dx));
    }
    return acc * half;
}

struct Cell {
    double lo, hi;
    double value;  // sum of the two half-cell G15 values
    double left, right;
    double error;
};

Cell make_cell(const std::function<double(double)>& f, double lo, double hi, double whole) {
    Cell c;
    c.lo = lo;
    c.hi = hi;
    const double mid = 0.5 * (lo + hi);
    c.left = gauss15(f, lo, mid);
    c.right = gauss15(f, mid, hi);
    c.value = c.left + c.right;
    c.error = std::fabs(c.value - whole);
    return c;
}

}  // namespace

IntegralResult integrate_adaptive(const std::function<double(double)>& f,
                                  double lo, double hi, const QuadratureSpec& spec) {
    IntegralResult res;
    if (!(spec.abs_tol > 0.0) || !(spec.rel_tol > 0.0))
        throw std::invalid_argument("integrate_adaptive: tolerances must be > 0");
    if (lo == hi) {
        res.converged = true;
        return res;
    }
    const double sign = (hi > lo) ? 1.0 : -1.0;
    if (hi < lo) std::swap(lo, hi);

    auto cmp = [](const Cell& a, const Cell& b) { return a.error < b.error; };
    std::priority_queue<Cell, std::vector<Cell>, decltype(cmp)> heap(cmp);

    const double whole = gauss15(f, lo, hi);
    heap.push(make_cell(f, lo, hi, whole));
    double total = heap.top().value;
    double toterr = heap.top().error;
    int cells = 1;

    while (cells < spec.max_subdivisions) {
        const double tol = std::max(spec.abs_tol, spec.rel_tol * std::fabs(total));
        if (toterr <= tol || !std::isfinite(toterr)) break;
        Cell worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (mid <= worst.lo || mid >= worst.hi) {
            // interval exhausted at machine precision; accept as-is
            toterr -= worst.error;
            worst.error = 0.0;
            heap.push(worst);
            continue;
        }
        Cell a = make_cell(f, worst.lo, mid, worst.left);
        Cell b = make_cell(f, mid, worst.hi, worst.right);
        total += a.value + b.value - worst.value;
        toterr += a.error + b.error - worst.error;
        heap.push(a);
        heap.push(b);
        cells++;
    }

    res.value = sign * total;
    res.error = toterr;
    res.subdivisions = cells;
    res.converged = std::isfinite(total) &&
                    toterr <= std::max(spec.abs_tol, spec.rel_tol * std::fabs(total));
    return res;
}

}  // namespace rmc
