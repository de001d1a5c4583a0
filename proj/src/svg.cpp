#include "rmc/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace rmc {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (lo > hi) {
            lo = 0.0;
            hi = 1.0;
        }
        if (lo == hi) {
            lo -= 0.5;
            hi += 0.5;
        }
        const double w = hi - lo;
        lo -= 0.05 * w;
        hi += 0.05 * w;
    }
};

std::vector<double> ticks(double lo, double hi, int target = 6) {
    const double span = hi - lo;
    double step = std::pow(10.0, std::floor(std::log10(span / target)));
    for (double k : {1.0, 2.0, 5.0, 10.0}) {
        if (span / (step * k) <= target) {
            step *= k;
            break;
        }
    }
    std::vector<double> out;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-12 * span; v += step)
        out.push_back(std::fabs(v) < 1e-12 * span ? 0.0 : v);
    return out;
}

}  // namespace

std::string render_svg(const SvgPlot& plot, int width, int height) {
    const double mL = 62, mR = 16, mT = 34, mB = 46;
    Range rx, ry;
    for (const auto& b : plot.bars) {
        for (double v : b.left) rx.add(v);
        for (double v : b.right) rx.add(v);
        for (double v : b.height) ry.add(v);
        ry.add(0.0);
    }
    for (const auto& l : plot.lines) {
        for (double v : l.x) rx.add(v);
        for (double v : l.y) ry.add(v);
    }
    for (const auto& p : plot.points) {
        for (double v : p.x) rx.add(v);
        for (double v : p.y) ry.add(v);
    }
    rx.pad();
    ry.pad();
    const double pw = width - mL - mR, ph = height - mT - mB;
    auto X = [&](double v) { return mL + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
    auto Y = [&](double v) { return mT + ph - (v - ry.lo) / (ry.hi - ry.lo) * ph; };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << width / 2 << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\" "
         "text-anchor=\"middle\">" << plot.title << "</text>\n";

    for (double v : ticks(rx.lo, rx.hi)) {
        const double x = X(v);
        s << "<line x1=\"" << num(x) << "\" y1=\"" << num(mT + ph) << "\" x2=\"" << num(x)
          << "\" y2=\"" << num(mT + ph + 4) << "\" stroke=\"black\"/>\n";
        s << "<text x=\"" << num(x) << "\" y=\"" << num(mT + ph + 17)
          << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">" << num(v)
          << "</text>\n";
    }
    for (double v : ticks(ry.lo, ry.hi)) {
        const double y = Y(v);
        s << "<line x1=\"" << num(mL - 4) << "\" y1=\"" << num(y) << "\" x2=\"" << num(mL)
          << "\" y2=\"" << num(y) << "\" stroke=\"black\"/>\n";
        s << "<text x=\"" << num(mL - 7) << "\" y=\"" << num(y + 3)
          << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">" << num(v)
          << "</text>\n";
    }
    s << "<text x=\"" << width / 2 << "\" y=\"" << height - 8
      << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" << plot.xlabel
      << "</text>\n";
    s << "<text x=\"14\" y=\"" << mT + ph / 2
      << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
      << mT + ph / 2 << ")\">" << plot.ylabel << "</text>\n";

    for (const auto& b : plot.bars) {
        for (std::size_t k = 0; k < b.left.size(); k++) {
            const double x0 = X(b.left[k]), x1 = X(b.right[k]);
            const double y0 = Y(b.height[k]), y1 = Y(0.0);
            s << "<rect x=\"" << num(x0) << "\" y=\"" << num(std::min(y0, y1)) << "\" width=\""
              << num(std::fabs(x1 - x0)) << "\" height=\"" << num(std::fabs(y1 - y0))
              << "\" fill=\"" << b.fill << "\" stroke=\"#6baed6\" stroke-width=\"0.4\"/>\n";
        }
    }
    for (const auto& l : plot.lines) {
        s << "<polyline fill=\"none\" stroke=\"" << l.stroke << "\" stroke-width=\"1.6\" points=\"";
        for (std::size_t k = 0; k < l.x.size(); k++) {
            if (k) s << " ";
            s << num(X(l.x[k])) << "," << num(Y(l.y[k]));
        }
        s << "\"/>\n";
    }
    for (const auto& p : plot.points) {
        for (std::size_t k = 0; k < p.x.size(); k++)
            s << "<circle cx=\"" << num(X(p.x[k])) << "\" cy=\"" << num(Y(p.y[k])) << "\" r=\""
              << num(p.radius) << "\" fill=\"" << p.fill << "\" fill-opacity=\"0.7\"/>\n";
    }
    s << "<rect x=\"" << num(mL) << "\" y=\"" << num(mT) << "\" width=\"" << num(pw)
      << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
    s << "</svg>\n";
    return s.str();
}

}  // namespace rmc
