#pragma once

#include <string>
#include <vector>

namespace rmc {

// Minimal static SVG plotting: histogram bars, polylines, scatter points,
// linear axes with ticks and labels. Deterministic output.
struct SvgPlot {
    std::string title, xlabel, ylabel;

    struct Bars {
        std::vector<double> left, right, height;
        std::string fill = "#9ecae1";
    };
    struct Line {
        std::vector<double> x, y;
        std::string stroke = "#d62728";
    };
    struct Points {
        std::vector<double> x, y;
        double radius = 1.2;
        std::string fill = "#3182bd";
    };

    std::vector<Bars> bars;
    std::vector<Line> lines;
    std::vector<Points> points;
};

std::string render_svg(const SvgPlot& plot, int width = 640, int height = 440);

}  // namespace rmc
