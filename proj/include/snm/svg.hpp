#pragma once

#include <string>
#include <vector>

namespace snm {

struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool marks = false;   // draw point markers instead of a solid line
    std::string color;    // empty: pick from the default palette
};

// Minimal static line chart, enough for the figure-style outputs: linear or
// log axes, auto ticks, a legend, one polyline or mark set per series.
// Non-finite points are skipped (lines break around them).
struct SvgChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    int width = 640;
    int height = 440;
    std::vector<SvgSeries> series;

    std::string render() const;
    void write(const std::string& path) const;
};

}  // namespace snm
