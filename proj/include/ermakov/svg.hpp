// Minimal SVG line plots: polylines in a shared bounding box with a frame.
// Plots are a viewing convenience; nothing downstream parses them.
#pragma once

#include <string>
#include <vector>

namespace ermakov {

struct SvgSeries {
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
};

void write_svg_polylines(const std::string& path, const std::vector<SvgSeries>& series,
                         const std::string& title, int width = 640, int height = 400);

} // namespace ermakov
